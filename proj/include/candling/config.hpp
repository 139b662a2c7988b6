// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_CONFIG_HPP
#define CANDLING_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/augment.hpp"
#include "candling/errors.hpp"
#include "candling/model_zoo.hpp"
#include "candling/preprocess.hpp"
#include "candling/synthetic.hpp"
#include "candling/trainer.hpp"

namespace candling::config {

/**
 * @brief One structured document holding every knob the pipeline reads.
 *
 * Parsing is strict: a key the schema does not know is an error naming the
 * offending dotted path, so typos fail loudly instead of silently falling
 * back to defaults. The fully resolved document is written next to every
 * run's outputs for provenance.
 */
struct RunConfig {
    std::string backbone = "reference_cnn";
    std::string out = "out";

    struct Data {
        std::string root;
        double train_fraction = 0.8;
        int k = 5;
        std::uint64_t seed = 17;
        bool operator==(const Data&) const = default;
    } data;

    struct Preprocess {
        double margin = 0.05;
        bool operator==(const Preprocess&) const = default;
    } preprocess;

    struct Augment {
        std::pair<double, double> rotation{-5.0, 5.0};
        bool flip_x = true;
        bool flip_y = true;
        std::pair<double, double> shear{-5.0, 5.0};
        std::pair<double, double> scale{0.9, 1.1};
        std::pair<double, double> translate{-0.05, 0.05};
        std::uint64_t seed = 17;
        bool operator==(const Augment&) const = default;
    } augment;

    struct Models {
        std::string cache_dir = "weights";
        bool offline = false;
        std::string fine_tune = "full";
        bool operator==(const Models&) const = default;
    } models;

    struct Train {
        double lr = 1e-4;
        int batch = 16;
        int epochs = 20;
        std::string optimizer = "sgd_momentum";
        double momentum = 0.9;
        double weight_decay = 0.0;
        std::uint64_t seed = 17;
        bool operator==(const Train&) const = default;
    } train;

    struct Synth {
        int per_class = 100;
        int size = 256;
        std::uint64_t seed = 7;
        bool operator==(const Synth&) const = default;
    } synth;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::string& scope,
                           const std::vector<std::string>& allowed) {
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const auto& a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown config key '" +
                              (scope.empty() ? key : scope + "." + key) +
                              "'");
    }
}

template <typename T>
inline T typed(const nlohmann::json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + path + "' has the wrong type");
    }
}

/// A range key accepts either [lo, hi] or a single magnitude m meaning a
/// symmetric band around the center.
inline std::pair<double, double> range_from(const nlohmann::json& j,
                                            const std::string& path,
                                            double center) {
    if (j.is_array()) {
        if (j.size() != 2)
            throw ConfigError("config key '" + path +
                              "' needs exactly two entries");
        return {typed<double>(j[0], path), typed<double>(j[1], path)};
    }
    const double m = typed<double>(j, path);
    return {center - m, center + m};
}

inline nlohmann::ordered_json range_to(const std::pair<double, double>& r) {
    return nlohmann::ordered_json::array({r.first, r.second});
}

}  // namespace detail

/// Applies a parsed document on top of `base`. Unknown keys and type
/// mismatches raise ConfigError with the dotted key path.
inline RunConfig parse_run_config(const nlohmann::json& doc,
                                  RunConfig base = {}) {
    using detail::range_from;
    using detail::reject_unknown;
    using detail::typed;
    if (!doc.is_object()) throw ConfigError("config document must be an object");
    reject_unknown(doc, "", {"backbone", "out", "data", "preprocess",
                             "augment", "models", "train", "synth"});
    RunConfig c = std::move(base);
    if (doc.contains("backbone"))
        c.backbone = typed<std::string>(doc["backbone"], "backbone");
    if (doc.contains("out")) c.out = typed<std::string>(doc["out"], "out");

    if (doc.contains("data")) {
        const auto& d = doc["data"];
        reject_unknown(d, "data", {"root", "train_fraction", "k", "seed"});
        if (d.contains("root"))
            c.data.root = typed<std::string>(d["root"], "data.root");
        if (d.contains("train_fraction"))
            c.data.train_fraction =
                typed<double>(d["train_fraction"], "data.train_fraction");
        if (d.contains("k")) c.data.k = typed<int>(d["k"], "data.k");
        if (d.contains("seed"))
            c.data.seed = typed<std::uint64_t>(d["seed"], "data.seed");
    }
    if (doc.contains("preprocess")) {
        const auto& p = doc["preprocess"];
        reject_unknown(p, "preprocess", {"margin"});
        if (p.contains("margin"))
            c.preprocess.margin =
                typed<double>(p["margin"], "preprocess.margin");
    }
    if (doc.contains("augment")) {
        const auto& a = doc["augment"];
        reject_unknown(a, "augment",
                       {"rotation", "flip_x", "flip_y", "shear", "scale",
                        "translate", "seed"});
        if (a.contains("rotation"))
            c.augment.rotation =
                range_from(a["rotation"], "augment.rotation", 0.0);
        if (a.contains("flip_x"))
            c.augment.flip_x = typed<bool>(a["flip_x"], "augment.flip_x");
        if (a.contains("flip_y"))
            c.augment.flip_y = typed<bool>(a["flip_y"], "augment.flip_y");
        if (a.contains("shear"))
            c.augment.shear = range_from(a["shear"], "augment.shear", 0.0);
        if (a.contains("scale"))
            c.augment.scale = range_from(a["scale"], "augment.scale", 1.0);
        if (a.contains("translate"))
            c.augment.translate =
                range_from(a["translate"], "augment.translate", 0.0);
        if (a.contains("seed"))
            c.augment.seed = typed<std::uint64_t>(a["seed"], "augment.seed");
    }
    if (doc.contains("models")) {
        const auto& m = doc["models"];
        reject_unknown(m, "models", {"cache_dir", "offline", "fine_tune"});
        if (m.contains("cache_dir"))
            c.models.cache_dir =
                typed<std::string>(m["cache_dir"], "models.cache_dir");
        if (m.contains("offline"))
            c.models.offline = typed<bool>(m["offline"], "models.offline");
        if (m.contains("fine_tune"))
            c.models.fine_tune =
                typed<std::string>(m["fine_tune"], "models.fine_tune");
    }
    if (doc.contains("train")) {
        const auto& t = doc["train"];
        reject_unknown(t, "train",
                       {"lr", "batch", "epochs", "optimizer", "momentum",
                        "weight_decay", "seed"});
        if (t.contains("lr")) c.train.lr = typed<double>(t["lr"], "train.lr");
        if (t.contains("batch"))
            c.train.batch = typed<int>(t["batch"], "train.batch");
        if (t.contains("epochs"))
            c.train.epochs = typed<int>(t["epochs"], "train.epochs");
        if (t.contains("optimizer"))
            c.train.optimizer =
                typed<std::string>(t["optimizer"], "train.optimizer");
        if (t.contains("momentum"))
            c.train.momentum = typed<double>(t["momentum"], "train.momentum");
        if (t.contains("weight_decay"))
            c.train.weight_decay =
                typed<double>(t["weight_decay"], "train.weight_decay");
        if (t.contains("seed"))
            c.train.seed = typed<std::uint64_t>(t["seed"], "train.seed");
    }
    if (doc.contains("synth")) {
        const auto& s = doc["synth"];
        reject_unknown(s, "synth", {"per_class", "size", "seed"});
        if (s.contains("per_class"))
            c.synth.per_class = typed<int>(s["per_class"], "synth.per_class");
        if (s.contains("size"))
            c.synth.size = typed<int>(s["size"], "synth.size");
        if (s.contains("seed"))
            c.synth.seed = typed<std::uint64_t>(s["seed"], "synth.seed");
    }
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path,
                                 RunConfig base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw ConfigError("config file is not valid json: " + path.string());
    return parse_run_config(doc, std::move(base));
}

/// The complete document with every default resolved; this is what gets
/// written alongside run outputs.
inline nlohmann::ordered_json effective_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["backbone"] = c.backbone;
    j["out"] = c.out;
    j["data"] = {{"root", c.data.root},
                 {"train_fraction", c.data.train_fraction},
                 {"k", c.data.k},
                 {"seed", c.data.seed}};
    j["preprocess"] = {{"margin", c.preprocess.margin}};
    j["augment"] = {{"rotation", detail::range_to(c.augment.rotation)},
                    {"flip_x", c.augment.flip_x},
                    {"flip_y", c.augment.flip_y},
                    {"shear", detail::range_to(c.augment.shear)},
                    {"scale", detail::range_to(c.augment.scale)},
                    {"translate", detail::range_to(c.augment.translate)},
                    {"seed", c.augment.seed}};
    j["models"] = {{"cache_dir", c.models.cache_dir},
                   {"offline", c.models.offline},
                   {"fine_tune", c.models.fine_tune}};
    j["train"] = {{"lr", c.train.lr},
                  {"batch", c.train.batch},
                  {"epochs", c.train.epochs},
                  {"optimizer", c.train.optimizer},
                  {"momentum", c.train.momentum},
                  {"weight_decay", c.train.weight_decay},
                  {"seed", c.train.seed}};
    j["synth"] = {{"per_class", c.synth.per_class},
                  {"size", c.synth.size},
                  {"seed", c.synth.seed}};
    return j;
}

inline void write_effective_config(const std::filesystem::path& path,
                                   const RunConfig& c) {
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write config: " + path.string());
    out << effective_json(c).dump(2) << "\n";
    if (!out) throw IoError("cannot write config: " + path.string());
}

/// One seed to rule every stage; used by the --seed flag.
inline void override_seed(RunConfig& c, std::uint64_t seed) {
    c.data.seed = seed;
    c.augment.seed = seed;
    c.train.seed = seed;
    c.synth.seed = seed;
}

// ---------------------------------------------------------------------------
// Conversions into the module-level types (each validates on construction)
// ---------------------------------------------------------------------------

inline AugmentationPolicy to_policy(const RunConfig& c) {
    AugmentationPolicy p;
    p.rotation_range_deg = c.augment.rotation;
    p.x_reflection = c.augment.flip_x;
    p.y_reflection = c.augment.flip_y;
    p.shear_range_deg = c.augment.shear;
    p.scale_range = c.augment.scale;
    p.translation_range_frac = c.augment.translate;
    p.validate();
    return p;
}

inline train::Hyperparams to_hyperparams(const RunConfig& c) {
    train::Hyperparams hp;
    hp.learning_rate = c.train.lr;
    hp.batch_size = c.train.batch;
    hp.epochs = c.train.epochs;
    hp.optimizer = train::optimizer_from_string(c.train.optimizer);
    hp.momentum = c.train.momentum;
    hp.weight_decay = c.train.weight_decay;
    hp.seed = c.train.seed;
    hp.validate();
    return hp;
}

inline PreprocessPolicy to_preprocess(const RunConfig& c) {
    PreprocessPolicy p;
    p.crop_margin_fraction = c.preprocess.margin;
    p.validate();
    return p;
}

inline SyntheticSpec to_synthetic(const RunConfig& c) {
    SyntheticSpec s;
    s.n_fertile = c.synth.per_class;
    s.n_infertile = c.synth.per_class;
    s.height = c.synth.size;
    s.width = c.synth.size;
    s.seed = c.synth.seed;
    s.validate();
    return s;
}

inline model::FineTunePolicy to_fine_tune(const RunConfig& c) {
    return model::FineTunePolicy::parse(c.models.fine_tune);
}

}  // namespace candling::config

#endif  // CANDLING_CONFIG_HPP
