// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_DATASET_HPP
#define CANDLING_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/image_io.hpp"
#include "candling/label.hpp"
#include "candling/rng.hpp"

namespace candling {

enum class Split { train, test };

inline std::string to_string(Split s) {
    return s == Split::train ? "train" : "test";
}

inline Split split_from_string(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw ConfigError("unknown split '" + std::string(s) + "'");
}

/// One labeled image. Pixels are loaded on demand, never stored here.
struct ImageSample {
    std::string id;
    std::string path;
    Label label = Label::infertile;

    Image load_pixels() const { return read_image(path); }
};

/**
 * @brief The dataset ledger: ordered samples plus split/fold assignments.
 *
 * Samples keep their ingest order (lexicographic by path). The split map
 * covers every id once assigned; the fold map exists only for train ids.
 */
struct DatasetManifest {
    std::vector<ImageSample> samples;
    std::map<std::string, Split> split;
    std::map<std::string, int> fold;
    std::uint64_t seed = 0;

    std::map<Label, std::int64_t> class_counts() const {
        std::map<Label, std::int64_t> counts{{Label::fertile, 0},
                                             {Label::infertile, 0}};
        for (const auto& s : samples) ++counts[s.label];
        return counts;
    }

    std::vector<std::string> ids_in_split(Split which) const {
        std::vector<std::string> out;
        for (const auto& s : samples) {
            auto it = split.find(s.id);
            if (it != split.end() && it->second == which) out.push_back(s.id);
        }
        return out;
    }
    std::vector<std::string> train_ids() const {
        return ids_in_split(Split::train);
    }
    std::vector<std::string> test_ids() const {
        return ids_in_split(Split::test);
    }

    const ImageSample& find(const std::string& id) const {
        for (const auto& s : samples)
            if (s.id == id) return s;
        throw ConfigError("id not in manifest: " + id);
    }

    /// Checks the structural invariants of a fully prepared manifest.
    void validate() const {
        std::set<std::string> seen;
        for (const auto& s : samples) {
            if (!seen.insert(s.id).second)
                throw ConfigError("duplicate id " + s.id);
            auto it = split.find(s.id);
            if (it == split.end())
                throw ConfigError("id without split assignment: " + s.id);
            const bool has_fold = fold.count(s.id) > 0;
            if ((it->second == Split::train) != has_fold)
                throw ConfigError("fold must exist iff train split: " + s.id);
        }
        for (const auto& [id, f] : fold) {
            (void)f;
            if (!seen.count(id)) throw ConfigError("fold for unknown id " + id);
        }
        for (const auto& [id, sp] : split) {
            (void)sp;
            if (!seen.count(id))
                throw ConfigError("split for unknown id " + id);
        }
    }
};

struct FoldPlan {
    int k = 0;
    std::map<std::string, int> assignments;
    bool stratified = true;
};

enum class LabelingScheme { by_subdirectory, by_manifest_file };

namespace detail {

inline bool has_image_extension(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

inline std::string strip_extension(const std::string& rel) {
    const auto dot = rel.find_last_of('.');
    const auto slash = rel.find_last_of('/');
    if (dot == std::string::npos ||
        (slash != std::string::npos && dot < slash))
        return rel;
    return rel.substr(0, dot);
}

}  // namespace detail

inline DatasetManifest read_manifest(const std::filesystem::path& file);

/**
 * @brief Scans a directory tree into a manifest.
 *
 * by_subdirectory derives each label from the first path component under
 * root ("fertile/..." or "infertile/..."); a decodability probe runs on
 * every file so bad inputs surface at ingest, not mid-training. Samples are
 * ordered lexicographically by relative path; ids are the relative path
 * minus extension. No split or fold is assigned.
 */
inline DatasetManifest ingest_directory(const std::filesystem::path& root,
                                        LabelingScheme labeling) {
    if (labeling == LabelingScheme::by_manifest_file) {
        const auto file = std::filesystem::is_directory(root)
                              ? root / "manifest.jsonl"
                              : root;
        DatasetManifest m = read_manifest(file);
        m.split.clear();
        m.fold.clear();
        if (m.samples.empty())
            throw NoSamplesError("manifest lists no samples: " + file.string());
        return m;
    }

    if (!std::filesystem::is_directory(root))
        throw IoError("data root is not a directory: " + root.string());

    std::vector<std::string> rel_paths;
    for (const auto& entry :
         std::filesystem::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        rel_paths.push_back(
            std::filesystem::relative(entry.path(), root).generic_string());
    }
    std::sort(rel_paths.begin(), rel_paths.end());

    DatasetManifest m;
    for (const auto& rel : rel_paths) {
        const auto full = root / rel;
        if (!detail::has_image_extension(full)) continue;
        const auto slash = rel.find('/');
        if (slash == std::string::npos)
            throw LabelError("file not under a class directory: " +
                             full.string());
        Label label;
        try {
            label = label_from_string(rel.substr(0, slash));
        } catch (const LabelError&) {
            throw LabelError("cannot derive class for " + full.string());
        }
        Image probe = read_image(full);  // throws DecodeError on bad files
        (void)probe;
        ImageSample s;
        s.id = detail::strip_extension(rel);
        s.path = full.generic_string();
        s.label = label;
        m.samples.push_back(std::move(s));
    }
    if (m.samples.empty())
        throw NoSamplesError("no labeled images under " + root.string());
    return m;
}

/**
 * @brief Assigns every sample to train or test.
 *
 * Stratified mode shuffles and cuts each class separately so class balance
 * survives within one sample per class; unstratified cuts one global
 * shuffle. Pure: returns a new manifest, same seed in gives the same map
 * out.
 */
inline DatasetManifest split_train_test(const DatasetManifest& manifest,
                                        double train_fraction,
                                        std::uint64_t seed,
                                        bool stratified = true) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw InvalidSplitError("train fraction must lie strictly in (0, 1)");
    if (manifest.samples.empty()) throw NoSamplesError("empty manifest");

    DatasetManifest out = manifest;
    out.seed = seed;
    out.split.clear();

    auto assign = [&](std::vector<std::string>& ids, std::uint64_t s) {
        Rng rng(s);
        rng.shuffle(ids);
        const auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(ids.size())));
        for (std::size_t i = 0; i < ids.size(); ++i)
            out.split[ids[i]] = i < n_train ? Split::train : Split::test;
    };

    if (stratified) {
        std::vector<std::string> fertile, infertile;
        for (const auto& s : manifest.samples)
            (s.label == Label::fertile ? fertile : infertile)
                .push_back(s.id);
        assign(fertile, derive_seed(seed, "split", 0));
        assign(infertile, derive_seed(seed, "split", 1));
    } else {
        std::vector<std::string> ids;
        for (const auto& s : manifest.samples) ids.push_back(s.id);
        assign(ids, derive_seed(seed, "split"));
    }

    std::size_t n_train = 0;
    for (const auto& [id, sp] : out.split) {
        (void)id;
        if (sp == Split::train) ++n_train;
    }
    if (n_train == 0 || n_train == out.split.size())
        throw InvalidSplitError("fraction leaves train or test empty");
    return out;
}

/**
 * @brief Partitions the train split into k folds.
 *
 * Stratified dealing walks the classes with one rolling round-robin cursor,
 * which bounds both the global fold-size spread and every per-class spread
 * by one.
 */
inline FoldPlan make_folds(const DatasetManifest& manifest, int k,
                           std::uint64_t seed, bool stratified = true) {
    const auto train = manifest.train_ids();
    if (train.empty())
        throw InvalidFoldCountError("train split not assigned yet");
    if (k < 2) throw InvalidFoldCountError("k must be at least 2");
    if (static_cast<std::size_t>(k) > train.size())
        throw InvalidFoldCountError("k exceeds train split size");

    FoldPlan plan;
    plan.k = k;
    plan.stratified = stratified;

    int cursor = 0;
    auto deal = [&](std::vector<std::string>& ids, std::uint64_t s) {
        Rng rng(s);
        rng.shuffle(ids);
        for (const auto& id : ids) {
            plan.assignments[id] = cursor % k;
            ++cursor;
        }
    };

    if (stratified) {
        std::vector<std::string> fertile, infertile;
        for (const auto& s : manifest.samples) {
            if (manifest.split.at(s.id) != Split::train) continue;
            (s.label == Label::fertile ? fertile : infertile)
                .push_back(s.id);
        }
        deal(fertile, derive_seed(seed, "fold", 0));
        deal(infertile, derive_seed(seed, "fold", 1));
    } else {
        auto ids = train;
        deal(ids, derive_seed(seed, "fold"));
    }
    return plan;
}

inline DatasetManifest apply_folds(const DatasetManifest& manifest,
                                   const FoldPlan& plan) {
    DatasetManifest out = manifest;
    out.fold.clear();
    for (const auto& id : manifest.train_ids()) {
        auto it = plan.assignments.find(id);
        if (it == plan.assignments.end())
            throw ConfigError("fold plan misses train id " + id);
        out.fold[id] = it->second;
    }
    return out;
}

/// Train ids outside fold `index` (the training set of that fold's run).
inline std::vector<std::string> fold_train_ids(const DatasetManifest& m,
                                               int index) {
    std::vector<std::string> out;
    for (const auto& id : m.train_ids())
        if (m.fold.at(id) != index) out.push_back(id);
    return out;
}

/// Train ids inside fold `index` (that run's validation set).
inline std::vector<std::string> fold_val_ids(const DatasetManifest& m,
                                             int index) {
    std::vector<std::string> out;
    for (const auto& id : m.train_ids())
        if (m.fold.at(id) == index) out.push_back(id);
    return out;
}

/// Writes one record per line: id, path, label, split, fold (fold only on
/// train rows). Key order is fixed, so equal manifests give equal bytes.
inline void write_manifest(const DatasetManifest& manifest,
                           const std::filesystem::path& file) {
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + file.string());
    for (const auto& s : manifest.samples) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        j["path"] = s.path;
        j["label"] = to_string(s.label);
        auto it = manifest.split.find(s.id);
        if (it != manifest.split.end()) j["split"] = to_string(it->second);
        auto fit = manifest.fold.find(s.id);
        if (fit != manifest.fold.end()) j["fold"] = fit->second;
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + file.string());
}

inline DatasetManifest read_manifest(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw MissingArtifactError("manifest not found: " + file.string());
    DatasetManifest m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("manifest line " + std::to_string(lineno) +
                              ": " + e.what());
        }
        ImageSample s;
        s.id = j.at("id").get<std::string>();
        s.path = j.at("path").get<std::string>();
        s.label = label_from_string(j.at("label").get<std::string>());
        m.samples.push_back(s);
        if (j.contains("split"))
            m.split[s.id] = split_from_string(j["split"].get<std::string>());
        if (j.contains("fold")) m.fold[s.id] = j["fold"].get<int>();
    }
    return m;
}

/// Resolves a manifest-recorded path: absolute and cwd-relative paths are
/// used as written; otherwise the manifest's directory anchors it.
inline std::filesystem::path resolve_sample_path(
    const std::filesystem::path& manifest_dir, const std::string& recorded) {
    std::filesystem::path p(recorded);
    if (p.is_absolute() || std::filesystem::exists(p)) return p;
    return manifest_dir / p;
}

}  // namespace candling

#endif  // CANDLING_DATASET_HPP
