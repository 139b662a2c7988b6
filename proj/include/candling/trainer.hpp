// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_TRAINER_HPP
#define CANDLING_TRAINER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/augment.hpp"
#include "candling/dataset.hpp"
#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/image_io.hpp"
#include "candling/model_zoo.hpp"
#include "candling/nn.hpp"
#include "candling/rng.hpp"

namespace candling::train {

/**
 * @brief Fold training, k-fold cross-validation, and grid tuning.
 *
 * One training loop owns its model exclusively. Every randomized choice —
 * shuffles, augmentation draws, dropout masks, per-fold model seeds — is
 * derived from the run seed, so identical inputs replay identical histories.
 */

enum class Optimizer { sgd_momentum, adam };

inline std::string to_string(Optimizer o) {
    return o == Optimizer::sgd_momentum ? "sgd_momentum" : "adam";
}

inline Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd_momentum") return Optimizer::sgd_momentum;
    if (s == "adam") return Optimizer::adam;
    throw ConfigError("unknown optimizer '" + s + "'");
}

struct Hyperparams {
    double learning_rate = 1e-4;
    int batch_size = 16;
    int epochs = 20;
    Optimizer optimizer = Optimizer::sgd_momentum;
    double momentum = 0.9;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
            throw ConfigError("learning_rate must be finite and >= 0");
        if (batch_size < 1) throw ConfigError("batch_size must be positive");
        if (epochs < 1) throw ConfigError("epochs must be positive");
        if (momentum < 0.0 || momentum >= 1.0)
            throw ConfigError("momentum must lie in [0, 1)");
        if (weight_decay < 0.0 || !std::isfinite(weight_decay))
            throw ConfigError("weight_decay must be finite and >= 0");
    }
};

struct EpochRecord {
    int epoch = 0;  // counted from 1
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainingRun {
    std::string backbone;
    int fold_index = -1;
    Hyperparams hyperparams;
    std::vector<EpochRecord> history;
    std::string final_model;  // checkpoint path when one was written
    double wall_time_s = 0.0;
    bool diverged = false;
    int last_good_epoch = 0;  // meaningful when diverged
    std::vector<std::string> val_ids;
    std::int64_t leak_checked_batches = 0;
};

struct CrossValReport {
    std::string backbone;
    int k = 0;
    std::vector<TrainingRun> runs;
    std::vector<double> fold_val_accuracies;  // NaN for diverged folds
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    bool any_diverged = false;
};

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Population standard deviation over the fold accuracies.
inline double std_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double mu = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

// ---------------------------------------------------------------------------
// Sample loading
// ---------------------------------------------------------------------------

struct LoadedSample {
    std::string id;
    Image image;
    Label label;
};

/// Loads the pixel data for the given manifest ids, resolving recorded
/// paths against the manifest's directory.
inline std::vector<LoadedSample> load_samples(
    const DatasetManifest& manifest, const std::filesystem::path& base_dir,
    const std::vector<std::string>& ids) {
    std::vector<LoadedSample> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const ImageSample& s = manifest.find(id);
        LoadedSample ls;
        ls.id = id;
        ls.label = s.label;
        ls.image = read_image(resolve_sample_path(base_dir, s.path));
        out.push_back(std::move(ls));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fold training
// ---------------------------------------------------------------------------

namespace detail {

using OptimizerState =
    std::variant<nn::SgdMomentum<float>, nn::Adam<float>>;

inline OptimizerState make_optimizer(const Hyperparams& hp) {
    if (hp.optimizer == Optimizer::sgd_momentum)
        return nn::SgdMomentum<float>(hp.learning_rate, hp.momentum,
                                      hp.weight_decay);
    return nn::Adam<float>(hp.learning_rate, 0.9, 0.999, 1e-8,
                           hp.weight_decay);
}

struct BatchStats {
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    std::int64_t total = 0;
    bool finite = true;
};

/// Forward + loss + accuracy bookkeeping shared by train and val passes.
template <typename Step>
inline BatchStats run_pass(model::ClassifierModel& m, nn::Workspace<float>& ws,
                           const std::vector<const LoadedSample*>& samples,
                           int batch_size, bool training, Step&& step) {
    BatchStats stats;
    const int side = m.spec.input_size;
    std::size_t done = 0;
    while (done < samples.size() && stats.finite) {
        const std::size_t take = std::min<std::size_t>(
            static_cast<std::size_t>(batch_size), samples.size() - done);
        std::vector<Image> images;
        std::vector<int> labels;
        images.reserve(take);
        labels.reserve(take);
        for (std::size_t i = 0; i < take; ++i) {
            const LoadedSample* s = samples[done + i];
            images.push_back(resize_bilinear(s->image, side, side));
            labels.push_back(model::class_index(s->label));
        }
        const Tensor<float> input = model::to_input_tensor(images, m.spec);
        const Tensor<float>& logits =
            nn::forward(m.graph, m.params, ws, input, training);
        auto res = nn::softmax_cross_entropy(logits, labels);
        if (!std::isfinite(res.loss)) {
            stats.finite = false;
            break;
        }
        stats.loss_sum += res.loss * static_cast<double>(take);
        for (std::size_t i = 0; i < take; ++i) {
            const float fertile_p = res.probs.data[2 * i];
            const int predicted = fertile_p >= 0.5f ? 0 : 1;
            if (predicted == labels[i]) ++stats.correct;
        }
        stats.total += static_cast<std::int64_t>(take);
        step(res.dlogits);
        done += take;
    }
    return stats;
}

struct FoldOutcome {
    TrainingRun run;
    bool diverged = false;
};

inline FoldOutcome train_fold_impl(
    model::ClassifierModel& m, const std::vector<std::string>& train_ids,
    const std::vector<std::string>& val_ids, const DatasetManifest& manifest,
    const std::filesystem::path& base_dir, const AugmentationPolicy& aug,
    const Hyperparams& hp, const std::filesystem::path& checkpoint_path) {
    hp.validate();
    aug.validate();
    if (train_ids.empty() || val_ids.empty())
        throw InvalidSplitError("training needs nonempty train and val sets");
    {
        const std::set<std::string> val_set(val_ids.begin(), val_ids.end());
        for (const auto& id : train_ids)
            if (val_set.count(id))
                throw InvalidSplitError("id '" + id +
                                        "' appears in both train and val");
    }

    const auto start = std::chrono::steady_clock::now();
    TrainingRun run;
    run.backbone = m.spec.name;
    run.hyperparams = hp;
    run.val_ids = val_ids;

    const auto train_samples = load_samples(manifest, base_dir, train_ids);
    const auto val_samples = load_samples(manifest, base_dir, val_ids);

    // Ids that must never reach a training batch: validation plus the
    // held-out test split.
    std::set<std::string> forbidden(val_ids.begin(), val_ids.end());
    for (const auto& id : manifest.test_ids()) forbidden.insert(id);

    std::vector<const LoadedSample*> val_ptrs;
    for (const auto& s : val_samples) val_ptrs.push_back(&s);

    nn::Workspace<float> ws;
    ws.dropout_rng = Rng(derive_seed(hp.seed, "dropout"));
    AugmentSampler sampler(aug, derive_seed(hp.seed, "augment"));
    OptimizerState optimizer = make_optimizer(hp);

    FoldOutcome outcome;
    const int side = m.spec.input_size;
    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
        std::vector<std::size_t> order(train_samples.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng shuffle_rng(derive_seed(hp.seed, "shuffle",
                                    static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        BatchStats train_stats;
        std::size_t done = 0;
        while (done < order.size() && train_stats.finite) {
            const std::size_t take = std::min<std::size_t>(
                static_cast<std::size_t>(hp.batch_size),
                order.size() - done);
            std::vector<Image> images;
            std::vector<int> labels;
            images.reserve(take);
            labels.reserve(take);
            for (std::size_t i = 0; i < take; ++i) {
                const LoadedSample& s = train_samples[order[done + i]];
                if (forbidden.count(s.id))
                    throw InvalidSplitError(
                        "leakage: id '" + s.id +
                        "' reached a training batch");
                const TransformInstance t =
                    sampler.next(s.image.height, s.image.width);
                const Image warped = apply(s.image, t, aug.fill_value);
                images.push_back(resize_bilinear(warped, side, side));
                labels.push_back(model::class_index(s.label));
            }
            ++run.leak_checked_batches;
            const Tensor<float> input =
                model::to_input_tensor(images, m.spec);
            const Tensor<float>& logits =
                nn::forward(m.graph, m.params, ws, input, true);
            auto res = nn::softmax_cross_entropy(logits, labels);
            if (!std::isfinite(res.loss)) {
                train_stats.finite = false;
                break;
            }
            train_stats.loss_sum += res.loss * static_cast<double>(take);
            for (std::size_t i = 0; i < take; ++i) {
                const float fertile_p = res.probs.data[2 * i];
                if ((fertile_p >= 0.5f ? 0 : 1) == labels[i])
                    ++train_stats.correct;
            }
            train_stats.total += static_cast<std::int64_t>(take);
            m.params.zero_grads();
            nn::backward(m.graph, m.params, ws, res.dlogits);
            std::visit([&](auto& opt) { opt.step(m.params); }, optimizer);
            done += take;
        }

        BatchStats val_stats;
        if (train_stats.finite) {
            val_stats = run_pass(m, ws, val_ptrs, hp.batch_size, false,
                                 [](const Tensor<float>&) {});
        }

        if (!train_stats.finite || !val_stats.finite) {
            outcome.diverged = true;
            run.diverged = true;
            run.last_good_epoch = epoch - 1;
            break;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss =
            train_stats.loss_sum / static_cast<double>(train_stats.total);
        rec.train_accuracy = static_cast<double>(train_stats.correct) /
                             static_cast<double>(train_stats.total);
        rec.val_loss =
            val_stats.loss_sum / static_cast<double>(val_stats.total);
        rec.val_accuracy = static_cast<double>(val_stats.correct) /
                           static_cast<double>(val_stats.total);
        run.history.push_back(rec);
        run.last_good_epoch = epoch;
    }

    if (!outcome.diverged && !checkpoint_path.empty()) {
        model::save_checkpoint(m, checkpoint_path);
        run.final_model = checkpoint_path.string();
    }
    run.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    outcome.run = std::move(run);
    return outcome;
}

}  // namespace detail

/**
 * @brief Fine-tunes the model on train_ids, validating each epoch on
 * val_ids. Augmentation touches training batches only; validation runs in
 * inference mode. Divergence (non-finite loss) raises TrainingDiverged
 * carrying the last completed epoch.
 */
inline TrainingRun train_fold(model::ClassifierModel& m,
                              const std::vector<std::string>& train_ids,
                              const std::vector<std::string>& val_ids,
                              const DatasetManifest& manifest,
                              const std::filesystem::path& base_dir,
                              const AugmentationPolicy& aug,
                              const Hyperparams& hp,
                              const std::filesystem::path& checkpoint_path =
                                  {}) {
    auto outcome = detail::train_fold_impl(m, train_ids, val_ids, manifest,
                                           base_dir, aug, hp,
                                           checkpoint_path);
    if (outcome.diverged)
        throw TrainingDivergedError(
            "loss became non-finite after epoch " +
                std::to_string(outcome.run.last_good_epoch),
            outcome.run.last_good_epoch);
    return outcome.run;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> plan_ids_for_fold(
    const DatasetManifest& manifest, const FoldPlan& plan, int fold,
    bool validation) {
    std::vector<std::string> out;
    for (const auto& s : manifest.samples) {
        const auto it = plan.assignments.find(s.id);
        if (it == plan.assignments.end()) continue;
        if ((it->second == fold) == validation) out.push_back(s.id);
    }
    return out;
}

}  // namespace detail

struct CrossValOptions {
    model::FineTunePolicy fine_tune = model::FineTunePolicy::full();
    model::BuildOptions build;
    std::filesystem::path run_dir;  // when set: fold<i>/ artifacts land here
};

/**
 * @brief Runs k-fold cross-validation: fold i validates on fold i's ids and
 * trains on the rest, with a fresh seed-derived model per fold. Diverged
 * folds are flagged and contribute NaN to the accuracy aggregate.
 */
inline CrossValReport run_cross_validation(const DatasetManifest& manifest,
                                           const std::filesystem::path&
                                               base_dir,
                                           const std::string& backbone_name,
                                           const FoldPlan& plan,
                                           const AugmentationPolicy& aug,
                                           const Hyperparams& hp,
                                           const CrossValOptions& opts = {}) {
    hp.validate();
    if (plan.k < 2) throw InvalidFoldCountError("cross-validation needs k >= 2");
    for (const auto& [id, fold] : plan.assignments)
        if (fold < 0 || fold >= plan.k)
            throw InvalidFoldCountError("fold index out of range for '" + id +
                                        "'");

    CrossValReport report;
    report.backbone = backbone_name;
    report.k = plan.k;

    for (int fold = 0; fold < plan.k; ++fold) {
        const auto val_ids =
            detail::plan_ids_for_fold(manifest, plan, fold, true);
        const auto train_ids =
            detail::plan_ids_for_fold(manifest, plan, fold, false);

        Hyperparams fold_hp = hp;
        fold_hp.seed = derive_seed(hp.seed, "fold",
                                   static_cast<std::uint64_t>(fold));
        const std::uint64_t model_seed =
            derive_seed(hp.seed, "model", static_cast<std::uint64_t>(fold));

        model::ClassifierModel m =
            backbone_name == model::kReferenceCnn
                ? model::build_reference_cnn(
                      model::backbone_spec(model::kReferenceCnn).input_size,
                      model_seed)
                : model::build_classifier(backbone_name, opts.fine_tune,
                                          model_seed, opts.build);

        std::filesystem::path checkpoint;
        if (!opts.run_dir.empty())
            checkpoint = opts.run_dir /
                         ("fold" + std::to_string(fold)) / "model.ckpt";

        auto outcome = detail::train_fold_impl(m, train_ids, val_ids,
                                               manifest, base_dir, aug,
                                               fold_hp, checkpoint);
        outcome.run.fold_index = fold;
        if (outcome.diverged) {
            report.any_diverged = true;
            report.fold_val_accuracies.push_back(
                std::numeric_limits<double>::quiet_NaN());
        } else {
            report.fold_val_accuracies.push_back(
                outcome.run.history.back().val_accuracy);
        }
        report.runs.push_back(std::move(outcome.run));
    }

    report.mean_accuracy = mean_of(report.fold_val_accuracies);
    report.std_accuracy = std_of(report.fold_val_accuracies);
    return report;
}

// ---------------------------------------------------------------------------
// Hyperparameter tuning
// ---------------------------------------------------------------------------

struct TuneEntry {
    Hyperparams hyperparams;
    double mean_accuracy = 0.0;
};

struct TuneResult {
    Hyperparams best;
    std::vector<TuneEntry> table;
};

/**
 * @brief Evaluates each grid point by cross-validation mean accuracy and
 * returns the argmax. Ties break toward lower learning rate, then smaller
 * batch, then earlier grid position. NaN means (diverged folds) never win.
 */
inline TuneResult tune_hyperparameters(const DatasetManifest& manifest,
                                       const std::filesystem::path& base_dir,
                                       const std::string& backbone_name,
                                       const std::vector<Hyperparams>& grid,
                                       const FoldPlan& plan,
                                       const AugmentationPolicy& aug,
                                       const CrossValOptions& opts = {}) {
    if (grid.empty()) throw EmptyGridError("tuning grid is empty");
    TuneResult result;
    std::size_t best_idx = 0;
    auto score_of = [](double mean) {
        return std::isnan(mean) ? -1.0 : mean;
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto report = run_cross_validation(manifest, base_dir,
                                                 backbone_name, plan, aug,
                                                 grid[i], opts);
        result.table.push_back({grid[i], report.mean_accuracy});
        if (i == 0) continue;
        const double cur = score_of(report.mean_accuracy);
        const double best = score_of(result.table[best_idx].mean_accuracy);
        const auto& cur_hp = grid[i];
        const auto& best_hp = grid[best_idx];
        const bool wins =
            cur > best ||
            (cur == best &&
             (cur_hp.learning_rate < best_hp.learning_rate ||
              (cur_hp.learning_rate == best_hp.learning_rate &&
               cur_hp.batch_size < best_hp.batch_size)));
        if (wins) best_idx = i;
    }
    result.best = grid[best_idx];
    return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double number_from(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json hyperparams_to_json(const Hyperparams& hp) {
    nlohmann::ordered_json j;
    j["learning_rate"] = hp.learning_rate;
    j["batch_size"] = hp.batch_size;
    j["epochs"] = hp.epochs;
    j["optimizer"] = to_string(hp.optimizer);
    j["momentum"] = hp.momentum;
    j["weight_decay"] = hp.weight_decay;
    j["seed"] = hp.seed;
    return j;
}

inline Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    Hyperparams hp;
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.batch_size = j.at("batch_size").get<int>();
    hp.epochs = j.at("epochs").get<int>();
    hp.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    hp.momentum = j.value("momentum", 0.9);
    hp.weight_decay = j.value("weight_decay", 0.0);
    hp.seed = j.value("seed", std::uint64_t{0});
    return hp;
}

inline nlohmann::ordered_json epoch_to_json(const EpochRecord& r) {
    nlohmann::ordered_json j;
    j["epoch"] = r.epoch;
    j["train_loss"] = r.train_loss;
    j["train_accuracy"] = r.train_accuracy;
    j["val_loss"] = r.val_loss;
    j["val_accuracy"] = r.val_accuracy;
    return j;
}

inline EpochRecord epoch_from_json(const nlohmann::json& j) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.train_loss = j.at("train_loss").get<double>();
    r.train_accuracy = j.at("train_accuracy").get<double>();
    r.val_loss = j.at("val_loss").get<double>();
    r.val_accuracy = j.at("val_accuracy").get<double>();
    return r;
}

inline void write_history_jsonl(const std::filesystem::path& path,
                                const std::vector<EpochRecord>& history) {
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write history: " + path.string());
    for (const auto& rec : history) out << epoch_to_json(rec).dump() << "\n";
    if (!out) throw IoError("cannot write history: " + path.string());
}

inline std::vector<EpochRecord> read_history_jsonl(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("history not found: " +
                                        path.string());
    std::vector<EpochRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DecodeError("bad history line in " + path.string());
        out.push_back(epoch_from_json(j));
    }
    return out;
}

inline nlohmann::ordered_json run_to_json(const TrainingRun& run) {
    nlohmann::ordered_json j;
    j["backbone"] = run.backbone;
    j["fold_index"] = run.fold_index;
    j["hyperparams"] = hyperparams_to_json(run.hyperparams);
    auto& hist = j["history"] = nlohmann::ordered_json::array();
    for (const auto& rec : run.history) hist.push_back(epoch_to_json(rec));
    j["final_model"] = run.final_model;
    j["wall_time_s"] = run.wall_time_s;
    j["diverged"] = run.diverged;
    j["last_good_epoch"] = run.last_good_epoch;
    j["leak_checked_batches"] = run.leak_checked_batches;
    j["val_ids"] = run.val_ids;
    return j;
}

inline TrainingRun run_from_json(const nlohmann::json& j) {
    TrainingRun run;
    run.backbone = j.at("backbone").get<std::string>();
    run.fold_index = j.at("fold_index").get<int>();
    run.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    for (const auto& rec : j.at("history"))
        run.history.push_back(epoch_from_json(rec));
    run.final_model = j.value("final_model", std::string());
    run.wall_time_s = j.value("wall_time_s", 0.0);
    run.diverged = j.value("diverged", false);
    run.last_good_epoch = j.value("last_good_epoch", 0);
    run.leak_checked_batches =
        j.value("leak_checked_batches", std::int64_t{0});
    if (j.contains("val_ids"))
        run.val_ids = j.at("val_ids").get<std::vector<std::string>>();
    return run;
}

inline nlohmann::ordered_json crossval_to_json(const CrossValReport& r) {
    nlohmann::ordered_json j;
    j["backbone"] = r.backbone;
    j["k"] = r.k;
    auto& runs = j["runs"] = nlohmann::ordered_json::array();
    for (const auto& run : r.runs) runs.push_back(run_to_json(run));
    auto& accs = j["fold_val_accuracies"] = nlohmann::ordered_json::array();
    for (double a : r.fold_val_accuracies)
        accs.push_back(detail::number_or_null(a));
    j["mean_accuracy"] = detail::number_or_null(r.mean_accuracy);
    j["std_accuracy"] = detail::number_or_null(r.std_accuracy);
    j["any_diverged"] = r.any_diverged;
    return j;
}

inline CrossValReport crossval_from_json(const nlohmann::json& j) {
    CrossValReport r;
    r.backbone = j.at("backbone").get<std::string>();
    r.k = j.at("k").get<int>();
    for (const auto& run : j.at("runs")) r.runs.push_back(run_from_json(run));
    for (const auto& a : j.at("fold_val_accuracies"))
        r.fold_val_accuracies.push_back(detail::number_from(a));
    r.mean_accuracy = detail::number_from(j.at("mean_accuracy"));
    r.std_accuracy = detail::number_from(j.at("std_accuracy"));
    r.any_diverged = j.value("any_diverged", false);
    return r;
}

inline void write_crossval_json(const std::filesystem::path& path,
                                const CrossValReport& report) {
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << crossval_to_json(report).dump(2) << "\n";
    if (!out) throw IoError("cannot write report: " + path.string());
}

inline CrossValReport read_crossval_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("report not found: " + path.string());
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw DecodeError("bad report json: " + path.string());
    return crossval_from_json(j);
}

}  // namespace candling::train

#endif  // CANDLING_TRAINER_HPP
