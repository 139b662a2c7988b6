// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "candling/trainer.hpp"
#include "support/test_util.hpp"

using candling::AugmentationPolicy;
using candling::ConfigError;
using candling::DatasetManifest;
using candling::EmptyGridError;
using candling::FoldPlan;
using candling::Image;
using candling::ImageSample;
using candling::InvalidSplitError;
using candling::Label;
using candling::Rng;
using candling::Split;
using candling::TrainingDivergedError;
using candling::testing::TempDir;
namespace tr = candling::train;
namespace model = candling::model;

namespace {

struct ToyData {
    DatasetManifest manifest;
    std::filesystem::path base;
    std::vector<std::string> train_ids;
};

// Brightness-separable corpus: fertile images sit near level 190, infertile
// near 60, both with mild pixel noise, so a small net converges in a couple
// of epochs. Returns ids in manifest order (fertile block, then infertile).
ToyData make_toy(const TempDir& tmp, int per_class, int side,
                 int test_per_class = 0) {
    ToyData d;
    d.base = tmp.path();
    std::filesystem::create_directories(d.base / "img");
    Rng rng(123);
    auto add = [&](const std::string& id, Label label, int level,
                   Split split) {
        Image img(side, side, 3);
        for (auto& px : img.data) {
            const int v =
                level + static_cast<int>(rng.uniform_int(-20, 20));
            px = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
        const std::string rel = "img/" + id + ".png";
        candling::write_image(d.base / rel, img);
        d.manifest.samples.push_back({id, rel, label});
        d.manifest.split[id] = split;
        if (split == Split::train) d.train_ids.push_back(id);
    };
    for (int i = 0; i < per_class; ++i)
        add("f" + std::to_string(i), Label::fertile, 190, Split::train);
    for (int i = 0; i < per_class; ++i)
        add("i" + std::to_string(i), Label::infertile, 60, Split::train);
    for (int i = 0; i < test_per_class; ++i)
        add("tf" + std::to_string(i), Label::fertile, 190, Split::test);
    for (int i = 0; i < test_per_class; ++i)
        add("ti" + std::to_string(i), Label::infertile, 60, Split::test);
    return d;
}

// Alternates manifest-ordered train ids across k folds.
FoldPlan round_robin_plan(const std::vector<std::string>& ids, int k) {
    FoldPlan plan;
    plan.k = k;
    for (std::size_t i = 0; i < ids.size(); ++i)
        plan.assignments[ids[i]] = static_cast<int>(i % k);
    return plan;
}

tr::Hyperparams quick_hp(double lr, int batch, int epochs,
                         std::uint64_t seed = 11) {
    tr::Hyperparams hp;
    hp.learning_rate = lr;
    hp.batch_size = batch;
    hp.epochs = epochs;
    hp.optimizer = tr::Optimizer::adam;
    hp.seed = seed;
    return hp;
}

// Splits ids into a leading train portion and trailing val portion per class
// block, keeping both classes present on each side.
void head_tail_split(const std::vector<std::string>& ids,
                     std::vector<std::string>& train,
                     std::vector<std::string>& val, int val_per_class) {
    const std::size_t half = ids.size() / 2;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const bool in_val =
            (i + static_cast<std::size_t>(val_per_class) >= half &&
             i < half) ||
            i + static_cast<std::size_t>(val_per_class) >= ids.size();
        (in_val ? val : train).push_back(ids[i]);
    }
}

}  // namespace

TEST_CASE("hyperparameter validation rejects out-of-range values") {
    tr::Hyperparams hp;
    REQUIRE_NOTHROW(hp.validate());

    auto broken = hp;
    broken.learning_rate = -1e-3;
    REQUIRE_THROWS_AS(broken.validate(), ConfigError);
    broken = hp;
    broken.batch_size = 0;
    REQUIRE_THROWS_AS(broken.validate(), ConfigError);
    broken = hp;
    broken.epochs = 0;
    REQUIRE_THROWS_AS(broken.validate(), ConfigError);
    broken = hp;
    broken.momentum = 1.0;
    REQUIRE_THROWS_AS(broken.validate(), ConfigError);
    broken = hp;
    broken.weight_decay = -0.5;
    REQUIRE_THROWS_AS(broken.validate(), ConfigError);

    REQUIRE(tr::to_string(tr::Optimizer::sgd_momentum) == "sgd_momentum");
    REQUIRE(tr::optimizer_from_string("adam") == tr::Optimizer::adam);
    REQUIRE_THROWS_AS(tr::optimizer_from_string("rmsprop"), ConfigError);
}

TEST_CASE("train_fold produces one record per epoch with sane metrics") {
    TempDir tmp("trainer_epochs");
    auto toy = make_toy(tmp, 6, 24);
    std::vector<std::string> train_ids, val_ids;
    head_tail_split(toy.train_ids, train_ids, val_ids, 2);

    auto m = model::build_reference_cnn(16, 5);
    const auto hp = quick_hp(1e-3, 4, 3);
    const auto run = tr::train_fold(m, train_ids, val_ids, toy.manifest,
                                    toy.base, AugmentationPolicy{}, hp);

    REQUIRE(run.backbone == "reference_cnn");
    REQUIRE(run.history.size() == 3);
    for (std::size_t i = 0; i < run.history.size(); ++i) {
        const auto& rec = run.history[i];
        REQUIRE(rec.epoch == static_cast<int>(i) + 1);
        REQUIRE(std::isfinite(rec.train_loss));
        REQUIRE(rec.train_loss >= 0.0);
        REQUIRE(std::isfinite(rec.val_loss));
        REQUIRE(rec.train_accuracy >= 0.0);
        REQUIRE(rec.train_accuracy <= 1.0);
        REQUIRE(rec.val_accuracy >= 0.0);
        REQUIRE(rec.val_accuracy <= 1.0);
    }
    REQUIRE_FALSE(run.diverged);
    REQUIRE(run.val_ids == val_ids);
    // 8 train samples in batches of 4 over 3 epochs.
    REQUIRE(run.leak_checked_batches == 6);
    REQUIRE(run.wall_time_s > 0.0);
    REQUIRE(run.final_model.empty());
}

TEST_CASE("zero learning rate leaves every parameter bit-identical") {
    TempDir tmp("trainer_lr0");
    auto toy = make_toy(tmp, 4, 24);
    std::vector<std::string> train_ids, val_ids;
    head_tail_split(toy.train_ids, train_ids, val_ids, 1);

    auto m = model::build_reference_cnn(16, 9);
    const auto before = m.params.value;

    tr::Hyperparams hp;
    hp.learning_rate = 0.0;
    hp.optimizer = tr::Optimizer::sgd_momentum;
    hp.batch_size = 3;
    hp.epochs = 2;
    hp.seed = 21;
    const auto run = tr::train_fold(m, train_ids, val_ids, toy.manifest,
                                    toy.base, AugmentationPolicy::identity(),
                                    hp);

    REQUIRE(m.params.value.size() == before.size());
    for (std::size_t i = 0; i < before.size(); ++i)
        REQUIRE(m.params.value[i].data == before[i].data);
    // Frozen weights and a fixed validation set: val metrics cannot move.
    REQUIRE(run.history[0].val_loss == run.history[1].val_loss);
    REQUIRE(run.history[0].val_accuracy == run.history[1].val_accuracy);
}

TEST_CASE("degenerate or overlapping splits are rejected") {
    TempDir tmp("trainer_splits");
    auto toy = make_toy(tmp, 2, 24);
    auto m = model::build_reference_cnn(16, 5);
    const auto hp = quick_hp(1e-3, 2, 1);

    REQUIRE_THROWS_AS(tr::train_fold(m, {}, {"f0"}, toy.manifest, toy.base,
                                     AugmentationPolicy::identity(), hp),
                      InvalidSplitError);
    REQUIRE_THROWS_AS(tr::train_fold(m, {"f0"}, {}, toy.manifest, toy.base,
                                     AugmentationPolicy::identity(), hp),
                      InvalidSplitError);
    REQUIRE_THROWS_AS(tr::train_fold(m, {"f0", "i0"}, {"i0"}, toy.manifest,
                                     toy.base,
                                     AugmentationPolicy::identity(), hp),
                      InvalidSplitError);
}

TEST_CASE("held-out test ids are blocked from training batches") {
    TempDir tmp("trainer_leak");
    auto toy = make_toy(tmp, 3, 24, /*test_per_class=*/1);
    auto m = model::build_reference_cnn(16, 5);
    const auto hp = quick_hp(1e-3, 2, 1);

    // Clean invocation: guard runs on every batch and stays silent.
    std::vector<std::string> train_ids{"f0", "f1", "i0", "i1"};
    std::vector<std::string> val_ids{"f2", "i2"};
    const auto run = tr::train_fold(m, train_ids, val_ids, toy.manifest,
                                    toy.base, AugmentationPolicy::identity(),
                                    hp);
    REQUIRE(run.leak_checked_batches == 2);

    // A test-split id smuggled into the train list trips the batch guard.
    auto m2 = model::build_reference_cnn(16, 5);
    std::vector<std::string> tainted{"f0", "f1", "i0", "tf0"};
    REQUIRE_THROWS_AS(tr::train_fold(m2, tainted, val_ids, toy.manifest,
                                     toy.base,
                                     AugmentationPolicy::identity(), hp),
                      InvalidSplitError);
}

TEST_CASE("identical inputs replay an identical training history") {
    TempDir tmp("trainer_repro");
    auto toy = make_toy(tmp, 4, 24);
    std::vector<std::string> train_ids, val_ids;
    head_tail_split(toy.train_ids, train_ids, val_ids, 1);
    const auto hp = quick_hp(2e-3, 3, 3, 77);

    auto m1 = model::build_reference_cnn(16, 31);
    auto m2 = model::build_reference_cnn(16, 31);
    const auto r1 = tr::train_fold(m1, train_ids, val_ids, toy.manifest,
                                   toy.base, AugmentationPolicy{}, hp);
    const auto r2 = tr::train_fold(m2, train_ids, val_ids, toy.manifest,
                                   toy.base, AugmentationPolicy{}, hp);

    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i) {
        REQUIRE(r1.history[i].train_loss == r2.history[i].train_loss);
        REQUIRE(r1.history[i].train_accuracy ==
                r2.history[i].train_accuracy);
        REQUIRE(r1.history[i].val_loss == r2.history[i].val_loss);
        REQUIRE(r1.history[i].val_accuracy == r2.history[i].val_accuracy);
    }
    for (std::size_t i = 0; i < m1.params.value.size(); ++i)
        REQUIRE(m1.params.value[i].data == m2.params.value[i].data);
}

TEST_CASE("exploding loss raises TrainingDiverged with the last good epoch") {
    TempDir tmp("trainer_diverge");
    auto toy = make_toy(tmp, 3, 24);
    std::vector<std::string> train_ids, val_ids;
    head_tail_split(toy.train_ids, train_ids, val_ids, 1);

    tr::Hyperparams hp;
    hp.learning_rate = 1e25;
    hp.optimizer = tr::Optimizer::sgd_momentum;
    hp.batch_size = static_cast<int>(train_ids.size());
    hp.epochs = 3;
    hp.seed = 3;

    auto m = model::build_reference_cnn(16, 5);
    bool thrown = false;
    try {
        tr::train_fold(m, train_ids, val_ids, toy.manifest, toy.base,
                       AugmentationPolicy::identity(), hp);
    } catch (const TrainingDivergedError& e) {
        thrown = true;
        REQUIRE(e.last_good_epoch == 0);
        REQUIRE(std::string(e.what()).find("epoch 0") != std::string::npos);
    }
    REQUIRE(thrown);
}

TEST_CASE("cross-validation rotates validation folds in order") {
    TempDir tmp("trainer_cv");
    auto toy = make_toy(tmp, 6, 24);
    const auto plan = round_robin_plan(toy.train_ids, 3);
    const auto hp = quick_hp(1e-3, 4, 1);

    const auto report = tr::run_cross_validation(
        toy.manifest, toy.base, model::kReferenceCnn, plan,
        AugmentationPolicy::identity(), hp);

    REQUIRE(report.backbone == model::kReferenceCnn);
    REQUIRE(report.k == 3);
    REQUIRE(report.runs.size() == 3);
    REQUIRE(report.fold_val_accuracies.size() == 3);
    REQUIRE_FALSE(report.any_diverged);

    std::set<std::string> seen;
    for (int fold = 0; fold < 3; ++fold) {
        const auto& run = report.runs[fold];
        REQUIRE(run.fold_index == fold);
        // Fold i validates exactly the ids the plan assigns to fold i.
        std::vector<std::string> expected;
        for (const auto& s : toy.manifest.samples)
            if (plan.assignments.at(s.id) == fold) expected.push_back(s.id);
        REQUIRE(run.val_ids == expected);
        for (const auto& id : run.val_ids) REQUIRE(seen.insert(id).second);
        REQUIRE(report.fold_val_accuracies[fold] ==
                run.history.back().val_accuracy);
    }
    REQUIRE(seen.size() == toy.train_ids.size());

    REQUIRE(report.mean_accuracy == tr::mean_of(report.fold_val_accuracies));
    REQUIRE(report.std_accuracy == tr::std_of(report.fold_val_accuracies));
}

TEST_CASE("diverged folds are flagged and poison the aggregate honestly") {
    TempDir tmp("trainer_cv_diverge");
    auto toy = make_toy(tmp, 4, 24);
    const auto plan = round_robin_plan(toy.train_ids, 2);

    tr::Hyperparams hp;
    hp.learning_rate = 1e25;
    hp.optimizer = tr::Optimizer::sgd_momentum;
    hp.batch_size = 8;
    hp.epochs = 2;
    hp.seed = 3;

    const auto report = tr::run_cross_validation(
        toy.manifest, toy.base, model::kReferenceCnn, plan,
        AugmentationPolicy::identity(), hp);

    REQUIRE(report.any_diverged);
    REQUIRE(report.runs.size() == 2);
    for (const auto& run : report.runs) REQUIRE(run.diverged);
    for (double acc : report.fold_val_accuracies) REQUIRE(std::isnan(acc));
    REQUIRE(std::isnan(report.mean_accuracy));
    REQUIRE(std::isnan(report.std_accuracy));
}

TEST_CASE("fold accuracy aggregation matches hand-computed values") {
    const std::vector<double> accs{0.98, 0.98, 0.98, 0.985, 0.9765};
    REQUIRE_THAT(tr::mean_of(accs),
                 Catch::Matchers::WithinAbs(0.9803, 1e-12));

    const std::vector<double> flat{0.5, 0.5, 0.5};
    REQUIRE(tr::std_of(flat) == 0.0);

    const std::vector<double> pair{0.9, 1.0};
    REQUIRE_THAT(tr::std_of(pair), Catch::Matchers::WithinAbs(0.05, 1e-15));

    REQUIRE(std::isnan(tr::mean_of({})));
    REQUIRE(std::isnan(tr::std_of({})));
}

TEST_CASE("cross-validation replays bit-identically") {
    TempDir tmp("trainer_cv_repro");
    auto toy = make_toy(tmp, 4, 24);
    const auto plan = round_robin_plan(toy.train_ids, 2);
    const auto hp = quick_hp(1e-3, 4, 2, 19);

    const auto a = tr::run_cross_validation(toy.manifest, toy.base,
                                            model::kReferenceCnn, plan,
                                            AugmentationPolicy{}, hp);
    const auto b = tr::run_cross_validation(toy.manifest, toy.base,
                                            model::kReferenceCnn, plan,
                                            AugmentationPolicy{}, hp);

    REQUIRE(a.mean_accuracy == b.mean_accuracy);
    REQUIRE(a.std_accuracy == b.std_accuracy);
    REQUIRE(a.fold_val_accuracies == b.fold_val_accuracies);
    for (std::size_t f = 0; f < a.runs.size(); ++f) {
        REQUIRE(a.runs[f].history.size() == b.runs[f].history.size());
        for (std::size_t e = 0; e < a.runs[f].history.size(); ++e) {
            REQUIRE(a.runs[f].history[e].train_loss ==
                    b.runs[f].history[e].train_loss);
            REQUIRE(a.runs[f].history[e].val_accuracy ==
                    b.runs[f].history[e].val_accuracy);
        }
    }
}

TEST_CASE("tuning scores the grid and breaks ties toward the smaller knob") {
    TempDir tmp("trainer_tune");
    auto toy = make_toy(tmp, 4, 24);
    const auto plan = round_robin_plan(toy.train_ids, 2);

    REQUIRE_THROWS_AS(
        tr::tune_hyperparameters(toy.manifest, toy.base,
                                 model::kReferenceCnn, {}, plan,
                                 AugmentationPolicy::identity()),
        EmptyGridError);

    SECTION("singleton grid returns its only entry") {
        const auto only = quick_hp(1e-3, 4, 1);
        const auto res = tr::tune_hyperparameters(
            toy.manifest, toy.base, model::kReferenceCnn, {only}, plan,
            AugmentationPolicy::identity());
        REQUIRE(res.table.size() == 1);
        REQUIRE(res.best.learning_rate == only.learning_rate);
        REQUIRE(res.best.batch_size == only.batch_size);
    }

    SECTION("equal scores fall back to the smaller batch size") {
        // Zero learning rate on both entries pins identical accuracies.
        tr::Hyperparams a = quick_hp(0.0, 8, 1);
        a.optimizer = tr::Optimizer::sgd_momentum;
        tr::Hyperparams b = a;
        b.batch_size = 4;
        const auto res = tr::tune_hyperparameters(
            toy.manifest, toy.base, model::kReferenceCnn, {a, b}, plan,
            AugmentationPolicy::identity());
        REQUIRE(res.table.size() == 2);
        REQUIRE(res.table[0].mean_accuracy == res.table[1].mean_accuracy);
        REQUIRE(res.best.batch_size == 4);
    }

    SECTION("a converging entry beats a frozen baseline") {
        tr::Hyperparams frozen = quick_hp(0.0, 4, 2);
        frozen.optimizer = tr::Optimizer::sgd_momentum;
        const auto learning = quick_hp(1e-2, 4, 2);
        const auto res = tr::tune_hyperparameters(
            toy.manifest, toy.base, model::kReferenceCnn,
            {frozen, learning}, plan, AugmentationPolicy::identity());
        REQUIRE(res.table[1].mean_accuracy > res.table[0].mean_accuracy);
        REQUIRE(res.best.learning_rate == 1e-2);
    }

    SECTION("diverged grid points never win") {
        tr::Hyperparams nan_entry = quick_hp(1e25, 8, 1);
        nan_entry.optimizer = tr::Optimizer::sgd_momentum;
        tr::Hyperparams safe = quick_hp(0.0, 8, 1);
        safe.optimizer = tr::Optimizer::sgd_momentum;
        const auto res = tr::tune_hyperparameters(
            toy.manifest, toy.base, model::kReferenceCnn,
            {nan_entry, safe}, plan, AugmentationPolicy::identity());
        REQUIRE(std::isnan(res.table[0].mean_accuracy));
        REQUIRE(res.best.learning_rate == 0.0);
    }
}

TEST_CASE("ties on equal accuracy prefer the lower learning rate") {
    TempDir tmp("trainer_tune_lr");
    // Strongly separated classes: both candidate rates reach a perfect
    // validation score, forcing the tie-break on the learning rate itself.
    auto toy = make_toy(tmp, 6, 24);
    const auto plan = round_robin_plan(toy.train_ids, 2);
    const auto fast = quick_hp(1e-2, 4, 4);
    const auto slow = quick_hp(5e-3, 4, 4);
    const auto res = tr::tune_hyperparameters(
        toy.manifest, toy.base, model::kReferenceCnn, {fast, slow}, plan,
        AugmentationPolicy::identity());
    REQUIRE(res.table[0].mean_accuracy == 1.0);
    REQUIRE(res.table[1].mean_accuracy == 1.0);
    REQUIRE(res.best.learning_rate == 5e-3);
}

TEST_CASE("training run artifacts round-trip through json") {
    TempDir tmp("trainer_json");
    auto toy = make_toy(tmp, 4, 24);
    const auto plan = round_robin_plan(toy.train_ids, 2);
    auto hp = quick_hp(1e-3, 4, 2, 23);
    hp.optimizer = tr::Optimizer::sgd_momentum;
    hp.momentum = 0.8;
    hp.weight_decay = 1e-4;

    tr::CrossValOptions opts;
    opts.run_dir = tmp.path() / "runs";
    const auto report = tr::run_cross_validation(
        toy.manifest, toy.base, model::kReferenceCnn, plan,
        AugmentationPolicy::identity(), hp, opts);

    // Per-fold checkpoints were written and recorded.
    for (const auto& run : report.runs) {
        REQUIRE_FALSE(run.final_model.empty());
        REQUIRE(std::filesystem::exists(run.final_model));
        const auto restored = model::load_checkpoint(run.final_model);
        REQUIRE(restored.spec.name == model::kReferenceCnn);
    }

    const auto j = tr::crossval_to_json(report);
    const auto back = tr::crossval_from_json(j);
    REQUIRE(back.backbone == report.backbone);
    REQUIRE(back.k == report.k);
    REQUIRE(back.mean_accuracy == report.mean_accuracy);
    REQUIRE(back.std_accuracy == report.std_accuracy);
    REQUIRE(back.fold_val_accuracies == report.fold_val_accuracies);
    REQUIRE(back.runs.size() == report.runs.size());
    for (std::size_t f = 0; f < report.runs.size(); ++f) {
        const auto& orig = report.runs[f];
        const auto& rest = back.runs[f];
        REQUIRE(rest.backbone == orig.backbone);
        REQUIRE(rest.fold_index == orig.fold_index);
        REQUIRE(rest.hyperparams.learning_rate ==
                orig.hyperparams.learning_rate);
        REQUIRE(rest.hyperparams.optimizer == orig.hyperparams.optimizer);
        REQUIRE(rest.hyperparams.momentum == orig.hyperparams.momentum);
        REQUIRE(rest.hyperparams.seed == orig.hyperparams.seed);
        REQUIRE(rest.final_model == orig.final_model);
        REQUIRE(rest.val_ids == orig.val_ids);
        REQUIRE(orig.leak_checked_batches > 0);
        REQUIRE(rest.leak_checked_batches == orig.leak_checked_batches);
        REQUIRE(rest.history.size() == orig.history.size());
        for (std::size_t e = 0; e < orig.history.size(); ++e) {
            REQUIRE(rest.history[e].epoch == orig.history[e].epoch);
            REQUIRE(rest.history[e].train_loss ==
                    orig.history[e].train_loss);
            REQUIRE(rest.history[e].val_accuracy ==
                    orig.history[e].val_accuracy);
        }
    }

    // File-level round trips.
    const auto report_path = tmp.path() / "runs" / "crossval.json";
    tr::write_crossval_json(report_path, report);
    const auto from_disk = tr::read_crossval_json(report_path);
    REQUIRE(from_disk.mean_accuracy == report.mean_accuracy);
    REQUIRE(from_disk.runs.size() == report.runs.size());

    const auto hist_path = tmp.path() / "runs" / "fold0" / "history.jsonl";
    tr::write_history_jsonl(hist_path, report.runs[0].history);
    const auto hist = tr::read_history_jsonl(hist_path);
    REQUIRE(hist.size() == report.runs[0].history.size());
    for (std::size_t e = 0; e < hist.size(); ++e) {
        REQUIRE(hist[e].epoch == report.runs[0].history[e].epoch);
        REQUIRE(hist[e].train_loss == report.runs[0].history[e].train_loss);
        REQUIRE(hist[e].val_loss == report.runs[0].history[e].val_loss);
    }
    // One line per epoch, newline terminated.
    std::ifstream in(hist_path, std::ios::binary);
    const std::string raw((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    REQUIRE(static_cast<std::size_t>(
                std::count(raw.begin(), raw.end(), '\n')) == hist.size());
}

TEST_CASE("nan aggregates serialize as null and read back as nan") {
    tr::CrossValReport r;
    r.backbone = "reference_cnn";
    r.k = 2;
    r.fold_val_accuracies = {0.5,
                             std::numeric_limits<double>::quiet_NaN()};
    r.mean_accuracy = std::numeric_limits<double>::quiet_NaN();
    r.std_accuracy = std::numeric_limits<double>::quiet_NaN();
    r.any_diverged = true;

    const auto j = tr::crossval_to_json(r);
    REQUIRE(j["fold_val_accuracies"][1].is_null());
    REQUIRE(j["mean_accuracy"].is_null());

    const auto back = tr::crossval_from_json(j);
    REQUIRE(back.fold_val_accuracies[0] == 0.5);
    REQUIRE(std::isnan(back.fold_val_accuracies[1]));
    REQUIRE(std::isnan(back.mean_accuracy));
    REQUIRE(back.any_diverged);
}

TEST_CASE("checkpoints written by train_fold restore the trained weights") {
    TempDir tmp("trainer_ckpt");
    auto toy = make_toy(tmp, 4, 24);
    std::vector<std::string> train_ids, val_ids;
    head_tail_split(toy.train_ids, train_ids, val_ids, 1);

    auto m = model::build_reference_cnn(16, 41);
    const auto ckpt = tmp.path() / "final" / "model.ckpt";
    const auto run = tr::train_fold(m, train_ids, val_ids, toy.manifest,
                                    toy.base, AugmentationPolicy::identity(),
                                    quick_hp(1e-3, 4, 2), ckpt);
    REQUIRE(run.final_model == ckpt.string());

    const auto restored = model::load_checkpoint(ckpt);
    REQUIRE(restored.params.value.size() == m.params.value.size());
    for (std::size_t i = 0; i < m.params.value.size(); ++i)
        REQUIRE(restored.params.value[i].data == m.params.value[i].data);
}
