// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

// Acceptance gate: nine checks, one verdict line each. The binary drives
// the real pipeline executable for the end-to-end checks, so it needs
// CANDLING_CLI_PATH defined at compile time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/candling.hpp"

#ifndef CANDLING_CLI_PATH
#error "CANDLING_CLI_PATH must point at the pipeline executable"
#endif

namespace fs = std::filesystem;
using namespace candling;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

Outcome pass(std::string detail) { return {Status::pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Status::fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Status::skip, std::move(detail)}; }

std::string fmt(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(CANDLING_CLI_PATH) + " " + args +
                            " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

// ---------------------------------------------------------------------------
// 1. Metric formulas against exact rational arithmetic.
// ---------------------------------------------------------------------------

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 0;  // den == 0 encodes "undefined"
};

bool matches(const MetricValue& m, const Rational& r) {
    if (m.defined != (r.den != 0)) return false;
    if (!m.defined) return true;
    // Both sides divide the same two small integers; IEEE division is
    // correctly rounded, so the doubles must be identical.
    return m.value == static_cast<double>(r.num) / static_cast<double>(r.den);
}

bool check_cm(const ConfusionMatrix& cm) {
    const std::int64_t tp = cm.tp, tn = cm.tn, fp = cm.fp, fn = cm.fn;
    return matches(accuracy(cm), {tp + tn, tp + tn + fp + fn}) &&
           matches(sensitivity(cm), {tp, tp + fn}) &&
           matches(specificity(cm), {tn, tn + fp}) &&
           matches(precision(cm), {tp, tp + fp});
}

Outcome criterion_metric_oracle() {
    Rng rng(802);
    for (int i = 0; i < 1000; ++i) {
        ConfusionMatrix cm;
        cm.tp = rng.uniform_int(0, 100);
        cm.tn = rng.uniform_int(0, 100);
        cm.fp = rng.uniform_int(0, 100);
        cm.fn = rng.uniform_int(0, 100);
        if (!check_cm(cm))
            return fail("matrix " + std::to_string(i) +
                        " disagrees with rational arithmetic");
    }
    // Force every undefined branch explicitly.
    const ConfusionMatrix crafted[] = {
        {0, 5, 3, 0},  // sensitivity undefined (tp+fn == 0)
        {4, 0, 0, 2},  // specificity undefined (tn+fp == 0)
        {0, 6, 0, 3},  // precision undefined (tp+fp == 0)
        {0, 0, 0, 0},  // everything undefined
    };
    for (const auto& cm : crafted)
        if (!check_cm(cm)) return fail("forced undefined case disagrees");
    return pass("1000 random matrices exact, undefined branches exact");
}

// ---------------------------------------------------------------------------
// 2. Trapezoidal AUC against brute-force pairwise concordance.
// ---------------------------------------------------------------------------

double concordance(const std::vector<Label>& labels,
                   const std::vector<double>& scores) {
    double total = 0.0;
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != Label::fertile) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != Label::infertile) continue;
            ++pairs;
            if (scores[i] > scores[j])
                total += 1.0;
            else if (scores[i] == scores[j])
                total += 0.5;
        }
    }
    return total / static_cast<double>(pairs);
}

Outcome criterion_auc_oracle() {
    Rng rng(7113);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int n = static_cast<int>(rng.uniform_int(2, 50));
        std::vector<Label> labels;
        std::vector<double> scores;
        do {
            labels.clear();
            for (int s = 0; s < n; ++s)
                labels.push_back(rng.uniform_int(0, 1) == 0
                                     ? Label::infertile
                                     : Label::fertile);
        } while (std::count(labels.begin(), labels.end(), Label::fertile) ==
                     0 ||
                 std::count(labels.begin(), labels.end(), Label::fertile) ==
                     n);
        const bool gridded = i % 2 == 0;  // guarantees heavy ties
        for (int s = 0; s < n; ++s)
            scores.push_back(gridded
                                 ? rng.uniform_int(0, 10) / 10.0
                                 : rng.uniform(0.0, 1.0));
        if (!gridded && n >= 4) scores[1] = scores[0];  // inject one tie

        const MetricValue a = auc(labels, scores);
        if (!a.defined)
            return fail("auc undefined on a two-class set (case " +
                        std::to_string(i) + ")");
        const double oracle = concordance(labels, scores);
        worst = std::max(worst, std::abs(a.value - oracle));
        if (std::abs(a.value - oracle) > 1e-9)
            return fail("case " + std::to_string(i) + ": auc " +
                        std::to_string(a.value) + " vs concordance " +
                        std::to_string(oracle));
    }
    std::ostringstream os;
    os << "200 score sets with ties, max |auc - concordance| = " << worst;
    return pass(os.str());
}

// ---------------------------------------------------------------------------
// 3. Comparison-table fixture, byte for byte.
// ---------------------------------------------------------------------------

report::TableRow fixture_row(const std::string& model, report::Phase phase,
                             double auc_v, double acc, double rec,
                             double spec, double prec) {
    auto mv = [](double v) {
        MetricValue m;
        if (std::isnan(v)) return m;
        m.defined = true;
        m.value = v;
        return m;
    };
    report::TableRow r;
    r.model_name = model;
    r.phase = phase;
    r.auc = mv(auc_v);
    r.accuracy = mv(acc);
    r.recall = mv(rec);
    r.specificity = mv(spec);
    r.precision = mv(prec);
    return r;
}

Outcome criterion_table_fixture() {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    using P = report::Phase;
    const std::vector<report::TableRow> rows = {
        fixture_row("VGG16", P::training, 1, 1, 1, 1, 1),
        fixture_row("VGG16", P::testing, 0.78, 0.98, nan, 0.98, 0),
        fixture_row("ResNet50", P::training, 1, 1, 1, 1, 1),
        fixture_row("ResNet50", P::testing, 0.8, 0.98, nan, nan, nan),
        fixture_row("InceptionNet", P::training, 1, 1, 1, 1, 1),
        fixture_row("InceptionNet", P::testing, 0.98, 0.98, 1, 0.96, 0.96),
        fixture_row("MobileNet", P::training, 1, 1, 1, 1, 1),
        fixture_row("MobileNet", P::testing, 0.84, 0.98, nan, 0.98, nan),
    };
    const std::string expected =
        "| Model | Phase | AUC | Accuracy | Recall | Specificity | "
        "Precision |\n"
        "| --- | --- | --- | --- | --- | --- | --- |\n"
        "| VGG16 | Training | 1 | 1 | 1 | 1 | 1 |\n"
        "| VGG16 | Testing | 0.78 | 0.98 | NaN | 0.98 | 0 |\n"
        "| ResNet50 | Training | 1 | 1 | 1 | 1 | 1 |\n"
        "| ResNet50 | Testing | 0.8 | 0.98 | NaN | NaN | NaN |\n"
        "| InceptionNet | Training | 1 | 1 | 1 | 1 | 1 |\n"
        "| InceptionNet | Testing | 0.98 | 0.98 | 1 | 0.96 | 0.96 |\n"
        "| MobileNet | Training | 1 | 1 | 1 | 1 | 1 |\n"
        "| MobileNet | Testing | 0.84 | 0.98 | NaN | 0.98 | NaN |\n";
    const std::string got =
        report::emit_table(rows, report::TableFormat::markdown);
    if (got != expected) {
        std::size_t at = 0;
        while (at < got.size() && at < expected.size() &&
               got[at] == expected[at])
            ++at;
        return fail("first byte difference at offset " + std::to_string(at));
    }
    return pass("all 8 rows byte-exact, NaN cells literal");
}

// ---------------------------------------------------------------------------
// 4. Split and fold invariants as property tests.
// ---------------------------------------------------------------------------

Outcome criterion_fold_properties() {
    Rng rng(40109);
    for (int iter = 0; iter < 200; ++iter) {
        const int n = static_cast<int>(rng.uniform_int(10, 1000));
        DatasetManifest m;
        std::map<std::string, Label> label_of;
        const double fertile_frac = rng.uniform(0.3, 0.7);
        for (int i = 0; i < n; ++i) {
            const std::string id = "s" + std::to_string(i);
            const Label lab = rng.uniform(0.0, 1.0) < fertile_frac
                                  ? Label::fertile
                                  : Label::infertile;
            m.samples.push_back({id, id + ".png", lab});
            label_of[id] = lab;
        }
        const std::uint64_t seed = static_cast<std::uint64_t>(
            rng.uniform_int(0, 1'000'000));
        const auto split = split_train_test(m, 0.8, seed);
        const auto train = split.train_ids();
        const auto test = split.test_ids();
        const std::string tag = " (iter " + std::to_string(iter) + ")";

        if (train.size() + test.size() != static_cast<std::size_t>(n))
            return fail("split is not a partition" + tag);
        std::set<std::string> seen(train.begin(), train.end());
        seen.insert(test.begin(), test.end());
        if (seen.size() != static_cast<std::size_t>(n))
            return fail("split duplicates or drops ids" + tag);
        if (std::abs(static_cast<double>(train.size()) - 0.8 * n) >
            1.0 + 1e-9)
            return fail("train fraction drifts past 1/n from 4:1" + tag);

        // Per-class split balance.
        for (const Label lab : {Label::fertile, Label::infertile}) {
            std::int64_t total = 0, in_train = 0;
            for (const auto& [id, l] : label_of)
                if (l == lab) {
                    ++total;
                    if (std::find(train.begin(), train.end(), id) !=
                        train.end())
                        ++in_train;
                }
            if (std::abs(static_cast<double>(in_train) - 0.8 * total) >
                1.0 + 1e-9)
                return fail("class split balance off by more than 1" + tag);
        }

        const int max_k = std::min<std::int64_t>(
            10, static_cast<std::int64_t>(train.size()));
        const int k = static_cast<int>(rng.uniform_int(2, max_k));
        const auto plan = make_folds(split, k, seed + 1);
        if (plan.k != k) return fail("plan.k mismatch" + tag);

        std::vector<std::int64_t> fold_sizes(k, 0);
        std::map<Label, std::vector<std::int64_t>> class_fold(
            {{Label::fertile, std::vector<std::int64_t>(k, 0)},
             {Label::infertile, std::vector<std::int64_t>(k, 0)}});
        for (const auto& id : train) {
            const auto it = plan.assignments.find(id);
            if (it == plan.assignments.end())
                return fail("train id missing a fold" + tag);
            if (it->second < 0 || it->second >= k)
                return fail("fold index out of range" + tag);
            ++fold_sizes[static_cast<std::size_t>(it->second)];
            ++class_fold[label_of[id]][static_cast<std::size_t>(it->second)];
        }
        if (plan.assignments.size() != train.size())
            return fail("folds assign ids outside the train split" + tag);
        const auto [lo, hi] =
            std::minmax_element(fold_sizes.begin(), fold_sizes.end());
        if (*hi - *lo > 1) return fail("fold sizes differ by more than 1" + tag);
        for (const auto& [lab, counts] : class_fold) {
            const auto [clo, chi] =
                std::minmax_element(counts.begin(), counts.end());
            if (*chi - *clo > 1)
                return fail("per-class fold balance off by more than 1" + tag);
        }

        // Determinism: identical seeds reproduce identical assignments.
        const auto split2 = split_train_test(m, 0.8, seed);
        const auto plan2 = make_folds(split2, k, seed + 1);
        if (split2.split != split.split ||
            plan2.assignments != plan.assignments)
            return fail("same seed produced a different partition" + tag);
    }
    return pass("200 manifests (10..1000 ids, k 2..10): partition, balance, "
                "ratio, determinism hold");
}

// ---------------------------------------------------------------------------
// 5. Augmentation properties.
// ---------------------------------------------------------------------------

Image random_image(Rng& rng) {
    const int h = static_cast<int>(rng.uniform_int(16, 64));
    const int w = static_cast<int>(rng.uniform_int(16, 64));
    const int c = rng.uniform_int(0, 1) == 0 ? 1 : 3;
    Image img(h, w, c);
    for (auto& v : img.data)
        v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

bool same_pixels(const Image& a, const Image& b) {
    return a.height == b.height && a.width == b.width &&
           a.channels == b.channels && a.data == b.data;
}

Outcome criterion_augmentation() {
    Rng rng(5511);

    // Identity elements are exact.
    AugmentSampler id_sampler(AugmentationPolicy::identity(), 99);
    for (int i = 0; i < 20; ++i) {
        const Image img = random_image(rng);
        const auto t = id_sampler.next(img.height, img.width);
        if (!t.is_identity())
            return fail("identity policy sampled a non-identity transform");
        if (!same_pixels(apply(img, t, 0), img))
            return fail("identity transform changed pixel data");
    }

    // Flip involutions are exact.
    for (int i = 0; i < 20; ++i) {
        const Image img = random_image(rng);
        if (!same_pixels(flip(flip(img, FlipAxis::horizontal),
                              FlipAxis::horizontal),
                         img) ||
            !same_pixels(
                flip(flip(img, FlipAxis::vertical), FlipAxis::vertical),
                img))
            return fail("flip applied twice is not the identity");
    }

    // Dimension and intensity-range preservation under the default policy.
    AugmentationPolicy policy;
    AugmentSampler sampler(policy, 1234);
    for (int i = 0; i < 100; ++i) {
        const Image img = random_image(rng);
        const auto t = sampler.next(img.height, img.width);
        const Image out = apply(img, t, policy.fill_value);
        if (out.height != img.height || out.width != img.width ||
            out.channels != img.channels)
            return fail("augmented image changed shape (case " +
                        std::to_string(i) + ")");
        const auto [in_lo, in_hi] =
            std::minmax_element(img.data.begin(), img.data.end());
        const std::uint8_t lo = std::min(*in_lo, policy.fill_value);
        const std::uint8_t hi = std::max(*in_hi, policy.fill_value);
        for (const auto v : out.data)
            if (v < lo || v > hi)
                return fail("augmented intensity escaped the input range "
                            "(case " +
                            std::to_string(i) + ")");
    }

    // Rotation draws stay in [-5, 5] degrees and look uniform.
    AugmentSampler rot_sampler(policy, 777);
    std::vector<std::int64_t> bins(10, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto t = rot_sampler.next(64, 64);
        if (t.rotation_deg < -5.0 || t.rotation_deg > 5.0)
            return fail("rotation " + std::to_string(t.rotation_deg) +
                        " outside [-5, 5]");
        const int bin = std::min(
            9, static_cast<int>(std::floor(t.rotation_deg + 5.0)));
        ++bins[static_cast<std::size_t>(bin)];
    }
    const double expect = 1000.0;
    double chi2 = 0.0;
    for (const auto c : bins) {
        const double d = static_cast<double>(c) - expect;
        chi2 += d * d / expect;
    }
    const double critical = 21.666;  // chi-square, df 9, alpha 0.01
    if (chi2 >= critical)
        return fail("rotation chi-square " + fmt(chi2) + " >= " +
                    fmt(critical));
    return pass("identity/involution exact, 100 images preserved, rotation "
                "chi-square " +
                fmt(chi2) + " < " + fmt(critical));
}

// ---------------------------------------------------------------------------
// 6. Head gradients against central finite differences.
// ---------------------------------------------------------------------------

Outcome criterion_gradient_check() {
    nn::GraphDef g = model::build_graph(model::kReferenceCnn, 16);
    nn::ParameterStore<double> store;
    store.allocate(g);
    nn::init_parameters(g, store, 13u);

    Rng rng(500);
    Tensor<double> input({4, 3, 16, 16});
    for (auto& v : input.data) v = rng.uniform(-1.0, 1.0);
    const std::vector<int> labels{0, 1, 1, 0};

    auto loss_fn = [&] {
        nn::Workspace<double> ws;
        const auto& logits = nn::forward(g, store, ws, input);
        return nn::softmax_cross_entropy(logits, labels).loss;
    };

    nn::Workspace<double> ws;
    const auto& logits = nn::forward(g, store, ws, input);
    const auto res = nn::softmax_cross_entropy(logits, labels);
    store.zero_grads();
    nn::backward(g, store, ws, res.dlogits);

    const double h = 1e-5;
    double worst = 0.0;
    int checked = 0;
    for (const char* name : {"head.w", "head.b"}) {
        const auto idx = static_cast<std::size_t>(g.find_param(name));
        auto& tensor = store.value[idx];
        for (std::size_t j = 0; j < tensor.data.size(); ++j) {
            const double old = tensor.data[j];
            tensor.data[j] = old + h;
            const double up = loss_fn();
            tensor.data[j] = old - h;
            const double down = loss_fn();
            tensor.data[j] = old;
            const double fd = (up - down) / (2.0 * h);
            const double an = store.grad[idx].data[j];
            const double rel = std::abs(fd - an) /
                               std::max(1.0, std::abs(fd) + std::abs(an));
            worst = std::max(worst, rel);
            ++checked;
        }
    }
    std::ostringstream os;
    if (worst > 1e-3) {
        os << "max relative gap " << worst << " > 1e-3 over " << checked
           << " head parameters";
        return fail(os.str());
    }
    os << checked << " head parameters, max relative gap " << worst
       << " <= 1e-3";
    return pass(os.str());
}

// ---------------------------------------------------------------------------
// 7 & 9. Synthetic end-to-end run plus the leakage assertion.
// ---------------------------------------------------------------------------

struct E2eArtifacts {
    bool ran = false;
    fs::path out_dir;
    int epochs = 20;
    int batch = 16;
    std::string failure;  // non-empty when the chain broke
};

E2eArtifacts g_e2e;

Outcome criterion_end_to_end() {
    const fs::path work = fs::temp_directory_path() / "candling_acceptance";
    std::error_code ec;
    fs::remove_all(work, ec);
    fs::create_directories(work);
    const fs::path out = work / "out";
    g_e2e.out_dir = out;

    if (run_cli("--help", work / "help.log") != 0) {
        g_e2e.failure = "--help did not exit 0";
        return fail(g_e2e.failure);
    }

    nlohmann::json cfg = {
        {"backbone", "reference_cnn"},
        {"out", out.string()},
        {"data", {{"k", 5}, {"train_fraction", 0.8}, {"seed", 17}}},
        {"synth", {{"per_class", 100}, {"size", 256}, {"seed", 7}}},
        {"train",
         {{"lr", 1e-3},
          {"batch", g_e2e.batch},
          {"epochs", g_e2e.epochs},
          {"optimizer", "adam"},
          {"seed", 17}}},
    };
    const fs::path cfg_path = work / "config.json";
    {
        std::ofstream f(cfg_path, std::ios::binary);
        f << cfg.dump(2) << "\n";
    }
    const std::string base = "--config " + cfg_path.string();

    const auto t0 = std::chrono::steady_clock::now();
    struct Step {
        const char* name;
        std::string args;
    };
    const Step steps[] = {
        {"synth", base + " synth"},
        {"prepare", base + " prepare --root " + (out / "synthetic").string()},
        {"crossval", base + " crossval"},
        {"evaluate", base + " evaluate"},
        {"report", base + " report"},
    };
    for (const auto& step : steps) {
        const int rc = run_cli(step.args, work / (std::string(step.name) +
                                                  ".log"));
        if (rc != 0) {
            g_e2e.failure = std::string(step.name) + " exited " +
                            std::to_string(rc) + " (log: " +
                            (work / (std::string(step.name) + ".log"))
                                .string() +
                            ")";
            return fail(g_e2e.failure);
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    g_e2e.ran = true;

    const auto cv =
        train::read_crossval_json(out / "runs" / "reference_cnn" /
                                  "crossval.json");
    if (cv.k != 5 || cv.runs.size() != 5)
        return fail("crossval did not produce 5 folds");
    if (!(cv.mean_accuracy >= 0.90))
        return fail("mean fold validation accuracy " +
                    fmt(cv.mean_accuracy, 4) + " < 0.90");

    int decreasing = 0;
    for (const auto& run : cv.runs) {
        if (run.history.empty()) continue;
        if (run.history.back().train_loss < run.history.front().train_loss)
            ++decreasing;
    }
    if (decreasing < 4)
        return fail("training loss decreased in only " +
                    std::to_string(decreasing) + " of 5 folds");

    std::ifstream mf(out / "metrics.json", std::ios::binary);
    const auto mj = nlohmann::json::parse(mf, nullptr, false);
    if (mj.is_discarded()) return fail("metrics.json missing or invalid");
    const auto test_report = report_from_json(mj);
    if (!test_report.accuracy.defined ||
        !(test_report.accuracy.value >= 0.90))
        return fail("held-out test accuracy " +
                    (test_report.accuracy.defined
                         ? fmt(test_report.accuracy.value, 4)
                         : std::string("NaN")) +
                    " < 0.90");

    int curves = 0;
    for (int i = 0; i < 5; ++i)
        if (fs::exists(out / "reports" /
                       ("curves_reference_cnn_fold" + std::to_string(i) +
                        ".png")))
            ++curves;
    if (curves != 5 ||
        !fs::exists(out / "reports" / "crossval_reference_cnn.txt") ||
        !fs::exists(out / "reports" / "table1.md"))
        return fail("report stage left artifacts missing");

    if (seconds > 900.0)
        return fail("pipeline took " + fmt(seconds, 1) + " s > 900 s");
    return pass("mean fold accuracy " + fmt(cv.mean_accuracy, 4) +
                ", test accuracy " + fmt(test_report.accuracy.value, 4) +
                ", loss fell in " + std::to_string(decreasing) +
                "/5 folds, " + fmt(seconds, 1) + " s");
}

Outcome criterion_leakage() {
    if (!g_e2e.ran)
        return fail("end-to-end run unavailable" +
                    (g_e2e.failure.empty() ? std::string()
                                           : " (" + g_e2e.failure + ")"));
    const auto manifest = read_manifest(g_e2e.out_dir / "manifest.jsonl");
    const auto cv = train::read_crossval_json(
        g_e2e.out_dir / "runs" / "reference_cnn" / "crossval.json");

    // Every training batch was screened against the fold's validation ids
    // plus the held-out test ids; any hit aborts the run. Confirm the screen
    // covered exactly the batch count the fold sizes imply.
    std::int64_t expected = 0;
    for (int fold = 0; fold < cv.k; ++fold) {
        std::int64_t train_size = 0;
        for (const auto& [id, f] : manifest.fold)
            if (f != fold) ++train_size;
        const std::int64_t per_epoch =
            (train_size + g_e2e.batch - 1) / g_e2e.batch;
        expected += per_epoch * g_e2e.epochs;
    }
    std::int64_t checked = 0;
    for (const auto& run : cv.runs) checked += run.leak_checked_batches;
    if (checked != expected)
        return fail("leak screen covered " + std::to_string(checked) +
                    " batches, expected " + std::to_string(expected));
    return pass("0 validation/test ids in training batches (" +
                std::to_string(checked) + " batches screened)");
}

// ---------------------------------------------------------------------------
// 8. Backbone parameter counts, gated on pretrained weights.
// ---------------------------------------------------------------------------

Outcome criterion_backbone_counts() {
    const char* env = std::getenv("CANDLING_WEIGHTS_DIR");
    model::BuildOptions opts;
    opts.cache_dir = env ? fs::path(env) : fs::path("weights");
    opts.offline = false;

    struct Target {
        const char* name;
        double reference;
    };
    const Target targets[] = {
        {"vgg16", 134.2e6},
        {"resnet50", 23.8e6},
        {"inceptionnet", 21.8e6},
        {"mobilenet", 2.2e6},
    };
    std::ostringstream os;
    bool all_ok = true;
    for (const auto& t : targets) {
        try {
            const auto m = model::build_classifier(
                t.name, model::FineTunePolicy::full(), 1, opts);
            const auto count = model::count_trainable_parameters(m);
            const double rel =
                std::abs(static_cast<double>(count) - t.reference) /
                t.reference;
            if (!os.str().empty()) os << ", ";
            os << t.name << " " << count << " (" << fmt(rel * 100.0) << "%)";
            if (rel > 0.01) all_ok = false;
        } catch (const WeightsUnavailableError&) {
            return skip("pretrained weights unavailable for " +
                        std::string(t.name) +
                        " (offline); counts not asserted");
        }
    }
    if (!all_ok) return fail("outside 1%: " + os.str());
    return pass(os.str());
}

struct Criterion {
    int number;
    const char* name;
    double limit_s;  // 0 = no budget printed
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "metric-formula oracle", 5.0, criterion_metric_oracle},
        {2, "auc concordance oracle", 10.0, criterion_auc_oracle},
        {3, "comparison-table fixture", 0.0, criterion_table_fixture},
        {4, "split/fold invariants", 10.0, criterion_fold_properties},
        {5, "augmentation properties", 30.0, criterion_augmentation},
        {6, "gradient check", 60.0, criterion_gradient_check},
        {7, "synthetic end-to-end", 900.0, criterion_end_to_end},
        {8, "backbone parameter counts", 0.0, criterion_backbone_counts},
        {9, "leakage assertion", 0.0, criterion_leakage},
    };

    int failed = 0, skipped = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = fail(std::string("unexpected exception: ") + e.what());
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        if (o.status == Status::pass && c.limit_s > 0.0 &&
            seconds > c.limit_s)
            o = fail("passed checks but took " + fmt(seconds, 1) +
                     " s, budget " + fmt(c.limit_s, 0) + " s");
        const char* verdict = o.status == Status::pass  ? "PASS"
                              : o.status == Status::skip ? "SKIP"
                                                         : "FAIL";
        if (o.status == Status::fail) ++failed;
        if (o.status == Status::skip) ++skipped;
        std::printf("criterion %d [%s]: %s — %s (%.2f s)\n", c.number,
                    c.name, verdict, o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    const int passed = 9 - failed - skipped;
    std::printf("acceptance: %d passed, %d failed, %d skipped\n", passed,
                failed, skipped);
    return failed == 0 ? 0 : 1;
}
