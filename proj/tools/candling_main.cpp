// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "candling/candling.hpp"

namespace fs = std::filesystem;
using namespace candling;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out;
    std::string backbone;
    std::string root;
    std::string model_path;
    std::string sample_id;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool offline = false;
    int preview_n = 9;
};

config::RunConfig resolve_config(const CliArgs& args) {
    config::RunConfig cfg;
    if (!args.config_path.empty())
        cfg = config::load_run_config(args.config_path);
    if (args.seed_given) config::override_seed(cfg, args.seed);
    if (!args.out.empty()) cfg.out = args.out;
    if (!args.backbone.empty()) cfg.backbone = args.backbone;
    if (!args.root.empty()) cfg.data.root = args.root;
    if (args.offline) cfg.models.offline = true;
    return cfg;
}

DatasetManifest require_manifest(const fs::path& out_dir) {
    const auto path = out_dir / "manifest.jsonl";
    if (!fs::exists(path))
        throw MissingArtifactError("manifest not found: " + path.string() +
                                   " (run prepare first)");
    return read_manifest(path);
}

/// Reconstructs the fold plan recorded by prepare.
FoldPlan plan_from_manifest(const DatasetManifest& manifest) {
    if (manifest.fold.empty())
        throw ConfigError("manifest has no fold assignments; run prepare");
    FoldPlan plan;
    plan.assignments = manifest.fold;
    for (const auto& [_, f] : manifest.fold)
        plan.k = std::max(plan.k, f + 1);
    return plan;
}

std::vector<std::string> ids_for_fold(const DatasetManifest& manifest,
                                      const FoldPlan& plan, int fold,
                                      bool validation) {
    std::vector<std::string> out;
    for (const auto& s : manifest.samples) {
        const auto it = plan.assignments.find(s.id);
        if (it == plan.assignments.end()) continue;
        if ((it->second == fold) == validation) out.push_back(s.id);
    }
    return out;
}

int cmd_synth(const config::RunConfig& cfg) {
    const fs::path out_dir(cfg.out);
    const auto spec = config::to_synthetic(cfg);
    const fs::path synth_dir = out_dir / "synthetic";
    const auto manifest = generate_synthetic(spec, synth_dir);
    write_manifest(manifest, synth_dir / "manifest.jsonl");
    config::write_effective_config(out_dir / "config.json", cfg);
    std::cout << "wrote " << manifest.samples.size() << " images under "
              << synth_dir.string() << "\n";
    std::cout << "wrote " << (synth_dir / "manifest.jsonl").string() << "\n";
    return 0;
}

int cmd_prepare(const config::RunConfig& cfg) {
    if (cfg.data.root.empty())
        throw ConfigError("data.root is not set (use --root or the config)");
    const fs::path root(cfg.data.root);
    const fs::path out_dir(cfg.out);
    const auto scheme = fs::exists(root / "manifest.jsonl")
                            ? LabelingScheme::by_manifest_file
                            : LabelingScheme::by_subdirectory;
    const auto raw = ingest_directory(root, scheme);
    const auto policy = config::to_preprocess(cfg);

    const fs::path source_dir = fs::is_directory(root) ? root : root.parent_path();
    DatasetManifest prepared;
    for (const auto& s : raw.samples) {
        const Image img = read_image(resolve_sample_path(source_dir, s.path));
        const Image processed = preprocess(img, policy);
        const std::string rel = "preprocessed/" + s.id + ".png";
        write_image(out_dir / rel, processed);
        prepared.samples.push_back({s.id, rel, s.label});
    }

    prepared = split_train_test(prepared, cfg.data.train_fraction,
                                derive_seed(cfg.data.seed, "split"));
    const auto plan =
        make_folds(prepared, cfg.data.k, derive_seed(cfg.data.seed, "fold"));
    prepared = apply_folds(prepared, plan);
    write_manifest(prepared, out_dir / "manifest.jsonl");
    config::write_effective_config(out_dir / "config.json", cfg);

    std::cout << "prepared " << prepared.samples.size() << " samples ("
              << prepared.train_ids().size() << " train / "
              << prepared.test_ids().size() << " test, k=" << cfg.data.k
              << ")\n";
    std::cout << "wrote " << (out_dir / "manifest.jsonl").string() << "\n";
    return 0;
}

int cmd_augment_preview(const config::RunConfig& cfg, int n,
                        const std::string& sample_id) {
    if (n < 1) throw ConfigError("preview needs a positive tile count");
    const fs::path out_dir(cfg.out);
    const auto manifest = require_manifest(out_dir);

    std::string id = sample_id;
    if (id.empty()) {
        const auto train = manifest.train_ids();
        id = train.empty() ? manifest.samples.front().id : train.front();
    }
    const ImageSample& sample = manifest.find(id);
    const Image source =
        read_image(resolve_sample_path(out_dir, sample.path));

    const auto policy = config::to_policy(cfg);
    AugmentSampler sampler(policy, cfg.augment.seed);

    const int cols = static_cast<int>(std::ceil(std::sqrt(double(n))));
    const int rows = (n + cols - 1) / cols;
    const int gap = 4;
    Image sheet(rows * source.height + (rows + 1) * gap,
                cols * source.width + (cols + 1) * gap, 3, 32);
    for (int i = 0; i < n; ++i) {
        const auto t = sampler.next(source.height, source.width);
        const Image tile = apply(source, t, policy.fill_value);
        const int r0 = gap + (i / cols) * (source.height + gap);
        const int c0 = gap + (i % cols) * (source.width + gap);
        for (int r = 0; r < tile.height; ++r)
            for (int c = 0; c < tile.width; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    sheet.at(r0 + r, c0 + c, ch) =
                        tile.at(r, c, tile.channels == 1 ? 0 : ch);
    }
    const fs::path path = out_dir / "preview" / "augment_preview.png";
    write_image(path, sheet);
    config::write_effective_config(out_dir / "config.json", cfg);
    std::cout << "wrote " << path.string() << " (" << n << " tiles of '"
              << id << "')\n";
    return 0;
}

model::ClassifierModel build_for_training(const config::RunConfig& cfg,
                                          std::uint64_t model_seed) {
    if (cfg.backbone == model::kReferenceCnn)
        return model::build_reference_cnn(
            model::backbone_spec(model::kReferenceCnn).input_size,
            model_seed);
    model::BuildOptions opts;
    opts.cache_dir = cfg.models.cache_dir;
    opts.offline = cfg.models.offline;
    return model::build_classifier(cfg.backbone, config::to_fine_tune(cfg),
                                   model_seed, opts);
}

int cmd_train(const config::RunConfig& cfg) {
    const fs::path out_dir(cfg.out);
    const auto manifest = require_manifest(out_dir);
    const auto plan = plan_from_manifest(manifest);
    const auto val_ids = ids_for_fold(manifest, plan, 0, true);
    const auto train_ids = ids_for_fold(manifest, plan, 0, false);

    auto hp = config::to_hyperparams(cfg);
    auto m = build_for_training(cfg, derive_seed(cfg.train.seed, "model"));
    const fs::path run_dir = out_dir / "runs" / cfg.backbone / "train";

    auto run = train::train_fold(m, train_ids, val_ids, manifest, out_dir,
                                 config::to_policy(cfg), hp,
                                 run_dir / "model.ckpt");
    train::write_history_jsonl(run_dir / "history.jsonl", run.history);
    {
        std::ofstream out(run_dir / "run.json",
                          std::ios::binary | std::ios::trunc);
        out << train::run_to_json(run).dump(2) << "\n";
        if (!out)
            throw IoError("cannot write " + (run_dir / "run.json").string());
    }
    config::write_effective_config(out_dir / "config.json", cfg);

    const auto& last = run.history.back();
    std::cout << "trained " << cfg.backbone << " for " << last.epoch
              << " epochs: val_accuracy "
              << report::format_number(last.val_accuracy) << "\n";
    std::cout << "wrote " << (run_dir / "history.jsonl").string() << "\n";
    return 0;
}

int cmd_crossval(const config::RunConfig& cfg) {
    const fs::path out_dir(cfg.out);
    const auto manifest = require_manifest(out_dir);
    const auto plan = plan_from_manifest(manifest);

    train::CrossValOptions opts;
    opts.fine_tune = config::to_fine_tune(cfg);
    opts.build.cache_dir = cfg.models.cache_dir;
    opts.build.offline = cfg.models.offline;
    opts.run_dir = out_dir / "runs" / cfg.backbone;

    const auto report = train::run_cross_validation(
        manifest, out_dir, cfg.backbone, plan, config::to_policy(cfg),
        config::to_hyperparams(cfg), opts);

    for (const auto& run : report.runs)
        train::write_history_jsonl(opts.run_dir /
                                       ("fold" +
                                        std::to_string(run.fold_index)) /
                                       "history.jsonl",
                                   run.history);
    train::write_crossval_json(opts.run_dir / "crossval.json", report);
    config::write_effective_config(out_dir / "config.json", cfg);

    std::cout << report::emit_crossval_summary(report);
    std::cout << "wrote " << (opts.run_dir / "crossval.json").string()
              << "\n";
    if (report.any_diverged) {
        std::cerr << "error: training diverged in at least one fold\n";
        return 4;
    }
    return 0;
}

MetricsReport evaluate_split(const model::ClassifierModel& m,
                             const DatasetManifest& manifest,
                             const fs::path& base_dir,
                             const std::vector<std::string>& ids,
                             const std::string& split_name) {
    const auto samples = train::load_samples(manifest, base_dir, ids);
    std::vector<Image> images;
    std::vector<Label> labels;
    images.reserve(samples.size());
    for (const auto& s : samples) {
        images.push_back(
            resize_bilinear(s.image, m.spec.input_size, m.spec.input_size));
        labels.push_back(s.label);
    }
    const auto batch = model::predict(m, ids, images);
    auto r = evaluate(labels, batch.predicted, batch.scores);
    r.backbone = m.spec.name;
    r.split = split_name;
    return r;
}

int cmd_evaluate(const config::RunConfig& cfg, const std::string& model_flag) {
    const fs::path out_dir(cfg.out);
    const auto manifest = require_manifest(out_dir);
    const fs::path model_path =
        model_flag.empty()
            ? out_dir / "runs" / cfg.backbone / "fold0" / "model.ckpt"
            : fs::path(model_flag);
    auto m = model::load_checkpoint(model_path);

    const auto test_ids = manifest.test_ids();
    if (test_ids.empty())
        throw ConfigError("manifest has no test split to evaluate");
    const auto test_report =
        evaluate_split(m, manifest, out_dir, test_ids, "test");
    const auto train_report = evaluate_split(m, manifest, out_dir,
                                             manifest.train_ids(), "train");

    auto dump = [](const fs::path& p, const MetricsReport& r) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << report_to_json(r).dump(2) << "\n";
        if (!out) throw IoError("cannot write " + p.string());
    };
    dump(out_dir / "metrics.json", test_report);
    dump(out_dir / "metrics_train.json", train_report);
    config::write_effective_config(out_dir / "config.json", cfg);

    std::cout << "evaluated " << m.spec.name << " from "
              << model_path.string() << "\n";
    std::cout << "test accuracy "
              << report::format_metric(test_report.accuracy) << " (n="
              << test_report.n << "), train accuracy "
              << report::format_metric(train_report.accuracy) << " (n="
              << train_report.n << ")\n";
    std::cout << "wrote " << (out_dir / "metrics.json").string() << "\n";
    return 0;
}

int cmd_report(const config::RunConfig& cfg) {
    const fs::path out_dir(cfg.out);
    const fs::path crossval_path =
        out_dir / "runs" / cfg.backbone / "crossval.json";
    if (!fs::exists(crossval_path))
        throw MissingArtifactError("report input not found: " +
                                   crossval_path.string() +
                                   " (run crossval first)");
    const auto cv = train::read_crossval_json(crossval_path);
    const fs::path reports_dir = out_dir / "reports";

    int plotted = 0;
    for (const auto& run : cv.runs) {
        if (run.history.empty()) continue;  // diverged before epoch 1
        report::emit_curves(run, reports_dir);
        ++plotted;
    }

    const fs::path summary_path =
        reports_dir / ("crossval_" + cv.backbone + ".txt");
    {
        std::error_code ec;
        fs::create_directories(reports_dir, ec);
        std::ofstream out(summary_path, std::ios::binary | std::ios::trunc);
        out << report::emit_crossval_summary(cv);
        if (!out) throw IoError("cannot write " + summary_path.string());
    }

    std::vector<report::TableRow> rows;
    const fs::path train_metrics = out_dir / "metrics_train.json";
    const fs::path test_metrics = out_dir / "metrics.json";
    for (const auto& [path, phase] :
         {std::pair{train_metrics, report::Phase::training},
          std::pair{test_metrics, report::Phase::testing}}) {
        if (!fs::exists(path)) continue;
        std::ifstream in(path, std::ios::binary);
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded())
            throw DecodeError("bad metrics json: " + path.string());
        const auto r = report_from_json(j);
        rows.push_back(report::table_row(r.backbone, phase, r));
    }
    if (!rows.empty()) {
        auto write_text = [](const fs::path& p, const std::string& text) {
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            out << text;
            if (!out) throw IoError("cannot write " + p.string());
        };
        write_text(reports_dir / "table1.md",
                   report::emit_table(rows, report::TableFormat::markdown));
        write_text(reports_dir / "table1.csv",
                   report::emit_table(rows, report::TableFormat::csv));
    }
    config::write_effective_config(out_dir / "config.json", cfg);

    std::cout << report::emit_crossval_summary(cv);
    std::cout << "wrote " << plotted << " curve plots and "
              << summary_path.string() << "\n";
    if (!rows.empty())
        std::cout << "wrote " << (reports_dir / "table1.md").string()
                  << "\n";
    return 0;
}

int dispatch(const CLI::App& app, const CliArgs& args) {
    const auto cfg = resolve_config(args);
    if (app.got_subcommand("synth")) return cmd_synth(cfg);
    if (app.got_subcommand("prepare")) return cmd_prepare(cfg);
    if (app.got_subcommand("augment-preview"))
        return cmd_augment_preview(cfg, args.preview_n, args.sample_id);
    if (app.got_subcommand("train")) return cmd_train(cfg);
    if (app.got_subcommand("crossval")) return cmd_crossval(cfg);
    if (app.got_subcommand("evaluate"))
        return cmd_evaluate(cfg, args.model_path);
    if (app.got_subcommand("report")) return cmd_report(cfg);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"egg-candling fertility classification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    CliArgs args;
    app.add_option("--config", args.config_path,
                   "json config file (defaults apply for absent keys)");
    auto* seed_opt =
        app.add_option("--seed", args.seed, "override every stage seed");
    app.add_option("--out", args.out, "output directory (default 'out')");
    app.add_flag("--offline", args.offline,
                 "never touch the weight cache for pretrained backbones");
    app.add_option("--backbone", args.backbone,
                   "model to train/evaluate (default reference_cnn)");

    auto* synth =
        app.add_subcommand("synth", "generate a synthetic candling dataset");
    auto* prepare = app.add_subcommand(
        "prepare", "ingest, preprocess, split, and fold a dataset");
    prepare->add_option("--root", args.root, "dataset root directory");
    auto* preview = app.add_subcommand(
        "augment-preview", "render a contact sheet of augmented samples");
    preview->add_option("--n", args.preview_n,
                        "number of tiles (default 9)");
    preview->add_option("--sample", args.sample_id,
                        "sample id to augment (default: first train id)");
    auto* train_cmd = app.add_subcommand(
        "train", "train one model using fold 0 for validation");
    auto* crossval =
        app.add_subcommand("crossval", "run k-fold cross-validation");
    auto* evaluate = app.add_subcommand(
        "evaluate", "score a checkpoint on the held-out test split");
    evaluate->add_option("--model", args.model_path,
                         "checkpoint path (default: fold0 of crossval)");
    auto* report_cmd = app.add_subcommand(
        "report", "emit curves, summaries, and metric tables");
    (void)synth;
    (void)prepare;
    (void)preview;
    (void)train_cmd;
    (void)crossval;
    (void)evaluate;
    (void)report_cmd;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    args.seed_given = seed_opt->count() > 0;

    try {
        return dispatch(app, args);
    } catch (const MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const WeightsUnavailableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TrainingDivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
