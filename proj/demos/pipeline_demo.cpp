// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

// Walks the library end to end in one process: make a small synthetic
// candling dataset, split and fold it, cross-validate the reference CNN,
// and print the metric table for the held-out test split.
//
// Build target: pipeline_demo. Run from anywhere; it works inside a
// temporary directory and prints every artifact path it writes.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <iterator>

#include "candling/candling.hpp"

namespace fs = std::filesystem;
using namespace candling;

int main() {
    const fs::path work = fs::temp_directory_path() / "candling_demo";
    fs::remove_all(work);

    // 1. Synthesize a labeled dataset: bright uniform "infertile" discs
    //    versus "fertile" ones carrying an embryo spot and vessels.
    SyntheticSpec spec;
    spec.n_fertile = 40;
    spec.n_infertile = 40;
    spec.height = 96;
    spec.width = 96;
    spec.seed = 7;
    auto manifest = generate_synthetic(spec, work / "synthetic");
    std::cout << "synthesized " << manifest.samples.size() << " images\n";

    // 2. Hold out a stratified test split, then fold the train split.
    manifest = split_train_test(manifest, 0.8, derive_seed(17, "split"));
    const auto plan = make_folds(manifest, 3, derive_seed(17, "fold"));
    manifest = apply_folds(manifest, plan);

    // 3. Cross-validate the small from-scratch reference network.
    train::Hyperparams hp;
    hp.learning_rate = 1e-3;
    hp.optimizer = train::Optimizer::adam;
    hp.epochs = 16;
    hp.batch_size = 8;
    hp.seed = 17;
    AugmentationPolicy aug;  // paper-style: +/-5 deg, flips, mild zoom
    train::CrossValOptions opts;
    opts.run_dir = work / "runs";
    const auto cv = train::run_cross_validation(
        manifest, fs::current_path(), model::kReferenceCnn, plan, aug, hp,
        opts);
    std::cout << report::emit_crossval_summary(cv);

    // 4. Reload the best fold's checkpoint and score the test split.
    const auto best = std::distance(
        cv.fold_val_accuracies.begin(),
        std::max_element(cv.fold_val_accuracies.begin(),
                         cv.fold_val_accuracies.end()));
    auto m = model::load_checkpoint(cv.runs[static_cast<std::size_t>(best)]
                                        .final_model);
    std::cout << "scoring the fold " << best << " checkpoint\n";
    std::vector<std::string> ids = manifest.test_ids();
    std::vector<Image> images;
    std::vector<Label> labels;
    for (const auto& id : ids) {
        const auto& s = manifest.find(id);
        images.push_back(resize_bilinear(read_image(s.path),
                                         m.spec.input_size,
                                         m.spec.input_size));
        labels.push_back(s.label);
    }
    const auto batch = model::predict(m, ids, images);
    const auto metrics = evaluate(labels, batch.predicted, batch.scores);

    // 5. Render the comparison table for this single model.
    const std::vector<report::TableRow> rows = {
        report::table_row("ReferenceCNN", report::Phase::testing, metrics),
    };
    std::cout << "\n"
              << report::emit_table(rows, report::TableFormat::markdown);

    // 6. Emit the scored fold's learning curves next to the checkpoints.
    const auto arts = report::emit_curves(
        cv.runs[static_cast<std::size_t>(best)], work / "reports");
    std::cout << "\ncurves: " << arts.png.string() << "\n";
    return 0;
}
