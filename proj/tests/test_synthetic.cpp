// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#include <filesystem>

#include <catch2/catch_amalgamated.hpp>

#include "candling/synthetic.hpp"
#include "support/test_util.hpp"

using candling::Image;
using candling::Label;
using candling::SyntheticSpec;
namespace ct = candling::testing;

namespace {

SyntheticSpec tiny_spec(int n = 4) {
    SyntheticSpec spec;
    spec.n_fertile = n;
    spec.n_infertile = n;
    spec.height = 128;
    spec.width = 128;
    spec.seed = 7;
    return spec;
}

double interior_mean(const Image& img, const Image& mask_source) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            if (candling::pixel_luminance(mask_source, r, c) > 0.5) {
                sum += candling::pixel_luminance(img, r, c);
                ++count;
            }
    return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

TEST_CASE("same spec twice produces identical files") {
    ct::TempDir a("synth_a"), b("synth_b");
    const auto spec = tiny_spec();
    const auto ma = candling::generate_synthetic(spec, a.path());
    const auto mb = candling::generate_synthetic(spec, b.path());
    REQUIRE(ma.samples.size() == 8);
    REQUIRE(ma.samples.size() == mb.samples.size());
    for (std::size_t i = 0; i < ma.samples.size(); ++i) {
        REQUIRE(ma.samples[i].id == mb.samples[i].id);
        REQUIRE(ct::file_bytes(ma.samples[i].path) ==
                ct::file_bytes(mb.samples[i].path));
    }
}

TEST_CASE("zero counts produce an empty manifest and no files") {
    ct::TempDir tmp("synth_zero");
    SyntheticSpec spec = tiny_spec(0);
    spec.n_fertile = 0;
    spec.n_infertile = 0;
    const auto m = candling::generate_synthetic(spec, tmp.path() / "ds");
    REQUIRE(m.samples.empty());
    REQUIRE_FALSE(std::filesystem::exists(tmp.path() / "ds" / "fertile"));
}

TEST_CASE("fertile interiors are strictly darker than their paired twins") {
    const auto spec = tiny_spec(6);
    for (int i = 0; i < 6; ++i) {
        const Image fertile =
            candling::synthesize_image(spec, i, Label::fertile);
        const Image infertile =
            candling::synthesize_image(spec, i, Label::infertile);
        // Shared geometry: the infertile twin's glow is the interior mask.
        REQUIRE(interior_mean(fertile, infertile) <
                interior_mean(infertile, infertile));
    }
}

TEST_CASE("paired images share their nonzero support") {
    const auto spec = tiny_spec(2);
    const Image fertile = candling::synthesize_image(spec, 1, Label::fertile);
    const Image infertile =
        candling::synthesize_image(spec, 1, Label::infertile);
    for (int r = 0; r < fertile.height; ++r)
        for (int c = 0; c < fertile.width; ++c) {
            const bool fz = candling::pixel_luminance(fertile, r, c) == 0.0;
            const bool iz = candling::pixel_luminance(infertile, r, c) == 0.0;
            REQUIRE(fz == iz);
        }
}

TEST_CASE("background is exactly black and the glow is bounded away from it") {
    const auto spec = tiny_spec(1);
    const Image img = candling::synthesize_image(spec, 0, Label::infertile);
    // Frame corners are background.
    for (int ch = 0; ch < 3; ++ch) {
        REQUIRE(img.at(0, 0, ch) == 0);
        REQUIRE(img.at(img.height - 1, img.width - 1, ch) == 0);
    }
    // Center is bright glow.
    REQUIRE(candling::pixel_luminance(img, img.height / 2, img.width / 2) >
            100.0);
}

TEST_CASE("spec validation rejects bad parameters") {
    SyntheticSpec spec = tiny_spec();
    spec.height = 32;
    REQUIRE_THROWS_AS(spec.validate(), candling::ConfigError);
    spec = tiny_spec();
    spec.n_fertile = -1;
    REQUIRE_THROWS_AS(spec.validate(), candling::ConfigError);
    spec = tiny_spec();
    spec.embryo_intensity_drop = 1.0;
    REQUIRE_THROWS_AS(spec.validate(), candling::ConfigError);
    spec = tiny_spec();
    spec.vessel_count_min = 4;
    spec.vessel_count_max = 2;
    REQUIRE_THROWS_AS(spec.validate(), candling::ConfigError);
}

TEST_CASE("ids and filenames are zero-padded and ordered") {
    ct::TempDir tmp("synth_names");
    const auto m = candling::generate_synthetic(tiny_spec(3), tmp.path());
    REQUIRE(m.samples[0].id == "fertile/fertile_000");
    REQUIRE(m.samples[2].id == "fertile/fertile_002");
    REQUIRE(m.samples[3].id == "infertile/infertile_000");
    for (const auto& s : m.samples)
        REQUIRE(std::filesystem::exists(s.path));
}

TEST_CASE("unwritable output path raises IoError") {
    ct::TempDir tmp("synth_io");
    const auto blocker = tmp.path() / "file";
    {
        std::ofstream out(blocker);
        out << "x";
    }
    REQUIRE_THROWS_AS(
        candling::generate_synthetic(tiny_spec(1), blocker / "nested"),
        candling::IoError);
}
