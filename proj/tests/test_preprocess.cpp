// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#include <array>
#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "candling/preprocess.hpp"
#include "candling/synthetic.hpp"
#include "support/test_util.hpp"

using candling::Box;
using candling::Image;
using candling::PreprocessPolicy;
namespace ct = candling::testing;

namespace {

// Brute-force bounding box of pixels whose luminance exceeds thr.
Box scan_bright_box(const Image& img, double thr) {
    Box box;
    bool any = false;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            if (candling::pixel_luminance(img, r, c) > thr) {
                if (!any) {
                    box = Box{r, c, r, c};
                    any = true;
                } else {
                    box.r0 = std::min(box.r0, r);
                    box.r1 = std::max(box.r1, r);
                    box.c0 = std::min(box.c0, c);
                    box.c1 = std::max(box.c1, c);
                }
            }
    return box;
}

double bright_fraction(const Image& img, double thr = 0.5) {
    std::int64_t bright = 0;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            if (candling::pixel_luminance(img, r, c) > thr) ++bright;
    return static_cast<double>(bright) /
           static_cast<double>(img.pixel_count());
}

candling::SyntheticSpec small_spec() {
    candling::SyntheticSpec spec;
    spec.n_fertile = 1;
    spec.n_infertile = 1;
    spec.height = 256;
    spec.width = 256;
    spec.seed = 17;
    return spec;
}

}  // namespace

TEST_CASE("otsu splits a clean bimodal histogram between the modes") {
    std::array<std::int64_t, 256> hist{};
    hist[10] = 500;
    hist[200] = 500;
    const int t = candling::otsu_threshold(hist);
    REQUIRE(t >= 10);
    REQUIRE(t < 200);

    std::array<std::int64_t, 256> empty{};
    REQUIRE(candling::otsu_threshold(empty) == 0);
}

TEST_CASE("largest bright component wins over smaller ones") {
    Image img(40, 40, 3, 0);
    auto paint = [&](int r0, int c0, int r1, int c1) {
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = 220;
    };
    paint(2, 2, 6, 6);     // 25 px blob
    paint(15, 10, 30, 28); // 304 px blob
    const Image lum = candling::to_luminance(img);
    const Box box = candling::egg_bounding_box(lum, 100, 0.0);
    REQUIRE(box.r0 == 15);
    REQUIRE(box.c0 == 10);
    REQUIRE(box.r1 == 30);
    REQUIRE(box.c1 == 28);
}

TEST_CASE("margin expands the box and clamps at the frame") {
    Image img(100, 100, 3, 0);
    for (int r = 40; r <= 59; ++r)
        for (int c = 40; c <= 59; ++c)
            for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = 255;
    const Image lum = candling::to_luminance(img);
    const Box box = candling::egg_bounding_box(lum, 10, 0.05);
    // 20-pixel box, 5% margin rounds to 1 pixel per side.
    REQUIRE(box.r0 == 39);
    REQUIRE(box.r1 == 60);
    REQUIRE(box.c0 == 39);
    REQUIRE(box.c1 == 60);
}

TEST_CASE("all-black frame raises NoEggFound") {
    Image black(64, 64, 3, 0);
    PreprocessPolicy policy;
    REQUIRE_THROWS_AS(candling::preprocess(black, policy),
                      candling::NoEggFoundError);
}

TEST_CASE("preprocess centers the synthetic egg at 60 percent or more") {
    const Image egg = candling::synthesize_image(small_spec(), 0,
                                                 candling::Label::infertile);
    PreprocessPolicy policy;
    const Image out = candling::preprocess(egg, policy);
    REQUIRE(out.height == policy.target_height);
    REQUIRE(out.width == policy.target_width);
    REQUIRE(bright_fraction(out) >= 0.60);

    // The brute-force box of the output egg must reach near every edge:
    // that is what cropping-to-box plus margin means.
    const Box box = scan_bright_box(out, 0.5);
    REQUIRE(box.r0 <= 14);
    REQUIRE(box.c0 <= 14);
    REQUIRE(out.height - 1 - box.r1 <= 14);
    REQUIRE(out.width - 1 - box.c1 <= 14);
}

TEST_CASE("already tight crop degenerates to a plain resize") {
    const Image egg = candling::synthesize_image(small_spec(), 3,
                                                 candling::Label::infertile);
    // Hand-crop to the exact bright box to fabricate a tight input.
    const Box tight = scan_bright_box(egg, 0.5);
    const Image cropped = candling::crop(egg, tight.r0, tight.c0,
                                         tight.height(), tight.width());
    PreprocessPolicy policy;
    const Image out = candling::preprocess(cropped, policy);
    const Image direct = candling::resize_bilinear(
        cropped, policy.target_height, policy.target_width);
    REQUIRE(ct::max_abs_diff(out, direct) <= 2);
}

TEST_CASE("preprocess is idempotent within tolerance") {
    for (int index : {0, 1, 2}) {
        for (auto label : {candling::Label::fertile,
                           candling::Label::infertile}) {
            const Image egg =
                candling::synthesize_image(small_spec(), index, label);
            PreprocessPolicy policy;
            const Image once = candling::preprocess(egg, policy);
            const Image twice = candling::preprocess(once, policy);
            REQUIRE(ct::max_abs_diff(twice, once) <= 2);
        }
    }
}

TEST_CASE("background beyond the egg is zeroed in the crop path") {
    // Egg-like blob plus faint background noise far away: after preprocess
    // every pixel outside the bright region must be exactly zero.
    Image img(120, 120, 3, 0);
    for (int r = 30; r <= 90; ++r)
        for (int c = 40; c <= 80; ++c) {
            const double dr = (r - 60) / 30.0, dc = (c - 60) / 20.0;
            if (dr * dr + dc * dc <= 1.0)
                for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = 210;
        }
    for (int r = 0; r < 120; r += 7)
        img.at(r, 5, 0) = 3;  // faint noise below threshold
    PreprocessPolicy policy;
    const Image out = candling::preprocess(img, policy);
    const int corner_sum = out.at(0, 0, 0) + out.at(0, out.width - 1, 1) +
                           out.at(out.height - 1, 0, 2);
    REQUIRE(corner_sum == 0);
}

TEST_CASE("policy validation") {
    PreprocessPolicy p;
    p.crop_margin_fraction = 0.7;
    REQUIRE_THROWS_AS(p.validate(), candling::ConfigError);
    p = PreprocessPolicy{};
    p.target_height = 0;
    REQUIRE_THROWS_AS(p.validate(), candling::ConfigError);
}
