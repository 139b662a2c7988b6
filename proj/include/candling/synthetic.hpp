// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_SYNTHETIC_HPP
#define CANDLING_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "candling/dataset.hpp"
#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/image_io.hpp"
#include "candling/rng.hpp"

namespace candling {

/**
 * @brief Recipe for a deterministic stand-in dataset.
 *
 * Every image is a warm anti-aliased shell glow on black. Fertile images
 * add a darker embryo blob with vessel polylines; infertile ones keep a
 * featureless interior. Fertile/infertile pairs at the same index share
 * identical shell geometry, so the fertile member is strictly darker inside.
 */
struct SyntheticSpec {
    int n_fertile = 100;
    int n_infertile = 100;
    int height = 256;
    int width = 256;
    std::uint64_t seed = 7;
    double embryo_intensity_drop = 0.45;
    int vessel_count_min = 2;
    int vessel_count_max = 5;

    void validate() const {
        if (n_fertile < 0 || n_infertile < 0)
            throw ConfigError("synthetic counts must be nonnegative");
        if (height < 64 || width < 64)
            throw ConfigError("synthetic size must be at least 64x64");
        if (embryo_intensity_drop < 0.0 || embryo_intensity_drop >= 1.0)
            throw ConfigError("embryo intensity drop must lie in [0, 1)");
        if (vessel_count_min < 0 || vessel_count_max < vessel_count_min)
            throw ConfigError("vessel count range invalid");
    }
};

namespace detail {

struct ShellGeometry {
    double cx, cy;  // center
    double a, b;    // semi-axes (x, y)
};

inline ShellGeometry sample_shell(Rng& rng, int h, int w) {
    ShellGeometry g;
    g.cx = w * (0.5 + rng.uniform(-0.03, 0.03));
    g.cy = h * (0.5 + rng.uniform(-0.03, 0.03));
    g.a = w * rng.uniform(0.30, 0.36);
    g.b = h * rng.uniform(0.38, 0.44);
    return g;
}

// Multiplicative darkening field for embryo + vessels; min-combined so
// overlapping strokes never compound toward black.
class DarkenField {
public:
    DarkenField(int h, int w) : h_(h), w_(w),
        factor_(static_cast<std::size_t>(h) * w, 1.0f) {}

    void darken_disk(double cx, double cy, double radius, double strength) {
        const int r0 = std::max(0, static_cast<int>(cy - radius - 2));
        const int r1 = std::min(h_ - 1, static_cast<int>(cy + radius + 2));
        const int c0 = std::max(0, static_cast<int>(cx - radius - 2));
        const int c1 = std::min(w_ - 1, static_cast<int>(cx + radius + 2));
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                const double d = std::hypot(c - cx, r - cy);
                const double s = std::clamp(radius - d + 0.5, 0.0, 1.0);
                if (s <= 0.0) continue;
                const float f = static_cast<float>(1.0 - strength * s);
                float& cell = factor_[static_cast<std::size_t>(r) * w_ + c];
                cell = std::min(cell, f);
            }
        }
    }

    float at(int r, int c) const {
        return factor_[static_cast<std::size_t>(r) * w_ + c];
    }

private:
    int h_, w_;
    std::vector<float> factor_;
};

inline void draw_vessel(DarkenField& field, const ShellGeometry& shell,
                        Rng& rng, double start_x, double start_y,
                        double heading, double length, double strength,
                        int depth) {
    double x = start_x, y = start_y;
    const double step = 1.5;
    const int steps = std::max(1, static_cast<int>(length / step));
    const int branch_at = depth > 0 ? steps * 55 / 100 : -1;
    for (int i = 0; i < steps; ++i) {
        heading += rng.uniform(-0.22, 0.22);
        x += step * std::cos(heading);
        y += step * std::sin(heading);
        const double rx = (x - shell.cx) / shell.a;
        const double ry = (y - shell.cy) / shell.b;
        if (rx * rx + ry * ry > 0.94) break;  // stay inside the glow
        const double taper =
            1.8 - 0.8 * static_cast<double>(i) / std::max(1, steps - 1);
        field.darken_disk(x, y, taper, strength);
        if (i == branch_at) {
            const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
            const double fork = heading + side * rng.uniform(0.45, 0.95);
            draw_vessel(field, shell, rng, x, y, fork, length * 0.45,
                        strength, depth - 1);
        }
    }
}

inline Image render_candling_image(const SyntheticSpec& spec,
                                   std::uint64_t index, bool fertile) {
    const int h = spec.height, w = spec.width;
    Rng geom_rng(derive_seed(spec.seed, "geometry", index));
    const ShellGeometry shell = sample_shell(geom_rng, h, w);

    DarkenField field(h, w);
    if (fertile) {
        Rng embryo_rng(derive_seed(spec.seed, "embryo", index));
        const double ex =
            shell.cx + embryo_rng.uniform(-0.35, 0.35) * shell.a;
        const double ey =
            shell.cy + embryo_rng.uniform(-0.35, 0.35) * shell.b;
        const double rho =
            embryo_rng.uniform(0.22, 0.33) * std::min(shell.a, shell.b);
        field.darken_disk(ex, ey, rho, spec.embryo_intensity_drop);

        const int vessels = static_cast<int>(embryo_rng.uniform_int(
            spec.vessel_count_min, spec.vessel_count_max));
        const double vessel_strength = 0.55 * spec.embryo_intensity_drop;
        for (int v = 0; v < vessels; ++v) {
            const double heading = embryo_rng.uniform(0.0, 6.283185307179586);
            const double length =
                embryo_rng.uniform(0.5, 0.9) * std::min(shell.a, shell.b);
            draw_vessel(field, shell, embryo_rng, ex, ey, heading, length,
                        vessel_strength, 1);
        }
    }

    Image img(h, w, 3);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double rx = (c - shell.cx) / shell.a;
            const double ry = (r - shell.cy) / shell.b;
            const double rr = rx * rx + ry * ry;
            // One-pixel anti-aliasing ramp against the black background.
            const double dist_to_edge =
                (1.0 - std::sqrt(std::max(rr, 0.0))) *
                std::min(shell.a, shell.b);
            const double alpha = std::clamp(dist_to_edge + 0.5, 0.0, 1.0);
            if (alpha <= 0.0) continue;
            const double glow = 135.0 + 120.0 * std::max(0.0, 1.0 - rr);
            // Embryo/vessel darkening applies to fully interior pixels only,
            // so the anti-aliased rim of a fertile/infertile pair is
            // identical and no dim rim pixel can round to zero.
            const double factor = alpha >= 1.0 ? field.at(r, c) : 1.0;
            const double lum = alpha * glow * factor;
            img.at(r, c, 0) = clamp_u8(std::round(lum));
            img.at(r, c, 1) = clamp_u8(std::round(lum * 0.72));
            img.at(r, c, 2) = clamp_u8(std::round(lum * 0.38));
        }
    }
    return img;
}

inline std::string index_name(const char* stem, int index, int count) {
    int width = 3;
    for (int v = count - 1; v >= 1000; v /= 10) ++width;
    std::string digits = std::to_string(index);
    std::string out(stem);
    out += '_';
    out.append(static_cast<std::size_t>(width) - std::min<std::size_t>(
                   width, digits.size()), '0');
    out += digits;
    return out;
}

}  // namespace detail

/// Renders one synthetic frame without touching the filesystem.
inline Image synthesize_image(const SyntheticSpec& spec, int index,
                              Label label) {
    spec.validate();
    return detail::render_candling_image(
        spec, static_cast<std::uint64_t>(index), label == Label::fertile);
}

/**
 * @brief Writes the full synthetic dataset under out_dir.
 *
 * Layout: out_dir/fertile/fertile_NNN.png and
 * out_dir/infertile/infertile_NNN.png. Reruns with an equal spec produce
 * byte-identical files. Returns the corresponding unsplit manifest.
 */
inline DatasetManifest generate_synthetic(
    const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    DatasetManifest manifest;
    manifest.seed = spec.seed;
    if (spec.n_fertile + spec.n_infertile == 0) return manifest;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());

    auto emit = [&](Label label, int count) {
        const char* stem = label == Label::fertile ? "fertile" : "infertile";
        for (int i = 0; i < count; ++i) {
            const std::string name = detail::index_name(stem, i, count);
            const auto rel =
                std::filesystem::path(stem) / (name + ".png");
            const auto full = out_dir / rel;
            write_image(full, synthesize_image(spec, i, label));
            ImageSample s;
            s.id = (std::filesystem::path(stem) / name).generic_string();
            s.path = full.generic_string();
            s.label = label;
            manifest.samples.push_back(std::move(s));
        }
    };
    emit(Label::fertile, spec.n_fertile);
    emit(Label::infertile, spec.n_infertile);
    return manifest;
}

}  // namespace candling

#endif  // CANDLING_SYNTHETIC_HPP
