// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_AUGMENT_HPP
#define CANDLING_AUGMENT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/rng.hpp"

namespace candling {

/**
 * @brief Ranges and switches for the five training-time transforms.
 *
 * Defaults: rotation and shear +/-5 degrees, both reflections enabled,
 * scale [0.9, 1.1], translation +/-5% of the dimension, black fill.
 */
struct AugmentationPolicy {
    std::pair<double, double> rotation_range_deg{-5.0, 5.0};
    bool x_reflection = true;
    bool y_reflection = true;
    std::pair<double, double> shear_range_deg{-5.0, 5.0};
    std::pair<double, double> scale_range{0.9, 1.1};
    std::pair<double, double> translation_range_frac{-0.05, 0.05};
    std::uint8_t fill_value = 0;

    void validate() const {
        auto ordered = [](const std::pair<double, double>& r) {
            return r.first <= r.second;
        };
        if (!ordered(rotation_range_deg) || !ordered(shear_range_deg) ||
            !ordered(scale_range) || !ordered(translation_range_frac))
            throw ConfigError("augment range has min > max");
        if (scale_range.first <= 0.0)
            throw ConfigError("augment scale range must be positive");
        if (translation_range_frac.first < -0.5 ||
            translation_range_frac.second > 0.5)
            throw ConfigError("augment translation fraction outside [-0.5, 0.5]");
    }

    static AugmentationPolicy identity() {
        AugmentationPolicy p;
        p.rotation_range_deg = {0.0, 0.0};
        p.x_reflection = false;
        p.y_reflection = false;
        p.shear_range_deg = {0.0, 0.0};
        p.scale_range = {1.0, 1.0};
        p.translation_range_frac = {0.0, 0.0};
        return p;
    }
};

/// One concrete draw from the policy. Applied flip -> rotate -> shear ->
/// rescale -> translate, always in that order.
struct TransformInstance {
    double rotation_deg = 0.0;
    bool flip_x = false;
    bool flip_y = false;
    double shear_x_deg = 0.0;
    double shear_y_deg = 0.0;
    double scale = 1.0;
    double translate_x_px = 0.0;
    double translate_y_px = 0.0;

    bool is_identity() const {
        return rotation_deg == 0.0 && !flip_x && !flip_y &&
               shear_x_deg == 0.0 && shear_y_deg == 0.0 && scale == 1.0 &&
               translate_x_px == 0.0 && translate_y_px == 0.0;
    }
};

enum class FlipAxis { horizontal, vertical };

/// Exact mirror; horizontal maps column c to W-1-c, vertical row r to H-1-r.
inline Image flip(const Image& img, FlipAxis axis) {
    if (img.empty()) throw EmptyInputError("flip of empty image");
    Image out(img.height, img.width, img.channels);
    for (int r = 0; r < img.height; ++r) {
        const int sr = axis == FlipAxis::vertical ? img.height - 1 - r : r;
        for (int c = 0; c < img.width; ++c) {
            const int sc = axis == FlipAxis::horizontal ? img.width - 1 - c : c;
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = img.at(sr, sc, ch);
        }
    }
    return out;
}

namespace detail {

// 2x3 affine, forward convention: (x', y') = A (x, y) + t with coordinates
// relative to the image center.
struct Affine {
    double a = 1, b = 0, c = 0, d = 1;  // A = [a b; c d]
    double tx = 0, ty = 0;

    static Affine identity() { return {}; }

    // this applied after m (this ∘ m).
    Affine after(const Affine& m) const {
        Affine r;
        r.a = a * m.a + b * m.c;
        r.b = a * m.b + b * m.d;
        r.c = c * m.a + d * m.c;
        r.d = c * m.b + d * m.d;
        r.tx = a * m.tx + b * m.ty + tx;
        r.ty = c * m.tx + d * m.ty + ty;
        return r;
    }

    bool is_identity() const {
        return a == 1 && b == 0 && c == 0 && d == 1 && tx == 0 && ty == 0;
    }

    Affine inverse() const {
        const double det = a * d - b * c;
        if (det == 0.0) throw InvalidTransformError("singular affine");
        Affine r;
        r.a = d / det;
        r.b = -b / det;
        r.c = -c / det;
        r.d = a / det;
        r.tx = -(r.a * tx + r.b * ty);
        r.ty = -(r.c * tx + r.d * ty);
        return r;
    }
};

inline Affine rotation_affine(double deg) {
    const double rad = deg * 3.14159265358979323846 / 180.0;
    Affine m;
    m.a = std::cos(rad);
    m.b = -std::sin(rad);
    m.c = std::sin(rad);
    m.d = std::cos(rad);
    return m;
}

inline Affine shear_affine(double x_deg, double y_deg) {
    Affine m;
    m.b = std::tan(x_deg * 3.14159265358979323846 / 180.0);
    m.c = std::tan(y_deg * 3.14159265358979323846 / 180.0);
    return m;
}

inline Affine scale_affine(double s) {
    Affine m;
    m.a = s;
    m.d = s;
    return m;
}

inline Affine translate_affine(double dx, double dy) {
    Affine m;
    m.tx = dx;
    m.ty = dy;
    return m;
}

// Inverse-maps every output pixel through the forward transform, sampling
// bilinearly; out-of-frame reads fill.
inline Image warp_affine(const Image& img, const Affine& fwd,
                         std::uint8_t fill) {
    const Affine inv = fwd.inverse();
    const double cx = (img.width - 1) * 0.5;
    const double cy = (img.height - 1) * 0.5;
    Image out(img.height, img.width, img.channels);
    for (int r = 0; r < img.height; ++r) {
        const double y = r - cy;
        for (int c = 0; c < img.width; ++c) {
            const double x = c - cx;
            const double sx = inv.a * x + inv.b * y + inv.tx + cx;
            const double sy = inv.c * x + inv.d * y + inv.ty + cy;
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = clamp_u8(std::round(
                    sample_bilinear(img, sy, sx, ch, fill)));
        }
    }
    return out;
}

}  // namespace detail

/// Rotation about the image center; canvas size unchanged, corners filled.
inline Image rotate(const Image& img, double angle_deg,
                    std::uint8_t fill = 0) {
    if (img.empty()) throw EmptyInputError("rotate of empty image");
    if (!std::isfinite(angle_deg))
        throw InvalidTransformError("non-finite rotation angle");
    if (angle_deg == 0.0) return img;
    return detail::warp_affine(img, detail::rotation_affine(angle_deg), fill);
}

/// Shear about the center; shear_x displaces columns proportionally to the
/// row offset, shear_y the transpose. Degenerate at 90 degrees.
inline Image shear(const Image& img, double shear_x_deg, double shear_y_deg,
                   std::uint8_t fill = 0) {
    if (img.empty()) throw EmptyInputError("shear of empty image");
    if (!std::isfinite(shear_x_deg) || !std::isfinite(shear_y_deg) ||
        std::abs(shear_x_deg) >= 90.0 || std::abs(shear_y_deg) >= 90.0)
        throw InvalidTransformError("shear angle must satisfy |a| < 90");
    if (shear_x_deg == 0.0 && shear_y_deg == 0.0) return img;
    return detail::warp_affine(
        img, detail::shear_affine(shear_x_deg, shear_y_deg), fill);
}

/// Scales content about the center onto an unchanged canvas: factor > 1
/// crops, factor < 1 leaves a filled border.
inline Image rescale(const Image& img, double factor, std::uint8_t fill = 0) {
    if (img.empty()) throw EmptyInputError("rescale of empty image");
    if (!std::isfinite(factor) || factor <= 0.0)
        throw InvalidTransformError("rescale factor must be positive");
    if (factor == 1.0) return img;
    return detail::warp_affine(img, detail::scale_affine(factor), fill);
}

/// Shifts content by (dx, dy) pixels; right/down positive. Integral offsets
/// copy exactly, fractional ones resample.
inline Image translate(const Image& img, double dx_px, double dy_px,
                       std::uint8_t fill = 0) {
    if (img.empty()) throw EmptyInputError("translate of empty image");
    if (!std::isfinite(dx_px) || !std::isfinite(dy_px) ||
        std::abs(dx_px) > img.width * 0.5 || std::abs(dy_px) > img.height * 0.5)
        throw InvalidTransformError("translation beyond half the dimension");
    if (dx_px == 0.0 && dy_px == 0.0) return img;
    if (dx_px == std::floor(dx_px) && dy_px == std::floor(dy_px)) {
        const int dx = static_cast<int>(dx_px);
        const int dy = static_cast<int>(dy_px);
        Image out(img.height, img.width, img.channels, fill);
        for (int r = 0; r < img.height; ++r) {
            const int sr = r - dy;
            if (sr < 0 || sr >= img.height) continue;
            for (int c = 0; c < img.width; ++c) {
                const int sc = c - dx;
                if (sc < 0 || sc >= img.width) continue;
                for (int ch = 0; ch < img.channels; ++ch)
                    out.at(r, c, ch) = img.at(sr, sc, ch);
            }
        }
        return out;
    }
    return detail::warp_affine(img, detail::translate_affine(dx_px, dy_px),
                               fill);
}

/// Draws one TransformInstance from the policy. Translation fractions are
/// resolved against the given image dimensions and rounded to whole pixels.
inline TransformInstance sample_transform(const AugmentationPolicy& policy,
                                          Rng& rng, int height, int width) {
    TransformInstance t;
    t.flip_x = policy.x_reflection && rng.bernoulli(0.5);
    t.flip_y = policy.y_reflection && rng.bernoulli(0.5);
    t.rotation_deg = rng.uniform(policy.rotation_range_deg.first,
                                 policy.rotation_range_deg.second);
    t.shear_x_deg = rng.uniform(policy.shear_range_deg.first,
                                policy.shear_range_deg.second);
    t.shear_y_deg = rng.uniform(policy.shear_range_deg.first,
                                policy.shear_range_deg.second);
    t.scale = rng.uniform(policy.scale_range.first, policy.scale_range.second);
    t.translate_x_px = std::round(
        rng.uniform(policy.translation_range_frac.first,
                    policy.translation_range_frac.second) * width);
    t.translate_y_px = std::round(
        rng.uniform(policy.translation_range_frac.first,
                    policy.translation_range_frac.second) * height);
    return t;
}

/// Sequential sampler owning its stream; one per training worker.
class AugmentSampler {
public:
    AugmentSampler(AugmentationPolicy policy, std::uint64_t seed)
        : policy_(std::move(policy)), rng_(seed) {
        policy_.validate();
    }

    TransformInstance next(int height, int width) {
        return sample_transform(policy_, rng_, height, width);
    }

    const AugmentationPolicy& policy() const { return policy_; }

private:
    AugmentationPolicy policy_;
    Rng rng_;
};

/**
 * @brief Applies one instance: flip -> rotate -> shear -> rescale -> translate.
 *
 * Flips are applied as exact mirrors; the remaining four stages compose into
 * a single affine so the image is resampled at most once. An identity
 * instance returns the input untouched.
 */
inline Image apply(const Image& img, const TransformInstance& t,
                   std::uint8_t fill = 0) {
    if (img.empty()) throw EmptyInputError("apply on empty image");
    Image base = img;
    if (t.flip_x) base = flip(base, FlipAxis::horizontal);
    if (t.flip_y) base = flip(base, FlipAxis::vertical);

    detail::Affine m = detail::rotation_affine(t.rotation_deg);
    if (!std::isfinite(t.rotation_deg))
        throw InvalidTransformError("non-finite rotation angle");
    if (std::abs(t.shear_x_deg) >= 90.0 || std::abs(t.shear_y_deg) >= 90.0)
        throw InvalidTransformError("shear angle must satisfy |a| < 90");
    if (!(t.scale > 0.0))
        throw InvalidTransformError("rescale factor must be positive");
    if (std::abs(t.translate_x_px) > img.width * 0.5 ||
        std::abs(t.translate_y_px) > img.height * 0.5)
        throw InvalidTransformError("translation beyond half the dimension");
    m = detail::shear_affine(t.shear_x_deg, t.shear_y_deg).after(m);
    m = detail::scale_affine(t.scale).after(m);
    m = detail::translate_affine(t.translate_x_px, t.translate_y_px).after(m);

    if (m.is_identity()) return base;
    return detail::warp_affine(base, m, fill);
}

/// Tiles equally sized images into a cols-wide grid (for preview sheets).
inline Image contact_sheet(const std::vector<Image>& tiles, int cols,
                           int gap = 2) {
    if (tiles.empty()) throw EmptyInputError("contact sheet with no tiles");
    if (cols <= 0) throw ConfigError("contact sheet needs cols >= 1");
    const int th = tiles[0].height, tw = tiles[0].width;
    const int ch = tiles[0].channels;
    const int rows = (static_cast<int>(tiles.size()) + cols - 1) / cols;
    Image sheet(rows * th + (rows - 1) * gap, cols * tw + (cols - 1) * gap,
                ch);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (tiles[i].height != th || tiles[i].width != tw ||
            tiles[i].channels != ch)
            throw InputMismatchError("contact sheet tiles differ in shape");
        const int gr = static_cast<int>(i) / cols;
        const int gc = static_cast<int>(i) % cols;
        for (int r = 0; r < th; ++r)
            for (int c = 0; c < tw; ++c)
                for (int k = 0; k < ch; ++k)
                    sheet.at(gr * (th + gap) + r, gc * (tw + gap) + c, k) =
                        tiles[i].at(r, c, k);
    }
    return sheet;
}

}  // namespace candling

#endif  // CANDLING_AUGMENT_HPP
