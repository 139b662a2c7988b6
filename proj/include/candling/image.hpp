// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_IMAGE_HPP
#define CANDLING_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "candling/errors.hpp"

namespace candling {

/// Dense 8-bit image, row-major, interleaved channels (RGB order when 3).
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int h, int w, int c, std::uint8_t fill = 0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {}

    std::uint8_t& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    std::uint8_t at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * width;
    }
};

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

/// Rec.601 luma of one pixel.
inline double pixel_luminance(const Image& img, int r, int c) {
    if (img.channels == 1) return img.at(r, c, 0);
    return 0.299 * img.at(r, c, 0) + 0.587 * img.at(r, c, 1) +
           0.114 * img.at(r, c, 2);
}

/// Collapses to a single-channel luminance image (rounded to nearest).
inline Image to_luminance(const Image& img) {
    Image out(img.height, img.width, 1);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            out.at(r, c, 0) = clamp_u8(std::round(pixel_luminance(img, r, c)));
    return out;
}

/**
 * @brief Bilinear sample of one channel at a real-valued location.
 *
 * (y, x) are pixel-center coordinates; anything outside the frame reads as
 * `fill`. Used by the resize below and by every affine warp, so all
 * resampling in the library shares one interpolation definition.
 */
inline double sample_bilinear(const Image& img, double y, double x, int ch,
                              double fill = 0.0) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto tap = [&](int yy, int xx) -> double {
        if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width)
            return fill;
        return img.at(yy, xx, ch);
    };
    const double top = tap(y0, x0) * (1.0 - fx) + tap(y0, x0 + 1) * fx;
    const double bot = tap(y0 + 1, x0) * (1.0 - fx) + tap(y0 + 1, x0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

/// Bilinear resize with half-pixel-aligned centers and edge clamping.
inline Image resize_bilinear(const Image& img, int out_h, int out_w) {
    if (img.empty()) throw IoError("resize of empty image");
    if (out_h <= 0 || out_w <= 0) throw ConfigError("resize to empty size");
    if (out_h == img.height && out_w == img.width) return img;
    Image out(out_h, out_w, img.channels);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int r = 0; r < out_h; ++r) {
        // Half-pixel alignment, clamped so edge rows do not blend with fill.
        double y = (r + 0.5) * sy - 0.5;
        y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
        for (int c = 0; c < out_w; ++c) {
            double x = (c + 0.5) * sx - 0.5;
            x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) =
                    clamp_u8(std::round(sample_bilinear(img, y, x, ch)));
        }
    }
    return out;
}

/// Crop to [r0, r0+h) x [c0, c0+w); the window must lie inside the frame.
inline Image crop(const Image& img, int r0, int c0, int h, int w) {
    if (r0 < 0 || c0 < 0 || h <= 0 || w <= 0 || r0 + h > img.height ||
        c0 + w > img.width)
        throw ConfigError("crop window outside image");
    Image out(h, w, img.channels);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = img.at(r0 + r, c0 + c, ch);
    return out;
}

}  // namespace candling

#endif  // CANDLING_IMAGE_HPP
