// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_PREPROCESS_HPP
#define CANDLING_PREPROCESS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "candling/errors.hpp"
#include "candling/image.hpp"

namespace candling {

enum class ThresholdMethod { otsu, fixed };

struct PreprocessPolicy {
    ThresholdMethod segmentation_threshold_method = ThresholdMethod::otsu;
    int fixed_threshold = 16;
    double crop_margin_fraction = 0.05;
    int target_height = 256;
    int target_width = 256;

    void validate() const {
        if (crop_margin_fraction < 0.0 || crop_margin_fraction > 0.5)
            throw ConfigError("crop margin must lie in [0, 0.5]");
        if (target_height <= 0 || target_width <= 0)
            throw ConfigError("target size must be positive");
        if (fixed_threshold < 0 || fixed_threshold > 255)
            throw ConfigError("fixed threshold must lie in [0, 255]");
    }
};

/// Inclusive pixel rectangle.
struct Box {
    int r0 = 0, c0 = 0, r1 = -1, c1 = -1;
    int height() const { return r1 - r0 + 1; }
    int width() const { return c1 - c0 + 1; }
    bool valid() const { return r1 >= r0 && c1 >= c0; }
};

/// Otsu's threshold over a 256-bin histogram (maximum between-class
/// variance; ties resolve to the lowest bin).
inline int otsu_threshold(const std::array<std::int64_t, 256>& hist) {
    std::int64_t total = 0;
    double weighted_total = 0.0;
    for (int i = 0; i < 256; ++i) {
        total += hist[i];
        weighted_total += static_cast<double>(i) * hist[i];
    }
    if (total == 0) return 0;
    std::int64_t w0 = 0;
    double sum0 = 0.0, best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        if (w0 == 0) continue;
        const std::int64_t w1 = total - w0;
        if (w1 == 0) break;
        sum0 += static_cast<double>(t) * hist[t];
        const double mu0 = sum0 / w0;
        const double mu1 = (weighted_total - sum0) / w1;
        const double between =
            static_cast<double>(w0) * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

namespace detail {

inline std::array<std::int64_t, 256> luminance_histogram(const Image& lum) {
    std::array<std::int64_t, 256> hist{};
    for (auto v : lum.data) ++hist[v];
    return hist;
}

// Largest 4-connected component of lum > threshold, by pixel count; equal
// sizes resolve to the earliest component in scan order.
inline Box largest_bright_component(const Image& lum, int threshold) {
    const int h = lum.height, w = lum.width;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(h) * w, 0);
    std::vector<int> stack;
    Box best;
    std::int64_t best_size = 0;
    for (int sr = 0; sr < h; ++sr) {
        for (int sc = 0; sc < w; ++sc) {
            const int start = sr * w + sc;
            if (visited[start] || lum.data[start] <= threshold) continue;
            Box box{sr, sc, sr, sc};
            std::int64_t size = 0;
            stack.assign(1, start);
            visited[start] = 1;
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int r = idx / w, c = idx % w;
                ++size;
                box.r0 = std::min(box.r0, r);
                box.r1 = std::max(box.r1, r);
                box.c0 = std::min(box.c0, c);
                box.c1 = std::max(box.c1, c);
                const int nbr[4][2] = {{r - 1, c}, {r + 1, c},
                                       {r, c - 1}, {r, c + 1}};
                for (const auto& n : nbr) {
                    if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w)
                        continue;
                    const int nidx = n[0] * w + n[1];
                    if (!visited[nidx] && lum.data[nidx] > threshold) {
                        visited[nidx] = 1;
                        stack.push_back(nidx);
                    }
                }
            }
            if (size > best_size) {
                best_size = size;
                best = box;
            }
        }
    }
    return best;
}

// Zeroes every background pixel reachable from the border without crossing
// the threshold; dark regions enclosed by the egg stay untouched.
inline void zero_border_connected_background(Image& img, const Image& lum,
                                             int threshold) {
    const int h = img.height, w = img.width;
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(h) * w, 0);
    std::vector<int> stack;
    auto push = [&](int r, int c) {
        const int idx = r * w + c;
        if (!mark[idx] && lum.data[idx] <= threshold) {
            mark[idx] = 1;
            stack.push_back(idx);
        }
    };
    for (int c = 0; c < w; ++c) {
        push(0, c);
        push(h - 1, c);
    }
    for (int r = 0; r < h; ++r) {
        push(r, 0);
        push(r, w - 1);
    }
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int r = idx / w, c = idx % w;
        if (r > 0) push(r - 1, c);
        if (r + 1 < h) push(r + 1, c);
        if (c > 0) push(r, c - 1);
        if (c + 1 < w) push(r, c + 1);
    }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (mark[r * w + c])
                for (int ch = 0; ch < img.channels; ++ch)
                    img.at(r, c, ch) = 0;
}

}  // namespace detail

/// Resolves the segmentation threshold for an image under a policy.
inline int segmentation_threshold(const Image& lum,
                                  const PreprocessPolicy& policy) {
    if (policy.segmentation_threshold_method == ThresholdMethod::fixed)
        return policy.fixed_threshold;
    return otsu_threshold(detail::luminance_histogram(lum));
}

/// The egg bounding box (largest bright component) with margin applied,
/// clamped to the frame. Throws NoEggFound when nothing exceeds threshold.
inline Box egg_bounding_box(const Image& lum, int threshold, double margin) {
    Box box = detail::largest_bright_component(lum, threshold);
    if (!box.valid())
        throw NoEggFoundError("no pixel above threshold " +
                              std::to_string(threshold));
    const int mr = static_cast<int>(std::lround(margin * box.height()));
    const int mc = static_cast<int>(std::lround(margin * box.width()));
    box.r0 = std::max(0, box.r0 - mr);
    box.c0 = std::max(0, box.c0 - mc);
    box.r1 = std::min(lum.height - 1, box.r1 + mr);
    box.c1 = std::min(lum.width - 1, box.c1 + mc);
    return box;
}

/**
 * @brief Segment, crop, and resize one candling frame.
 *
 * Steps: luminance threshold (Otsu by default), largest bright component,
 * bounding box plus margin, zero the border-connected background, crop,
 * resize to target. When the margined box already reaches (close to) every
 * frame edge, the function degenerates to a plain resize of the whole frame;
 * that makes the operation idempotent, since its own output always
 * re-detects as an edge-to-edge egg.
 */
inline Image preprocess(const Image& img, const PreprocessPolicy& policy) {
    policy.validate();
    if (img.empty()) throw EmptyInputError("preprocess of empty image");
    if (img.channels != 3)
        throw InputShapeError("preprocess expects a 3-channel image");

    const Image lum = to_luminance(img);
    const int thr = segmentation_threshold(lum, policy);
    const Box box = egg_bounding_box(lum, thr, policy.crop_margin_fraction);

    const int snap_r = std::max(4, static_cast<int>(std::lround(
                                       0.02 * img.height)));
    const int snap_c = std::max(4, static_cast<int>(std::lround(
                                       0.02 * img.width)));
    const bool spans_frame = box.r0 <= snap_r && box.c0 <= snap_c &&
                             img.height - 1 - box.r1 <= snap_r &&
                             img.width - 1 - box.c1 <= snap_c;
    if (spans_frame)
        return resize_bilinear(img, policy.target_height, policy.target_width);

    Image work = img;
    detail::zero_border_connected_background(work, lum, thr);
    Image cropped = crop(work, box.r0, box.c0, box.height(), box.width());
    return resize_bilinear(cropped, policy.target_height, policy.target_width);
}

}  // namespace candling

#endif  // CANDLING_PREPROCESS_HPP
