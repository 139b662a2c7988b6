// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_IMAGE_IO_HPP
#define CANDLING_IMAGE_IO_HPP

#include <filesystem>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "candling/errors.hpp"
#include "candling/image.hpp"

namespace candling {

// File decode/encode is delegated to OpenCV imgcodecs; pixels are converted
// to this library's RGB-interleaved Image at the boundary so nothing else
// depends on cv::Mat.

inline Image read_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        throw IoError("no such file: " + path.string());
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw DecodeError("cannot decode " + path.string());
    Image out(bgr.rows, bgr.cols, 3);
    for (int r = 0; r < bgr.rows; ++r) {
        const auto* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < bgr.cols; ++c) {
            out.at(r, c, 0) = row[c][2];
            out.at(r, c, 1) = row[c][1];
            out.at(r, c, 2) = row[c][0];
        }
    }
    return out;
}

inline void write_image(const std::filesystem::path& path, const Image& img) {
    if (img.empty()) throw IoError("refusing to write empty image");
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int r = 0; r < img.height; ++r) {
        auto* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < img.width; ++c) {
            const int ch = img.channels;
            const std::uint8_t red = img.at(r, c, 0);
            const std::uint8_t green = ch > 1 ? img.at(r, c, 1) : red;
            const std::uint8_t blue = ch > 2 ? img.at(r, c, 2) : red;
            row[c] = cv::Vec3b(blue, green, red);
        }
    }
    // Fixed compression level keeps reruns byte-identical.
    std::vector<int> params;
    if (path.extension() == ".png")
        params = {cv::IMWRITE_PNG_COMPRESSION, 3};
    if (!cv::imwrite(path.string(), bgr, params))
        throw IoError("cannot write " + path.string());
}

}  // namespace candling

#endif  // CANDLING_IMAGE_IO_HPP
