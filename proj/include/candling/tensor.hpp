// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_TENSOR_HPP
#define CANDLING_TENSOR_HPP

#include <cstdint>
#include <numeric>
#include <vector>

#include "candling/errors.hpp"

namespace candling {

/// Dense row-major tensor of arbitrary rank. The scalar type is a template
/// parameter so the same graph code runs in float for training speed and in
/// double for finite-difference verification.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel(shape), T(0));
    }

    static std::size_t numel(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) {
            if (d < 0) throw ConfigError("negative tensor dimension");
            n *= static_cast<std::size_t>(d);
        }
        return s.empty() ? 0 : n;
    }

    std::size_t size() const { return data.size(); }

    void zero() { std::fill(data.begin(), data.end(), T(0)); }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }
};

}  // namespace candling

#endif  // CANDLING_TENSOR_HPP
