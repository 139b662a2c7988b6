// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_LABEL_HPP
#define CANDLING_LABEL_HPP

#include <string>
#include <string_view>

#include "candling/errors.hpp"

namespace candling {

/// The two target classes. Fertile is the positive class everywhere.
enum class Label { fertile, infertile };

inline std::string to_string(Label l) {
    return l == Label::fertile ? "fertile" : "infertile";
}

inline Label label_from_string(std::string_view s) {
    if (s == "fertile") return Label::fertile;
    if (s == "infertile") return Label::infertile;
    throw LabelError("unknown class name '" + std::string(s) + "'");
}

}  // namespace candling

#endif  // CANDLING_LABEL_HPP
