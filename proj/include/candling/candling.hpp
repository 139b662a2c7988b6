// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_CANDLING_HPP
#define CANDLING_CANDLING_HPP

/// Umbrella header pulling in the whole library.

#include "candling/augment.hpp"
#include "candling/config.hpp"
#include "candling/dataset.hpp"
#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/image_io.hpp"
#include "candling/label.hpp"
#include "candling/metrics.hpp"
#include "candling/model_zoo.hpp"
#include "candling/nn.hpp"
#include "candling/preprocess.hpp"
#include "candling/reporting.hpp"
#include "candling/rng.hpp"
#include "candling/synthetic.hpp"
#include "candling/tensor.hpp"
#include "candling/trainer.hpp"

#endif  // CANDLING_CANDLING_HPP
