// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_ERRORS_HPP
#define CANDLING_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace candling {

// Base class for every error thrown by this library. Each subclass maps to
// one failure family so callers (and the CLI) can translate to exit codes
// without string matching.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration file, unknown key, out-of-range value, bad CLI usage.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

// Filesystem trouble: unreadable input, unwritable output directory.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io: " + msg) {}
};

// A raster file exists but cannot be decoded.
class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& msg) : Error("decode: " + msg) {}
};

// A sample's label is missing or not one of the known class names.
class LabelError : public Error {
public:
    explicit LabelError(const std::string& msg) : Error("label: " + msg) {}
};

// Ingest found no usable samples under the data root.
class NoSamplesError : public Error {
public:
    explicit NoSamplesError(const std::string& msg) : Error("ingest: " + msg) {}
};

// Segmentation could not locate an egg region in the frame.
class NoEggFoundError : public Error {
public:
    explicit NoEggFoundError(const std::string& msg)
        : Error("preprocess: " + msg) {}
};

// Transform parameters outside their valid domain (shear >= 90 degrees,
// non-positive scale factor, out-of-range translation).
class InvalidTransformError : public Error {
public:
    explicit InvalidTransformError(const std::string& msg)
        : Error("transform: " + msg) {}
};

// A train fraction that leaves the train or test side empty.
class InvalidSplitError : public Error {
public:
    explicit InvalidSplitError(const std::string& msg)
        : Error("split: " + msg) {}
};

// Fold count outside [2, |train|].
class InvalidFoldCountError : public Error {
public:
    explicit InvalidFoldCountError(const std::string& msg)
        : Error("folds: " + msg) {}
};

// Parallel lists of different lengths, or a score outside [0, 1].
class InputMismatchError : public Error {
public:
    explicit InputMismatchError(const std::string& msg)
        : Error("metrics: " + msg) {}
};

// Metric computation over empty label/prediction lists.
class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& msg)
        : Error("metrics: " + msg) {}
};

// Batch fed to a model whose input dimensions do not match.
class InputShapeError : public Error {
public:
    explicit InputShapeError(const std::string& msg)
        : Error("model: " + msg) {}
};

// Pretrained weights are required but absent (offline, cache miss).
class WeightsUnavailableError : public Error {
public:
    explicit WeightsUnavailableError(const std::string& msg)
        : Error("weights: " + msg) {}
};

// A pipeline stage needs an artifact an earlier stage did not produce.
class MissingArtifactError : public Error {
public:
    explicit MissingArtifactError(const std::string& msg)
        : Error("artifact: " + msg) {}
};

// Loss went non-finite during training; message carries the last good epoch.
class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(const std::string& msg, int last_good_epoch)
        : Error("training: " + msg), last_good_epoch(last_good_epoch) {}
    int last_good_epoch;
};

// Hyperparameter search invoked with an empty grid.
class EmptyGridError : public Error {
public:
    explicit EmptyGridError(const std::string& msg) : Error("tune: " + msg) {}
};

}  // namespace candling

#endif  // CANDLING_ERRORS_HPP
