#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace t1forge {

/// Closed set of failure kinds raised by the library.
enum class ErrorCode {
    InvalidArgument,
    IoError,
    // parsing
    BadMagic,
    UnsupportedDatatype,
    TruncatedFile,
    GzipUnsupported,
    SliceOutOfRange,
    FormatError,
    DimensionMismatch,
    // morphology / geometry
    EmptyInput,
    GeometryInfeasible,
    // segmentation
    DegenerateImage,
    NoFit,
    // regions
    EmptyRegion,
    EmptyROI,
    NoJunctions,
    SingleCluster,
    DegenerateCentroid,
    // qc / statistics
    OneClassOnly,
    NonFiniteFeature,
    ConstantPredictor,
    TooFewSubjects,
    UnitMismatch,
    LengthMismatch,
    TooFew,
    ConstantSeries,
    ZeroVariance,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace t1forge
