#include "t1forge/error.hpp"

namespace t1forge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::GzipUnsupported: return "GzipUnsupported";
        case ErrorCode::SliceOutOfRange: return "SliceOutOfRange";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::GeometryInfeasible: return "GeometryInfeasible";
        case ErrorCode::DegenerateImage: return "DegenerateImage";
        case ErrorCode::NoFit: return "NoFit";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::EmptyROI: return "EmptyROI";
        case ErrorCode::NoJunctions: return "NoJunctions";
        case ErrorCode::SingleCluster: return "SingleCluster";
        case ErrorCode::DegenerateCentroid: return "DegenerateCentroid";
        case ErrorCode::OneClassOnly: return "OneClassOnly";
        case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorCode::ConstantPredictor: return "ConstantPredictor";
        case ErrorCode::TooFewSubjects: return "TooFewSubjects";
        case ErrorCode::UnitMismatch: return "UnitMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooFew: return "TooFew";
        case ErrorCode::ConstantSeries: return "ConstantSeries";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
    }
    return "Unknown";
}

}  // namespace t1forge
