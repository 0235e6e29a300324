#include "sigver/error.hpp"

namespace sigver {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::DegenerateHistogram: return "DegenerateHistogram";
    case ErrorCode::EmptySignature: return "EmptySignature";
    case ErrorCode::WrongDimensions: return "WrongDimensions";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::UnknownWriter: return "UnknownWriter";
    case ErrorCode::OneSidedTrials: return "OneSidedTrials";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::WriterWithoutGenuine: return "WriterWithoutGenuine";
    case ErrorCode::IOFailure: return "IOFailure";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::WrongColumnCount: return "WrongColumnCount";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sigver
