#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigver {

enum class ErrorCode {
  // raster
  MalformedHeader,
  UnsupportedFormat,
  TruncatedData,
  // preprocess
  DegenerateHistogram,
  EmptySignature,
  // features
  WrongDimensions,
  EmptyRegion,
  TooFewSamples,
  // ann
  NonFiniteInput,
  EmptyBatch,
  SingleClassData,
  BadMagic,
  DimensionMismatch,
  VersionUnsupported,
  // eval
  UnknownWriter,
  OneSidedTrials,
  // dataset
  EmptyCorpus,
  WriterWithoutGenuine,
  IOFailure,
  MalformedCsv,
  WrongColumnCount,
  // generic precondition violation
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sigver
