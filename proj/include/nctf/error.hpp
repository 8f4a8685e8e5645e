#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nctf {

enum class Errc {
  UnsupportedFormat,
  CorruptHeader,
  IoFailure,
  NonFiniteSample,
  SampleRateMismatch,
  SignalTooShort,
  DimensionMismatch,
  DegenerateFirstColumn,
  InvalidRank,
  EmptyTrainingSet,
  InsufficientFrames,
  NegativeArgument,
  InvalidWeight,
  InvalidWindow,
  InvalidSpec,
  LengthMismatch,
  EmptyCorpus,
  InvalidConfig,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace nctf
