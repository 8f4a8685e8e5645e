#include "nctf/error.hpp"

namespace nctf {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptHeader: return "CorruptHeader";
    case Errc::IoFailure: return "IoFailure";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::SampleRateMismatch: return "SampleRateMismatch";
    case Errc::SignalTooShort: return "SignalTooShort";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateFirstColumn: return "DegenerateFirstColumn";
    case Errc::InvalidRank: return "InvalidRank";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::InsufficientFrames: return "InsufficientFrames";
    case Errc::NegativeArgument: return "NegativeArgument";
    case Errc::InvalidWeight: return "InvalidWeight";
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace nctf
