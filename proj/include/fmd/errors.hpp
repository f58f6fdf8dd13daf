#pragma once

#include <stdexcept>
#include <string>

namespace fmd {

enum class Errc {
  // SMF parsing / encoding
  MalformedHeader,
  TruncatedTrack,
  SmpteDivisionUnsupported,
  VariableLengthOverflow,
  UnsupportedFormat,
  MalformedEvent,
  FieldOutOfRange,
  // MTF
  UnsupportedVersion,
  MalformedLine,
  // embeddings
  EmptySong,
  BadMagic,
  DimMismatch,
  NonFiniteValue,
  DuplicateSongId,
  NoEmbeddableSongs,
  // estimators
  InsufficientSamples,
  AlphaOutOfRange,
  // frechet
  NotSymmetric,
  NotPsd,
  EigenFailure,
  NumericalFailure,
  TooFewSamples,
  // misc
  EmptyInput,
  BadPercent,
  IoError,
  InvalidArgument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedTrack: return "TruncatedTrack";
    case Errc::SmpteDivisionUnsupported: return "SmpteDivisionUnsupported";
    case Errc::VariableLengthOverflow: return "VariableLengthOverflow";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::MalformedEvent: return "MalformedEvent";
    case Errc::FieldOutOfRange: return "FieldOutOfRange";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::EmptySong: return "EmptySong";
    case Errc::BadMagic: return "BadMagic";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::DuplicateSongId: return "DuplicateSongId";
    case Errc::NoEmbeddableSongs: return "NoEmbeddableSongs";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPsd: return "NotPSD";
    case Errc::EigenFailure: return "EigenFailure";
    case Errc::NumericalFailure: return "NumericalFailure";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::BadPercent: return "BadPercent";
    case Errc::IoError: return "IoError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace fmd
