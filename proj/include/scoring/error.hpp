#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scoring {

enum class ErrorKind {
  BadInput,
  SpaceMismatch,
  Incoherent,
  NegativeWeight,
  InvalidProbability,
  DomainViolation,
  ZeroVector,
  BadAlpha,
  BadSpec,
  EntryAboveM,
  NotRegular,
  EmptySample,
  Infeasible,
  InfeasibleOrthant,
  PathNotConvergent,
  InfiniteScoreOnPath,
  Coherent,
  NoDominator,
  PremiseViolated,
  NoWitness,
  Overflow,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::Incoherent: return "Incoherent";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::BadAlpha: return "BadAlpha";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::EntryAboveM: return "EntryAboveM";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::InfeasibleOrthant: return "InfeasibleOrthant";
    case ErrorKind::PathNotConvergent: return "PathNotConvergent";
    case ErrorKind::InfiniteScoreOnPath: return "InfiniteScoreOnPath";
    case ErrorKind::Coherent: return "Coherent";
    case ErrorKind::NoDominator: return "NoDominator";
    case ErrorKind::PremiseViolated: return "PremiseViolated";
    case ErrorKind::NoWitness: return "NoWitness";
    case ErrorKind::Overflow: return "Overflow";
  }
  return "Unknown";
}

/// Base of every error raised by the library. The kind is the machine-readable
/// tag reported by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a credence violates additivity or normalization. Carries the
/// event with the largest discrepancy c(A) - sum of singletons in A.
class IncoherentError : public Error {
 public:
  IncoherentError(std::uint32_t event_mask, double discrepancy, const std::string& message)
      : Error(ErrorKind::Incoherent, message), event_mask_(event_mask), discrepancy_(discrepancy) {}

  std::uint32_t event_mask() const noexcept { return event_mask_; }
  double discrepancy() const noexcept { return discrepancy_; }

 private:
  std::uint32_t event_mask_;
  double discrepancy_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace scoring
