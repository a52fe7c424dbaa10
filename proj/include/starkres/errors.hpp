#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace starkres {

enum class Errc {
  PoleInB,
  Overflow,
  BranchViolation,
  PoleAtNonpositiveInteger,
  NoConvergence,
  AtSpectrum,
  CoincidentPoints,
  NonConvergent,
  PoleCrossing,
  DegenerateDelta,
  DerivativeAtCoincidence,
  CausticTime,
  GridTooCoarse,
  NoDetachedLevel,
  EssentialContamination,
  StepTooLarge,
  NoLinearRegime,
  SolverFailure,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::PoleInB: return "PoleInB";
    case Errc::Overflow: return "Overflow";
    case Errc::BranchViolation: return "BranchViolation";
    case Errc::PoleAtNonpositiveInteger: return "PoleAtNonpositiveInteger";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::AtSpectrum: return "AtSpectrum";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::PoleCrossing: return "PoleCrossing";
    case Errc::DegenerateDelta: return "DegenerateDelta";
    case Errc::DerivativeAtCoincidence: return "DerivativeAtCoincidence";
    case Errc::CausticTime: return "CausticTime";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::NoDetachedLevel: return "NoDetachedLevel";
    case Errc::EssentialContamination: return "EssentialContamination";
    case Errc::StepTooLarge: return "StepTooLarge";
    case Errc::NoLinearRegime: return "NoLinearRegime";
    case Errc::SolverFailure: return "SolverFailure";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace starkres
