#pragma once

#include <stdexcept>
#include <string>

namespace blochspec {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveCharge : Error { using Error::Error; };
struct ChargeMismatch : Error { using Error::Error; };
struct ThetaOnDualLattice : Error { using Error::Error; };
struct TruncationNotConverged : Error { using Error::Error; };
struct JelliumViolation : Error { using Error::Error; };
struct EigFailed : Error { using Error::Error; };
struct RangeTooSmall : Error { using Error::Error; };
struct CrossingContamination : Error { using Error::Error; };
struct BoxTooSmall : Error { using Error::Error; };
struct AliasingGuard : Error { using Error::Error; };
struct GaugeMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Signals an indefinite energy operator: Wiener/Jellium violation or a
// truncation artifact. The caller decides how to proceed.
struct EnergyNotPositive : Error {
  explicit EnergyNotPositive(const std::string& what, double lambda_min_)
      : Error(what), lambda_min(lambda_min_) {}
  double lambda_min;
};

}  // namespace blochspec
