#pragma once

#include <stdexcept>
#include <string>

namespace faultroute {

// Input validation failures use std::invalid_argument, and out-of-domain
// arguments to math functions use std::domain_error. The types below cover
// the failures that are specific to this library.

/// The mode chain is not irreducible, so no unique stationary law exists.
class ErgodicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular systems, non-finite states and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Lyapunov certificate could not be built from the supplied witness.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bisection predicate flipped more than once along the eta axis.
class MonotonicityError : public std::runtime_error {
 public:
  MonotonicityError(const std::string& what, double eta_true, double eta_false)
      : std::runtime_error(what), eta_true_(eta_true), eta_false_(eta_false) {}

  /// Larger eta at which the predicate still held.
  double eta_true() const { return eta_true_; }
  /// Smaller eta at which it had already failed.
  double eta_false() const { return eta_false_; }

 private:
  double eta_true_;
  double eta_false_;
};

/// Analytic witness construction and the numeric fallback both failed.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace faultroute
