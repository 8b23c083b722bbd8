#pragma once

#include <stdexcept>
#include <string>

namespace greenwalk {

/**
 * Error taxonomy shared by the library and the CLI.
 *
 * Every failure the library can diagnose is thrown as a LabError subclass.
 * `kind()` is a stable machine-readable tag (it ends up in JSON diagnostics)
 * and `exit_code()` is what the CLI process returns for that class:
 *
 *   3  invalid configuration / unsupported request (caller error)
 *   4  resource, accuracy or numerical failure (the run itself broke)
 *
 * Theory-violation findings (a golden check failing) are not exceptions;
 * they are reported results and map to exit code 2 at the CLI layer.
 */
class LabError : public std::runtime_error {
public:
  LabError(std::string kind, int exit_code, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)), exit_code_(exit_code) {}

  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return exit_code_; }

private:
  std::string kind_;
  int exit_code_;
};

/// Malformed or inconsistent configuration (bad group string, weights that
/// do not normalize, out-of-range flag values, ...).
class ConfigError : public LabError {
public:
  explicit ConfigError(const std::string& msg) : LabError("config", 3, msg) {}
};

/// Structurally valid request that this build deliberately does not serve
/// (e.g. Green metric at trajectory scale for a non-tree group).
class CapabilityError : public LabError {
public:
  explicit CapabilityError(const std::string& msg) : LabError("capability", 3, msg) {}
};

/// A hard cap (support size, ball size, memory budget) would be exceeded.
class ResourceError : public LabError {
public:
  explicit ResourceError(const std::string& msg) : LabError("resource", 4, msg) {}
};

/// The requested tolerance cannot be certified with the given truncation.
class AccuracyError : public LabError {
public:
  explicit AccuracyError(const std::string& msg) : LabError("accuracy", 4, msg) {}
};

/// A boundary point does not carry enough digits for the requested operation.
class PrecisionError : public LabError {
public:
  explicit PrecisionError(const std::string& msg) : LabError("precision", 4, msg) {}
};

/// Numerical breakdown outside the more specific classes below.
class NumericError : public LabError {
public:
  explicit NumericError(const std::string& msg) : LabError("numeric", 4, msg) {}
};

/// An iteration whose contraction assumption failed (estimated rate >= 1).
class SpectralError : public LabError {
public:
  explicit SpectralError(const std::string& msg) : LabError("spectral", 4, msg) {}
};

/// A Monte Carlo stage produced data too degenerate to evaluate.
class StatisticalError : public LabError {
public:
  explicit StatisticalError(const std::string& msg) : LabError("statistical", 4, msg) {}
};

} // namespace greenwalk
