#pragma once

// Shared scalar types, axis labels, error categories, and the counter-based
// random generator used by every reproducible sampling routine.

#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace gcme {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Grid axes. 1+1 grids carry (X, T); 2+1 grids carry (X, Y, T).
enum class Axis : int { X = 0, Y = 1, T = 2 };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::T: return "t";
  }
  return "?";
}

/// A mathematical precondition was violated: non-finite input, a shape or
/// grid mismatch, or a value outside the documented domain.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Bad or unreadable run configuration (CLI, config file, convention file).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// No sign-choice combination reproduced the oracle identities.
class CalibrationFailure : public std::runtime_error {
 public:
  explicit CalibrationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// More than one sign-choice combination passed; the oracles cannot decide.
class CalibrationAmbiguity : public std::runtime_error {
 public:
  explicit CalibrationAmbiguity(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require_domain(bool cond, const std::string& msg) {
  if (!cond) throw DomainError(msg);
}

/// SplitMix64 mixing step. Keyed draws hash a seed with a fixed sequence of
/// integer labels, so sampled values depend only on (seed, labels), never on
/// evaluation order.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ v);
}

/// Uniform double in [-1, 1) from a 64-bit word; exact binary scaling keeps
/// the value platform-independent.
inline double uniform_pm1(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-52 - 1.0;
}

/// Shortest decimal form that round-trips a double (text outputs, CSV).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace gcme
