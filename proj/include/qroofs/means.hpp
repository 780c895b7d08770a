#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qroofs {

enum class MeanKind {
  arithmetic,
  harmonic,
  geometric,
  logarithmic,
  wigner_yanase,
};

// Symmetric mean of nonnegative arguments. Boundary values follow the
// continuous extension, so every catalog mean satisfies m(a, a) = a and
// m(a, 0) is its limit value (0 for all but the arithmetic and
// Wigner-Yanase means).
struct MeanFunction {
  MeanKind kind;
  std::string_view name;

  double operator()(double a, double b) const {
    switch (kind) {
      case MeanKind::arithmetic:
        return 0.5 * (a + b);
      case MeanKind::harmonic:
        return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b);
      case MeanKind::geometric:
        return std::sqrt(a * b);
      case MeanKind::logarithmic: {
        // (a - b) / (log a - log b) rewritten through atanh, which is
        // stable both for nearly equal arguments and at the zero boundary.
        if (a == b) return a;
        if (a + b == 0.0) return 0.0;
        const double r = (a - b) / (a + b);
        return 0.5 * (a + b) * r / std::atanh(r);
      }
      case MeanKind::wigner_yanase: {
        const double s = 0.5 * (std::sqrt(a) + std::sqrt(b));
        return s * s;
      }
    }
    throw std::logic_error("MeanFunction: unknown kind");
  }

  // m(1, 0), the normalization constant of the associated quantities.
  double at_one_zero() const {
    switch (kind) {
      case MeanKind::arithmetic:
        return 0.5;
      case MeanKind::wigner_yanase:
        return 0.25;
      default:
        return 0.0;
    }
  }
};

inline const std::array<MeanFunction, 5>& mean_catalog() {
  static const std::array<MeanFunction, 5> catalog = {{
      {MeanKind::arithmetic, "arithmetic"},
      {MeanKind::harmonic, "harmonic"},
      {MeanKind::geometric, "geometric"},
      {MeanKind::logarithmic, "logarithmic"},
      {MeanKind::wigner_yanase, "wigner_yanase"},
  }};
  return catalog;
}

inline const MeanFunction& mean_by_name(std::string_view name) {
  for (const auto& m : mean_catalog()) {
    if (m.name == name) return m;
  }
  std::ostringstream msg;
  msg << "unknown mean '" << name << "'; known means:";
  for (const auto& m : mean_catalog()) msg << " " << m.name;
  throw std::invalid_argument(msg.str());
}

}  // namespace qroofs
