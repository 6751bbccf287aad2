#pragma once

#include <cstddef>

#include "stqos/errors.hpp"

namespace stqos {

// Truncation policy for infinite series. Passed explicitly; there are no
// hidden global tolerances.
struct SeriesControl {
  double rel_tol = 1e-12;
  std::size_t max_terms = 500;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
    if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  }

  bool operator==(const SeriesControl&) const = default;
};

}  // namespace stqos
