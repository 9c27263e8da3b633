#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockade/model.hpp"

namespace blockade {

enum class Observable { kMeanPhotonNumber, kG2Zero };

std::string_view to_string(Observable obs);
// Accepts "mean_n" / "n" and "g2" / "g2_zero".
Observable parse_observable(std::string_view name);

struct TruncationRow {
  std::size_t dim;
  double value;
  double change_to_next;  // |value(next) - value|; NaN on the last row
};

struct TruncationScan {
  Observable observable;
  double tolerance;
  std::vector<TruncationRow> rows;
  std::optional<std::size_t> converged_dim;

  bool converged() const { return converged_dim.has_value(); }
  std::string report() const;
};

// Evaluates the stationary observable at each truncation and returns the
// smallest dim whose value changes by less than tol at the next dim in the
// list. Non-convergence is reported through converged_dim, never silently.
TruncationScan truncation_scan(const SystemParams& params, Observable observable,
                               std::span<const std::size_t> dims, double tol);

}  // namespace blockade
