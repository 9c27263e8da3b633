#include "blockade/truncation.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "blockade/error.hpp"
#include "blockade/lindblad.hpp"

namespace blockade {

std::string_view to_string(Observable obs) {
  switch (obs) {
    case Observable::kMeanPhotonNumber: return "mean_n";
    case Observable::kG2Zero: return "g2_zero";
  }
  return "unknown";
}

Observable parse_observable(std::string_view name) {
  if (name == "mean_n" || name == "n") return Observable::kMeanPhotonNumber;
  if (name == "g2" || name == "g2_zero") return Observable::kG2Zero;
  throw Error(ErrorCode::kInvalidArgument, "unknown observable '" + std::string(name) + "'");
}

std::string TruncationScan::report() const {
  std::ostringstream os;
  os << "# truncation scan: observable=" << to_string(observable) << " tol=" << tolerance << '\n';
  os << "dim,value,change_to_next\n";
  os << std::setprecision(15);
  for (const auto& row : rows) {
    os << row.dim << ',' << row.value << ',' << row.change_to_next << '\n';
  }
  if (converged_dim) {
    os << "# converged at dim=" << *converged_dim << '\n';
  } else {
    os << "# NOT converged within the scanned dims\n";
  }
  return os.str();
}

TruncationScan truncation_scan(const SystemParams& params, Observable observable,
                               std::span<const std::size_t> dims, double tol) {
  if (dims.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "truncation scan needs at least 3 dims");
  }
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "truncation scan dims must be increasing");
    }
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");

  TruncationScan scan{observable, tol, {}, std::nullopt};
  for (std::size_t dim : dims) {
    const CwSteadyState ss = cw_steady_state(params, dim);
    double value = ss.mean_photon_number;
    if (observable == Observable::kG2Zero) {
      if (!(ss.mean_photon_number > kTolerances.min_mean_photon_number)) {
        throw Error(ErrorCode::kUndefinedCorrelation, "g2 undefined at vanishing photon number");
      }
      value = ss.g2_zero;
    }
    scan.rows.push_back({dim, value, std::numeric_limits<double>::quiet_NaN()});
  }
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i) {
    scan.rows[i].change_to_next = std::abs(scan.rows[i + 1].value - scan.rows[i].value);
    if (!scan.converged_dim && scan.rows[i].change_to_next < tol) {
      scan.converged_dim = scan.rows[i].dim;
    }
  }
  return scan;
}

}  // namespace blockade
