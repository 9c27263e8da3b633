// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// when any selected criterion fails.
//
//   acceptance                 all criteria
//   acceptance --criterion 5   one criterion (repeatable)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blockade/analysis.hpp"
#include "blockade/config.hpp"
#include "blockade/experiments.hpp"
#include "blockade/hbt.hpp"
#include "blockade/lindblad.hpp"
#include "blockade/mcwf.hpp"
#include "blockade/model.hpp"
#include "oracles.hpp"

using namespace blockade;

namespace {

constexpr double kHalfPi = 1.5707963267948966;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig reference_pulsed(std::size_t pulses) {
  auto cfg = parse_config(R"(mode: pulsed
model: {delta: 0.0, kappa: 1.0}
pulses: {amplitude_E0: 0.05, width_dt: 2.0, period: 24.0}
trajectory: {step_dt: 0.005, dim: 10, seed: 1}
analysis: {bin_width: 0.5, max_delay: 48.0}
)");
  cfg.pulses.pulse_count = pulses;
  cfg.validate();
  return cfg;
}

// Criteria 1 and 2 share one run.
const PulsedResult& reference_run() {
  static std::optional<PulsedResult> result;
  if (!result) {
    const auto t0 = std::chrono::steady_clock::now();
    result = run_pulsed_experiment(reference_pulsed(1'000'000));
    std::printf("  reference run: 1e6 pulses, %llu clicks, %.0f s\n",
                static_cast<unsigned long long>(result->histogram.total_clicks),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return *result;
}

const oracle::PulsedReference& reference_oracle() {
  static const auto ref = oracle::pulsed_by_adjoint(0.05, 2.0, 24.0, 0.0, 1.0, 6, 0.01);
  return ref;
}

Outcome criterion_1() {
  const auto& r = reference_run();
  if (!r.g2) return {false, "g2(0) undefined: no adjacent-peak coincidences"};
  const double g2 = r.g2->g2_zero;
  std::ostringstream os;
  os << "pulsed g2(0) = " << fmt("%.4f", g2) << " +- " << fmt("%.4f", r.g2->std_error)
     << " (zero peak " << r.g2->zero_peak_counts << ", adjacent " << r.g2->adjacent_peak_counts
     << "); target 0.14 +- 0.05; master-equation value " << fmt("%.4f", reference_oracle().g2_zero);
  return {std::abs(g2 - 0.14) <= 0.05, os.str()};
}

Outcome criterion_2() {
  const auto& r = reference_run();
  const double n = r.brightness.mean_photons_per_pulse;
  const double rate = r.brightness.count_rate_per_s;
  const bool n_ok = std::abs(n - 0.019) <= 0.2 * 0.019;
  const bool rate_ok = std::abs(rate - 8e5) <= 0.2 * 8e5;
  std::ostringstream os;
  os << "<n> = " << fmt("%.5f", n) << " +- " << fmt("%.5f", r.brightness.mean_photons_std_error)
     << " (target 0.019 +- 20%), count rate = " << fmt("%.0f", rate)
     << "/s (target 8e5 +- 20%), efficiency " << fmt("%.2f", r.brightness.efficiency_percent())
     << "%; master-equation <n> " << fmt("%.5f", reference_oracle().mean_n_per_pulse);
  return {n_ok && rate_ok, os.str()};
}

Outcome criterion_3() {
  const SystemParams p{0.0, 1.0, 0.05, 0.005, kHalfPi};
  const auto curve = g2_delay(p, uniform_grid(20.0, 0.01), 10);
  double worst = 0.0;
  for (const auto& pt : curve) worst = std::max(worst, pt.g2);
  return {worst < 1.0, "max g2(tau) on [0, 20/kappa] = " + fmt("%.6f", worst) + " over " +
                           std::to_string(curve.size()) + " points"};
}

Outcome criterion_4() {
  bool ok = true;
  std::ostringstream os;
  for (double delta : {0.25, 0.5, 1.0}) {
    auto cfg = parse_config("mode: cw\nmodel: {drive_E: 0.05, parametric_U: optimal, theta: optimal}\n");
    const SystemParams p = cfg.model.resolve(delta);
    const double period = 2.0 * units::kPi / delta;
    const auto curve = g2_delay(p, uniform_grid(3.0 * period, 0.01), 10);
    const auto maxima = local_maxima(curve);
    os << "delta=" << delta << ":";
    if (maxima.size() < 2) {
      ok = false;
      os << " fewer than two maxima; ";
      continue;
    }
    for (std::size_t i = 1; i < maxima.size(); ++i) {
      const double spacing = maxima[i] - maxima[i - 1];
      const double rel = std::abs(spacing / period - 1.0);
      ok = ok && rel <= 0.05;
      os << " " << fmt("%.3f", spacing) << " (" << fmt("%.2f", 100.0 * rel) << "%)";
    }
    os << " vs " << fmt("%.3f", period) << " ns; ";
  }
  return {ok, os.str()};
}

Outcome criterion_5() {
  bool ok = true;
  std::ostringstream os;
  const double u = 0.005;
  for (double delta : {0.0, 0.5}) {
    const double e2_expected = u * std::sqrt(delta * delta + 0.25);
    const double theta_expected = std::atan2(1.0, 2.0 * delta);
    const auto best = minimize_g2_zero(u, delta, 1.0, 10, 0.2 * std::sqrt(e2_expected),
                                       3.0 * std::sqrt(e2_expected), theta_expected);
    const double e2 = best.drive_E * best.drive_E;
    const double e_err = std::abs(e2 / e2_expected - 1.0);
    const double t_err = std::abs(best.theta / theta_expected - 1.0);
    ok = ok && e_err <= 0.02 && t_err <= 0.02;
    os << "delta=" << delta << ": E^2 " << fmt("%.6g", e2) << " vs " << fmt("%.6g", e2_expected)
       << " (" << fmt("%.2f", 100.0 * e_err) << "%), theta " << fmt("%.5f", best.theta) << " vs "
       << fmt("%.5f", theta_expected) << " (" << fmt("%.3f", 100.0 * t_err) << "%), min g2 "
       << fmt("%.4f", best.g2_zero) << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion_6() {
  const SystemParams p{0.0, 1.0, 0.05, 0.005, kHalfPi};
  const double n_ss = cw_steady_state(p, 10).mean_photon_number;

  TrajectoryConfig tc;
  tc.duration = 20.0;
  tc.seed = 1;
  const std::vector<double> at{20.0};
  const auto est = ensemble_expectation(ContinuousDrive{p}, tc, 2000, at, number_operator(10));
  const bool n_ok = std::abs(est[0].mean - n_ss) <= 3.0 * est[0].std_error;

  auto cfg = parse_config(R"(mode: cw
model: {drive_E: 0.05, parametric_U: 0.005}
cw: {trajectories: 2000, tau_max: 10.0}
trajectory: {duration: 4000.0, seed: 1}
analysis: {bin_width: 0.5, max_delay: 10.0}
)");
  const auto r = run_cw_experiment(cfg);
  const auto& c = r.curves.at(0);
  std::ostringstream os;
  os << "ensemble <n>(20/kappa) = " << fmt("%.5f", est[0].mean) << " +- " << fmt("%.5f", est[0].std_error)
     << " vs " << fmt("%.5f", n_ss) << "; " << c.trajectory_clicks << " clicks, "
     << c.bins_outside_3sigma << "/" << c.trajectory_bins.size() << " g2 bins outside 3 SE, click rate "
     << fmt("%.5f", c.trajectory_click_rate) << " +- " << fmt("%.5f", c.trajectory_click_rate_error)
     << " vs kappa<n> " << fmt("%.5f", n_ss) << "\n";
  for (std::size_t j = 0; j < c.trajectory_bins.size(); ++j) {
    const auto& b = c.trajectory_bins[j];
    os << "      [" << fmt("%4.1f", b.tau_lower) << "," << fmt("%4.1f", b.tau_upper) << ")  traj "
       << fmt("%.3f", b.g2) << " +- " << fmt("%.3f", b.std_error) << "  regression "
       << fmt("%.3f", c.regression_bin_average[j]) << "\n";
  }
  return {n_ok && c.oracle_agreement(), os.str()};
}

struct AxisPoint {
  double value, n, n_err, g2, g2_err;
};

// Beyond error bars: the +-1 sigma bars of the two points do not overlap.
bool increase_beyond(double lo, double lo_err, double hi, double hi_err) { return hi - lo > lo_err + hi_err; }
// A reversal counts only when it is beyond the error bars.
bool no_reversal(const std::vector<AxisPoint>& pts, double AxisPoint::*v, double AxisPoint::*e, int sign) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double step = sign * (pts[i].*v - pts[i - 1].*v);
    if (step < -(pts[i].*e + pts[i - 1].*e)) return false;
  }
  return true;
}

std::vector<AxisPoint> sweep_axis(const std::string& parameter, const std::vector<double>& values,
                                  std::ostringstream& os) {
  auto cfg = parse_config("mode: pulsed\nmodel: {kappa: 1.0}\npulses: {amplitude_E0: 0.05, width_dt: 2.0, pulse_count: 1000000}\n");
  cfg.sweep = SweepConfig{parameter, values};
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_sweep(cfg);
  os << "\n      " << parameter << " sweep (" << fmt("%.0f", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count())
     << " s):";
  std::vector<AxisPoint> pts;
  for (const auto& row : result.rows) {
    const auto point = cfg.with_parameter(parameter, row.value);
    const auto train = point.pulses.train();
    const auto ref = oracle::pulsed_by_adjoint(train.amplitude_E0, train.width_dt, train.period, 0.0, 1.0, 6, 0.01);
    os << "\n        " << fmt("%5.2f", row.value) << "  <n> " << fmt("%.5f", row.mean_photons_per_pulse) << " +- "
       << fmt("%.5f", row.mean_photons_error) << " (ME " << fmt("%.5f", ref.mean_n_per_pulse) << ")  g2 "
       << fmt("%.3f", row.g2_zero) << " +- " << fmt("%.3f", row.g2_zero_error) << " (ME "
       << fmt("%.3f", ref.g2_zero) << ")" << (row.ok() ? "" : "  error: " + row.error);
    pts.push_back({row.value, row.mean_photons_per_pulse, row.mean_photons_error, row.g2_zero, row.g2_zero_error});
  }
  return pts;
}

Outcome criterion_7() {
  std::ostringstream os;
  const auto width = sweep_axis("width_dt", {1.0, 1.5, 2.0, 3.0, 4.0, 6.0}, os);
  const auto amp = sweep_axis("amplitude_E0", {0.04, 0.06, 0.08, 0.10, 0.12, 0.15}, os);

  bool n_width = true;
  for (std::size_t i = 1; i < width.size(); ++i)
    n_width = n_width && increase_beyond(width[i - 1].n, width[i - 1].n_err, width[i].n, width[i].n_err);
  bool n_amp = true;
  for (std::size_t i = 1; i < amp.size(); ++i)
    n_amp = n_amp && increase_beyond(amp[i - 1].n, amp[i - 1].n_err, amp[i].n, amp[i].n_err);

  const auto min_it = std::min_element(width.begin(), width.end(),
                                       [](const AxisPoint& a, const AxisPoint& b) { return a.g2 < b.g2; });
  const bool interior = min_it != width.begin() && min_it != width.end() - 1 &&
                        increase_beyond(min_it->g2, min_it->g2_err, width.front().g2, width.front().g2_err) &&
                        increase_beyond(min_it->g2, min_it->g2_err, width.back().g2, width.back().g2_err);
  const bool down_then_up =
      no_reversal({width.begin(), min_it + 1}, &AxisPoint::g2, &AxisPoint::g2_err, -1) &&
      no_reversal({min_it, width.end()}, &AxisPoint::g2, &AxisPoint::g2_err, +1);
  const bool g2_amp = increase_beyond(amp.front().g2, amp.front().g2_err, amp.back().g2, amp.back().g2_err) &&
                      no_reversal(amp, &AxisPoint::g2, &AxisPoint::g2_err, +1);

  std::ostringstream head;
  head << "<n> increasing in width: " << (n_width ? "yes" : "no") << ", in E0: " << (n_amp ? "yes" : "no")
       << "; g2 interior minimum at width " << min_it->value << ": " << (interior && down_then_up ? "yes" : "no")
       << "; g2 increasing in E0: " << (g2_amp ? "yes" : "no") << os.str();
  return {n_width && n_amp && interior && down_then_up && g2_amp, head.str()};
}

Outcome criterion_8() {
  std::vector<std::string> failed;
  std::ostringstream os;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    os << "\n      " << (ok ? "ok   " : "FAIL ") << name << ": " << detail;
    if (!ok) failed.push_back(name);
  };

  {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0;
    for (int i = 0; i < 40; ++i) {
      const SystemParams p{u(gen), 0.5 + std::abs(u(gen)), 0.1 * u(gen), 0.05 * u(gen), 3.0 * u(gen)};
      const auto rho = steady_state(build_liouvillian(build_hamiltonian(p, 10), p.kappa));
      worst_trace = std::max(worst_trace, std::abs(rho.trace() - 1.0));
      worst_herm = std::max(worst_herm, rho.hermiticity_defect());
      worst_eig = std::min(worst_eig, rho.min_eigenvalue());
    }
    check("steady state", worst_trace < 1e-10 && worst_herm < 1e-10 && worst_eig > -1e-8,
          "|tr - 1| " + fmt("%.1e", worst_trace) + ", hermiticity " + fmt("%.1e", worst_herm) +
              ", min eigenvalue " + fmt("%.1e", worst_eig));
  }
  {
    const SystemParams p{0.5, 1.0, 0.05, 0.0035, 0.785};
    const auto l = build_liouvillian(build_hamiltonian(p, 10), 1.0);
    CMatrix rho0 = CMatrix::Zero(10, 10);
    rho0(0, 0) = 0.6;
    rho0(1, 1) = 0.4;
    rho0(0, 1) = rho0(1, 0) = 0.3;
    double worst = 0.0, worst_tr = 0.0;
    for (auto [s, t] : {std::pair{0.3, 0.7}, std::pair{2.0, 5.0}, std::pair{10.0, 0.01}}) {
      const CMatrix two = propagate(l, propagate(l, rho0, s), t);
      const CMatrix one = propagate(l, rho0, s + t);
      worst = std::max(worst, (two - one).norm());
      worst_tr = std::max(worst_tr, std::abs(one.trace() - 1.0));
    }
    check("propagation", worst < 1e-10 && worst_tr < 1e-9,
          "semigroup defect " + fmt("%.1e", worst) + ", trace drift " + fmt("%.1e", worst_tr));
  }
  {
    double worst = 0.0;
    for (double delta : {0.0, 0.5, 1.0}) {
      const double e = 0.05;
      const SystemParams p{delta, 1.0, e, e * e / std::sqrt(delta * delta + 0.25), std::atan2(1.0, 2.0 * delta)};
      for (const auto& pt : g2_delay(p, uniform_grid(40.0, 0.5), 10))
        if (pt.tau >= 20.0) worst = std::max(worst, std::abs(pt.g2 - 1.0));
    }
    check("g2 at long delay", worst < 1e-3, "max |g2 - 1| for tau >= 20/kappa: " + fmt("%.1e", worst));
  }
  {
    const double duration = 1e6;
    EmissionRecord rec;
    rec.click_times = oracle::poisson_clicks(0.05, duration, 2024);
    rec.duration = duration;
    const std::vector<EmissionRecord> recs{rec};
    const auto bins = g2_estimate(build_histogram(recs, 0.5, 20.0));
    std::size_t outside = 0;
    for (const auto& b : bins) outside += std::abs(b.g2 - 1.0) > 3.0 * b.std_error;
    check("Poisson flatness", outside == 0,
          std::to_string(outside) + "/" + std::to_string(bins.size()) + " bins outside 3 sigma");
  }
  {
    auto cfg = reference_pulsed(20000);
    cfg.pulses.pulses_per_block = 250;
    cfg.validate();
    cfg.workers = 1;
    const auto a = run_pulsed_experiment(cfg);
    cfg.workers = 4;
    const auto b = run_pulsed_experiment(cfg);
    bool same = a.records.size() == b.records.size() && a.histogram.counts == b.histogram.counts;
    for (std::size_t i = 0; same && i < a.records.size(); ++i) same = a.records[i].click_times == b.records[i].click_times;
    check("worker determinism", same, std::to_string(a.histogram.total_clicks) + " clicks, 1 vs 4 workers");
  }
  {
    auto fine = reference_pulsed(200000);
    auto coarse = fine;
    coarse.trajectory.step_dt = 0.01;
    coarse.validate();
    const auto rf = run_pulsed_experiment(fine);
    const auto rc = run_pulsed_experiment(coarse);
    const double nf = rf.brightness.mean_photons_per_pulse, ef = rf.brightness.mean_photons_std_error;
    const double nc = rc.brightness.mean_photons_per_pulse, ec = rc.brightness.mean_photons_std_error;
    check("step halving", std::abs(nf - nc) <= 3.0 * std::hypot(ef, ec),
          "<n> at dt=0.01: " + fmt("%.5f", nc) + ", dt=0.005: " + fmt("%.5f", nf) + " (3 sigma " +
              fmt("%.5f", 3.0 * std::hypot(ef, ec)) + ")");
  }
  return {failed.empty(), "property suite" + os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"pulsed purity", criterion_1}},
      {2, {"brightness and efficiency", criterion_2}},
      {3, {"CW antibunching at zero detuning", criterion_3}},
      {4, {"oscillation period 2 pi / delta", criterion_4}},
      {5, {"optimum-condition recovery", criterion_5}},
      {6, {"trajectory and master-equation agreement", criterion_6}},
      {7, {"width and amplitude trends", criterion_7}},
      {8, {"property suite", criterion_8}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [k, v] : criteria) selected.insert(k);

  int failures = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    Outcome out{false, ""};
    try {
      out = it->second.second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    failures += !out.pass;
    std::printf("%s criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", k, it->second.first, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
