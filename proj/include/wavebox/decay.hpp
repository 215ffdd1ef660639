#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavebox/errors.hpp"
#include "wavebox/geometry.hpp"
#include "wavebox/quadrature.hpp"
#include "wavebox/spectral.hpp"
#include "wavebox/trace.hpp"

namespace wavebox {

struct DecayFit {
  double amplitude = 0.0;
  double delta = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double rms_residual = 0.0;
  int n_samples = 0;
};

// Least squares in (log t, log E) over the window; delta is minus the
// slope, amplitude the exponential of the intercept.
inline DecayFit fit_power_law(const EnergyTrace& tr, double t_lo, double t_hi) {
  validate_trace(tr);
  if (!(t_lo < t_hi)) throw validation_error("fit window must satisfy t_lo < t_hi");
  std::vector<double> lt;
  std::vector<double> le;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t_lo || tr.t[i] > t_hi) continue;
    if (!(tr.t[i] > 0.0)) throw validation_error("fit window must have t > 0");
    if (!(tr.energy[i] > 0.0))
      throw validation_error("fit window contains non-positive energies");
    lt.push_back(std::log(tr.t[i]));
    le.push_back(std::log(tr.energy[i]));
  }
  const int n = static_cast<int>(lt.size());
  if (n < 5) throw validation_error("fit window holds fewer than 5 samples");

  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lt[static_cast<std::size_t>(i)];
    my += le[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    double dx = lt[static_cast<std::size_t>(i)] - mx;
    sxx += dx * dx;
    sxy += dx * (le[static_cast<std::size_t>(i)] - my);
  }
  if (!(sxx > 0.0)) throw validation_error("fit window degenerate in time");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;

  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = le[static_cast<std::size_t>(i)] -
               (intercept + slope * lt[static_cast<std::size_t>(i)]);
    ss += r * r;
  }

  DecayFit fit;
  fit.amplitude = std::exp(intercept);
  fit.delta = -slope;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.rms_residual = std::sqrt(ss / n);
  fit.n_samples = n;
  return fit;
}

// Times at which the energy first falls below E(0)/2^k, interpolating
// linearly in (t, log E); exact on exponentials, second order on smooth
// decays. Stops when the trace no longer halves.
inline std::vector<double> halving_times(const EnergyTrace& tr) {
  validate_trace(tr);
  for (std::size_t i = 0; i < tr.energy.size(); ++i) {
    if (!(tr.energy[i] > 0.0)) throw validation_error("halving needs positive energies");
    if (i > 0 && tr.energy[i] > tr.energy[i - 1] * (1.0 + 1e-12))
      throw validation_error("halving needs a non-increasing trace");
  }
  std::vector<double> out;
  double target = tr.energy[0] / 2.0;
  std::size_t i = 1;
  while (i < tr.energy.size()) {
    if (tr.energy[i] < target) {
      double l0 = std::log(tr.energy[i - 1]);
      double l1 = std::log(tr.energy[i]);
      double lt = std::log(target);
      double frac = (lt - l0) / (l1 - l0);
      out.push_back(tr.t[i - 1] + frac * (tr.t[i] - tr.t[i - 1]));
      target /= 2.0;
      continue;  // the same interval may cross several halving levels
    }
    ++i;
  }
  return out;
}

inline std::vector<double> gap_ratios(const std::vector<double>& halvings) {
  std::vector<double> out;
  for (std::size_t k = 2; k < halvings.size(); ++k) {
    double g0 = halvings[k - 1] - halvings[k - 2];
    double g1 = halvings[k] - halvings[k - 1];
    if (g0 > 0.0) out.push_back(g1 / g0);
  }
  return out;
}

enum class DecayKind { exponential, power_law, undetermined };

struct GapClassification {
  std::vector<double> halvings;
  std::vector<double> ratios;
  double mean_ratio = 0.0;
  DecayKind kind = DecayKind::undetermined;
  double delta_from_gaps = 0.0;
};

// Exponential decay halves on a fixed clock (gap ratio 1); a power law
// t^-delta halves on a geometric clock (gap ratio 2^{1/delta}).
inline GapClassification classify_halving(const EnergyTrace& tr, double exp_tol = 0.05) {
  GapClassification c;
  c.halvings = halving_times(tr);
  c.ratios = gap_ratios(c.halvings);
  if (c.ratios.empty()) return c;
  double m = 0.0;
  for (double r : c.ratios) m += r;
  m /= static_cast<double>(c.ratios.size());
  c.mean_ratio = m;
  if (std::abs(m - 1.0) <= exp_tol) {
    c.kind = DecayKind::exponential;
  } else if (m > 1.0 + exp_tol) {
    c.kind = DecayKind::power_law;
    c.delta_from_gaps = std::numbers::ln2 / std::log(m);
  }
  return c;
}

// ||(u0,u1)||^2_{H1 x L2} divided by the region observation of the velocity
// over [0, T], with the space integral in closed form per mode pair and the
// time integral by panel Gauss-Legendre.
inline double observability_ratio(const EigenBasis& basis, const ModalState& s, Region region,
                                  double t_final, int panels = 0, int order = 8) {
  require_state_size(basis, s);
  if (!(t_final > 0.0)) throw validation_error("observation time must be > 0");
  double numerator = energy_G(basis, s);
  if (numerator <= 0.0) throw degenerate_error("observability of the zero state");

  Eigen::MatrixXd g = gram_matrix(basis, region);
  double mu_max = basis.modes.back().mu;
  if (panels <= 0) {
    panels = std::max(8, static_cast<int>(std::ceil(t_final * std::sqrt(mu_max) / 2.0)));
  }
  double denominator = integrate_gl(
      [&](double t) {
        Eigen::VectorXd v = velocity_coeffs_at(basis, s, t);
        return v.dot(g * v);
      },
      0.0, t_final, panels, order);
  if (!(denominator > numerator * 1e-14))
    throw degenerate_error("observation integral vanished on the region");
  return numerator / denominator;
}

struct LemmaParams {
  double c1 = 2.0;
  double c2 = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
};

inline LemmaParams make_lemma_params(double c1, double c2, double beta, double gamma) {
  if (!(c1 > 1.0)) throw validation_error("c1 must be > 1");
  if (!(c2 > 0.0)) throw validation_error("c2 must be > 0");
  if (!(beta > 0.0)) throw validation_error("beta must be > 0");
  if (!(gamma > 0.0)) throw validation_error("gamma must be > 0");
  return LemmaParams{c1, c2, beta, gamma};
}

// (2 c1 / t)^{1/(beta+1)} + c2 t^{-1/gamma}, valid for t >= 2.
inline double lemma_b_bound(const LemmaParams& p, double t) {
  if (!(t >= 2.0)) throw validation_error("the iteration bound requires t >= 2");
  return std::pow(2.0 * p.c1 / t, 1.0 / (p.beta + 1.0)) + p.c2 * std::pow(t, -1.0 / p.gamma);
}

struct LemmaReport {
  int points_checked = 0;
  int hypothesis_failures = 0;
  double first_failure_s = std::numeric_limits<double>::quiet_NaN();
  double verified_prefix_end = 0.0;
  double min_hypothesis_margin = std::numeric_limits<double>::infinity();
  int conclusion_points = 0;
  int conclusion_failures = 0;
  double min_conclusion_margin = std::numeric_limits<double>::infinity();
  bool hypothesis_holds = false;
  std::vector<double> margins;
};

namespace detail {

// Monotone piecewise-linear interpolation; arguments beyond the last grid
// point return NaN so the caller can stop its verified prefix there.
inline double interp_monotone(const std::vector<double>& s, const std::vector<double>& f,
                              double arg) {
  if (arg <= s.front()) return f.front();
  if (arg > s.back()) return std::numeric_limits<double>::quiet_NaN();
  auto it = std::upper_bound(s.begin(), s.end(), arg);
  std::size_t hi = static_cast<std::size_t>(it - s.begin());
  std::size_t lo = hi - 1;
  double w = (arg - s[lo]) / (s[hi] - s[lo]);
  return f[lo] + w * (f[hi] - f[lo]);
}

}  // namespace detail

// Checks the iteration hypothesis
//   F(s) <= c1 (1/F(s))^beta (F(s) - F((c2/F(s))^gamma + s))
// pointwise on the grid, then asserts the closed-form bound at every grid
// time sqrt(s) >= 2 inside the verified prefix.
inline LemmaReport lemma_b_verify(const std::vector<double>& s_grid,
                                  const std::vector<double>& f_vals, const LemmaParams& p) {
  if (s_grid.size() != f_vals.size() || s_grid.size() < 2)
    throw validation_error("lemma grid needs matching sizes and at least 2 points");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
      throw validation_error("lemma grid must be strictly increasing");
    if (!(f_vals[i] > 0.0) || f_vals[i] > 1.0 + 1e-12)
      throw validation_error("lemma function must take values in (0, 1]");
    if (i > 0 && f_vals[i] > f_vals[i - 1] * (1.0 + 1e-12))
      throw validation_error("lemma function must be non-increasing");
  }

  LemmaReport rep;
  rep.margins.reserve(s_grid.size());
  bool prefix_alive = true;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    double s = s_grid[i];
    double f = f_vals[i];
    double arg = std::pow(p.c2 / f, p.gamma) + s;
    double f_fwd = detail::interp_monotone(s_grid, f_vals, arg);
    if (std::isnan(f_fwd)) break;  // forward argument leaves the grid
    double rhs = p.c1 * std::pow(1.0 / f, p.beta) * (f - f_fwd);
    double margin = rhs - f;
    rep.margins.push_back(margin);
    ++rep.points_checked;
    rep.min_hypothesis_margin = std::min(rep.min_hypothesis_margin, margin);
    if (margin < 0.0) {
      ++rep.hypothesis_failures;
      if (std::isnan(rep.first_failure_s)) rep.first_failure_s = s;
      prefix_alive = false;
    } else if (prefix_alive) {
      rep.verified_prefix_end = s;
    }
  }
  rep.hypothesis_holds = rep.points_checked > 0 && rep.hypothesis_failures == 0;

  // conclusion on the verified prefix: F(t^2) <= bound(t) for grid t >= 2
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    double s = s_grid[i];
    if (s < 4.0 || s > rep.verified_prefix_end) continue;
    double t = std::sqrt(s);
    double margin = lemma_b_bound(p, t) - f_vals[i];
    ++rep.conclusion_points;
    rep.min_conclusion_margin = std::min(rep.min_conclusion_margin, margin);
    if (margin < 0.0) ++rep.conclusion_failures;
  }
  return rep;
}

// Energy normalization for the lemma: F(s) = sigma (E(w,s) + E(w',s)) /
// E(w'',0) with the derivative energies taken from the exact modal
// derivatives, and sigma = 1/F_raw(0) so that F(0) = 1. h_ratio reports the
// raw quotient (E + E') / E'' at s = 0, the scale-selection diagnostic (its
// multiplicative constant is unspecified, so nothing is asserted about it).
struct NormalizedTrace {
  std::vector<double> s;
  std::vector<double> f;
  double sigma = 1.0;
  double h_ratio = 0.0;
};

inline NormalizedTrace normalize_for_lemma(const EigenBasis& basis, const DampingMatrix& damp,
                                           const DampedRun& run) {
  if (run.states.size() != run.trace.t.size())
    throw validation_error("normalization needs a run recorded with states");
  ModalState d0 = derivative_state(basis, damp, run.states.front());
  ModalState dd0 = derivative_state(basis, damp, d0);
  double e_dd0 = energy_G(basis, dd0);
  if (!(e_dd0 > 0.0)) throw degenerate_error("second-derivative energy vanished");

  NormalizedTrace out;
  out.s = run.trace.t;
  out.f.reserve(run.states.size());
  for (const ModalState& st : run.states) {
    ModalState d = derivative_state(basis, damp, st);
    out.f.push_back((energy_G(basis, st) + energy_G(basis, d)) / e_dd0);
  }
  out.h_ratio = out.f.front();
  if (!(out.h_ratio > 0.0)) throw degenerate_error("zero initial energy in normalization");
  out.sigma = 1.0 / out.h_ratio;
  for (double& v : out.f) v *= out.sigma;
  return out;
}

}  // namespace wavebox
