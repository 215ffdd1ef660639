#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "wavebox/errors.hpp"
#include "wavebox/geometry.hpp"
#include "wavebox/io.hpp"
#include "wavebox/quadrature.hpp"
#include "wavebox/trace.hpp"

namespace wavebox {

// One Dirichlet product mode of the box: per-axis indices (1-based on the
// active axes, 0 on unused slots) and its Laplace eigenvalue.
struct Mode {
  std::array<int, 3> k{0, 0, 0};
  double mu = 0.0;
};

struct EigenBasis {
  DomainSpec domain;
  std::vector<Mode> modes;

  int size() const { return static_cast<int>(modes.size()); }
};

namespace detail {

// Sum of (k_d pi / L_d)^2 with the addends sorted first, so that modes whose
// index multisets coincide on equal sides get bit-identical eigenvalues and
// tie-breaking by multi-index is exact.
inline double mode_eigenvalue(const DomainSpec& dom, const std::array<int, 3>& k) {
  std::array<double, 3> terms{0.0, 0.0, 0.0};
  for (int d = 0; d < dom.dim; ++d) {
    double f = static_cast<double>(k[static_cast<std::size_t>(d)]) * std::numbers::pi /
               side(dom, d);
    terms[static_cast<std::size_t>(d)] = f * f;
  }
  std::sort(terms.begin(), terms.begin() + dom.dim);
  double mu = 0.0;
  for (int d = 0; d < dom.dim; ++d) mu += terms[static_cast<std::size_t>(d)];
  return mu;
}

// Normalized 1-D Dirichlet sine on [-H, H]: sqrt(2/L) sin(k pi (x+H)/L).
inline double axis_mode(const DomainSpec& dom, int axis, int k, double coord) {
  double lng = side(dom, axis);
  double u = coord + half_side(dom, axis);
  return std::sqrt(2.0 / lng) * std::sin(static_cast<double>(k) * std::numbers::pi * u / lng);
}

inline double axis_mode_deriv(const DomainSpec& dom, int axis, int k, double coord) {
  double lng = side(dom, axis);
  double u = coord + half_side(dom, axis);
  double freq = static_cast<double>(k) * std::numbers::pi / lng;
  return std::sqrt(2.0 / lng) * freq * std::cos(freq * u);
}

// Wall value of the derivative: cos(0) = 1 at the negative wall,
// cos(k pi) = (-1)^k at the positive wall.
inline double axis_mode_deriv_at_wall(const DomainSpec& dom, int axis, int k, bool positive) {
  double lng = side(dom, axis);
  double freq = static_cast<double>(k) * std::numbers::pi / lng;
  double sign = positive ? (k % 2 == 0 ? 1.0 : -1.0) : 1.0;
  return std::sqrt(2.0 / lng) * freq * sign;
}

}  // namespace detail

inline EigenBasis build_basis(const DomainSpec& dom, int n_modes) {
  if (n_modes < 1) throw validation_error("mode count must be at least 1");
  std::array<int, 3> ones{1, 1, 1};
  if (dom.dim == 2) ones[2] = 0;
  double mu1 = detail::mode_eigenvalue(dom, ones);

  std::vector<Mode> found;
  double cap = mu1 * std::max(2.0, 4.0 * std::pow(static_cast<double>(n_modes), 2.0 / dom.dim));
  for (;;) {
    found.clear();
    std::array<int, 3> kmax{0, 0, 0};
    for (int d = 0; d < dom.dim; ++d) {
      kmax[static_cast<std::size_t>(d)] =
          static_cast<int>(std::floor(side(dom, d) * std::sqrt(cap) / std::numbers::pi));
    }
    for (int k0 = 1; k0 <= kmax[0]; ++k0) {
      for (int k1 = 1; k1 <= kmax[1]; ++k1) {
        if (dom.dim == 2) {
          std::array<int, 3> k{k0, k1, 0};
          double mu = detail::mode_eigenvalue(dom, k);
          if (mu <= cap) found.push_back(Mode{k, mu});
        } else {
          for (int k2 = 1; k2 <= kmax[2]; ++k2) {
            std::array<int, 3> k{k0, k1, k2};
            double mu = detail::mode_eigenvalue(dom, k);
            if (mu <= cap) found.push_back(Mode{k, mu});
          }
        }
      }
    }
    if (static_cast<int>(found.size()) >= n_modes) break;
    cap *= 2.0;
  }

  std::sort(found.begin(), found.end(), [](const Mode& a, const Mode& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    return a.k < b.k;
  });
  found.resize(static_cast<std::size_t>(n_modes));
  return EigenBasis{dom, std::move(found)};
}

inline double mode_value(const DomainSpec& dom, const Mode& mode, const Vec3& x) {
  require_in_closed_box(dom, x);
  double v = 1.0;
  for (int d = 0; d < dom.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    v *= detail::axis_mode(dom, d, mode.k[i], x[i]);
  }
  return v;
}

// Index of the mode with the given per-axis indices, or -1 if the basis
// does not contain it.
inline int find_mode(const EigenBasis& basis, const std::array<int, 3>& k) {
  for (int j = 0; j < basis.size(); ++j) {
    if (basis.modes[static_cast<std::size_t>(j)].k == k) return j;
  }
  return -1;
}

// Modal coefficients of the position and the velocity.
struct ModalState {
  Eigen::VectorXd b0;
  Eigen::VectorXd b1;
};

inline ModalState make_state(const EigenBasis& basis) {
  ModalState s;
  s.b0 = Eigen::VectorXd::Zero(basis.size());
  s.b1 = Eigen::VectorXd::Zero(basis.size());
  return s;
}

inline void require_state_size(const EigenBasis& basis, const ModalState& s) {
  if (s.b0.size() != basis.size() || s.b1.size() != basis.size())
    throw validation_error("modal state size does not match the basis");
}

// Coefficients of u(., t) for the conservative flow:
// c_j = b0 cos(w t) + (b1/w) sin(w t), w = sqrt(mu_j).
inline Eigen::VectorXd coeffs_at(const EigenBasis& basis, const ModalState& s, double t) {
  require_state_size(basis, s);
  Eigen::VectorXd c(basis.size());
  for (int j = 0; j < basis.size(); ++j) {
    double w = std::sqrt(basis.modes[static_cast<std::size_t>(j)].mu);
    c[j] = s.b0[j] * std::cos(w * t) + s.b1[j] * std::sin(w * t) / w;
  }
  return c;
}

inline Eigen::VectorXd velocity_coeffs_at(const EigenBasis& basis, const ModalState& s,
                                          double t) {
  require_state_size(basis, s);
  Eigen::VectorXd c(basis.size());
  for (int j = 0; j < basis.size(); ++j) {
    double w = std::sqrt(basis.modes[static_cast<std::size_t>(j)].mu);
    c[j] = -s.b0[j] * w * std::sin(w * t) + s.b1[j] * std::cos(w * t);
  }
  return c;
}

// (u, du/dt) at a point under the conservative flow.
inline std::pair<double, double> synthesize_u(const EigenBasis& basis, const ModalState& s,
                                              const Vec3& x, double t) {
  require_state_size(basis, s);
  require_in_closed_box(basis.domain, x);
  Eigen::VectorXd c0 = coeffs_at(basis, s, t);
  Eigen::VectorXd c1 = velocity_coeffs_at(basis, s, t);
  double u = 0.0;
  double ut = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    double phi = mode_value(basis.domain, basis.modes[static_cast<std::size_t>(j)], x);
    u += c0[j] * phi;
    ut += c1[j] * phi;
  }
  return {u, ut};
}

// H1 x L2 energy: sum(mu b0^2 + b1^2).
inline double energy_G(const EigenBasis& basis, const ModalState& s) {
  require_state_size(basis, s);
  double e = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    e += basis.modes[static_cast<std::size_t>(j)].mu * s.b0[j] * s.b0[j] + s.b1[j] * s.b1[j];
  }
  return e;
}

// Squared H2 norm of the position data: sum(mu^2 b0^2).
inline double h2_norm_sq(const EigenBasis& basis, const ModalState& s) {
  require_state_size(basis, s);
  double e = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    double mu = basis.modes[static_cast<std::size_t>(j)].mu;
    e += mu * mu * s.b0[j] * s.b0[j];
  }
  return e;
}

// Squared H1 norm of the velocity data: sum(mu b1^2).
inline double h1_norm_sq(const EigenBasis& basis, const ModalState& s) {
  require_state_size(basis, s);
  double e = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    e += basis.modes[static_cast<std::size_t>(j)].mu * s.b1[j] * s.b1[j];
  }
  return e;
}

// Frequency-localization quotient (stronger norm over energy); equals mu_j
// on a single mode and is >= mu_1 always.
inline double lambda_quotient(const EigenBasis& basis, const ModalState& s) {
  double denom = energy_G(basis, s);
  if (denom <= 0.0) throw degenerate_error("lambda quotient of the zero state");
  return (h2_norm_sq(basis, s) + h1_norm_sq(basis, s)) / denom;
}

namespace detail {

// Closed-form integral of s_j s_k over [a, b] on one axis.
inline double axis_pair_integral(const DomainSpec& dom, int axis, int j, int k, double a,
                                 double b) {
  double lng = side(dom, axis);
  double h = half_side(dom, axis);
  double ua = a + h;
  double ub = b + h;
  auto anti = [&](double u) {
    if (j == k) {
      double f = 2.0 * std::numbers::pi * static_cast<double>(j) / lng;
      return u / 2.0 - std::sin(f * u) / (2.0 * f);
    }
    double fm = std::numbers::pi * static_cast<double>(j - k) / lng;
    double fp = std::numbers::pi * static_cast<double>(j + k) / lng;
    return std::sin(fm * u) / (2.0 * fm) - std::sin(fp * u) / (2.0 * fp);
  };
  return (2.0 / lng) * (anti(ub) - anti(ua));
}

}  // namespace detail

// Gram matrix of the basis restricted to a region, assembled from the
// closed-form per-axis integrals over the region's signed box cover.
inline Eigen::MatrixXd gram_matrix(const EigenBasis& basis, Region region) {
  const auto boxes = region_signed_boxes(basis.domain, region);
  const int n = basis.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const auto& ka = basis.modes[static_cast<std::size_t>(a)].k;
    for (int b = a; b < n; ++b) {
      const auto& kb = basis.modes[static_cast<std::size_t>(b)].k;
      double sum = 0.0;
      for (const auto& sb : boxes) {
        double prod = static_cast<double>(sb.sign);
        for (int d = 0; d < basis.domain.dim; ++d) {
          std::size_t i = static_cast<std::size_t>(d);
          prod *= detail::axis_pair_integral(basis.domain, d, ka[i], kb[i], sb.box.lo[i],
                                             sb.box.hi[i]);
        }
        sum += prod;
      }
      g(a, b) = sum;
      g(b, a) = sum;
    }
  }
  return g;
}

struct DampingMatrix {
  Eigen::MatrixXd mat;
  int quadrature_order = 0;
  double refinement_delta = 0.0;
  bool converged = true;
};

namespace detail {

// Per-axis weighted products int psi(x) s_j(x) s_k(x) dx over the collar
// intervals of one axis (the whole axis when the damping is constant).
inline Eigen::MatrixXd axis_weight_table(const DomainSpec& dom, const DampingField& field,
                                         int axis, int kmax, int order, bool whole_axis) {
  double h = half_side(dom, axis);
  std::vector<std::pair<double, double>> intervals;
  if (whole_axis) {
    intervals.emplace_back(-h, h);
  } else {
    intervals.emplace_back(-h, -h + dom.collar);
    intervals.emplace_back(h - dom.collar, h);
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(kmax, kmax);
  for (int j = 1; j <= kmax; ++j) {
    for (int k = j; k <= kmax; ++k) {
      double v = 0.0;
      for (const auto& [a, b] : intervals) {
        int panels =
            std::max(4, static_cast<int>(std::ceil(static_cast<double>(j + k) * (b - a) /
                                                   side(dom, axis))) +
                            2);
        v += integrate_gl(
            [&](double x) {
              double psi = 1.0;
              if (!whole_axis) {
                double pen = collar_penetration(dom, axis, x);
                psi = profile_value(field.profile, pen);
              }
              return psi * axis_mode(dom, axis, j, x) * axis_mode(dom, axis, k, x);
            },
            a, b, panels, order);
      }
      w(j - 1, k - 1) = v;
      w(k - 1, j - 1) = v;
    }
  }
  return w;
}

}  // namespace detail

// Galerkin projection of the damping: D_jk = int alpha l_j l_k. The
// complement-product form of alpha makes the integrand a signed sum of
// terms separable across axes, so the assembly reduces to per-axis weight
// tables combined by inclusion-exclusion over nonempty axis subsets.
inline DampingMatrix damping_matrix(const EigenBasis& basis, const DampingField& field,
                                    int quadrature_order = 12) {
  if (quadrature_order < 2) throw validation_error("quadrature order must be at least 2");
  const DomainSpec& dom = basis.domain;
  const int n = basis.size();

  DampingMatrix out;
  out.quadrature_order = quadrature_order;
  out.mat = Eigen::MatrixXd::Zero(n, n);
  if (field.alpha_max == 0.0) return out;

  const bool whole = field.support == DampingSupport::full_box;
  const int n_axes = (field.support == DampingSupport::lateral_collar) ? dom.dim - 1 : dom.dim;

  std::array<int, 3> kmax{0, 0, 0};
  for (const Mode& m : basis.modes) {
    for (int d = 0; d < dom.dim; ++d) {
      std::size_t i = static_cast<std::size_t>(d);
      kmax[i] = std::max(kmax[i], m.k[i]);
    }
  }

  std::vector<Eigen::MatrixXd> tables;
  double delta = 0.0;
  double scale = 1.0;
  for (int d = 0; d < n_axes; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    Eigen::MatrixXd coarse =
        detail::axis_weight_table(dom, field, d, kmax[i], quadrature_order, whole);
    Eigen::MatrixXd fine =
        detail::axis_weight_table(dom, field, d, kmax[i], quadrature_order + 4, whole);
    delta = std::max(delta, (fine - coarse).cwiseAbs().maxCoeff());
    scale = std::max(scale, fine.cwiseAbs().maxCoeff());
    tables.push_back(std::move(fine));
  }
  out.refinement_delta = delta;
  out.converged = delta <= 1e-8 * scale;

  const int n_masks = (1 << n_axes) - 1;
  for (int a = 0; a < n; ++a) {
    const auto& ka = basis.modes[static_cast<std::size_t>(a)].k;
    for (int b = a; b < n; ++b) {
      const auto& kb = basis.modes[static_cast<std::size_t>(b)].k;
      double total = 0.0;
      for (int mask = 1; mask <= n_masks; ++mask) {
        double sign = (std::popcount(static_cast<unsigned>(mask)) % 2 == 1) ? 1.0 : -1.0;
        double term = sign;
        bool zero = false;
        for (int d = 0; d < dom.dim; ++d) {
          std::size_t i = static_cast<std::size_t>(d);
          if (d < n_axes && ((mask >> d) & 1)) {
            term *= tables[i](ka[i] - 1, kb[i] - 1);
          } else if (ka[i] != kb[i]) {
            zero = true;
            break;
          }
        }
        if (!zero) total += term;
      }
      double v = field.alpha_max * total;
      out.mat(a, b) = v;
      out.mat(b, a) = v;
    }
  }
  return out;
}

// First-order generator of the damped modal flow on [b0; b1].
inline Eigen::MatrixXd damped_generator(const EigenBasis& basis, const DampingMatrix& damp) {
  const int n = basis.size();
  if (damp.mat.rows() != n || damp.mat.cols() != n)
    throw validation_error("damping matrix size does not match the basis");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  for (int j = 0; j < n; ++j) a(n + j, j) = -basis.modes[static_cast<std::size_t>(j)].mu;
  a.bottomRightCorner(n, n) = -damp.mat;
  return a;
}

// Exact-in-time step operator exp(A dt) for repeated application.
struct DampedPropagator {
  Eigen::MatrixXd step_op;
  double dt = 0.0;
};

inline DampedPropagator make_propagator(const EigenBasis& basis, const DampingMatrix& damp,
                                        double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw validation_error("time step must be finite and >= 0");
  Eigen::MatrixXd a = damped_generator(basis, damp);
  return DampedPropagator{(a * dt).exp(), dt};
}

inline ModalState apply(const DampedPropagator& prop, const ModalState& s) {
  const int n = static_cast<int>(s.b0.size());
  Eigen::VectorXd y(2 * n);
  y.head(n) = s.b0;
  y.tail(n) = s.b1;
  y = prop.step_op * y;
  ModalState out;
  out.b0 = y.head(n);
  out.b1 = y.tail(n);
  return out;
}

inline ModalState evolve_damped(const EigenBasis& basis, const DampingMatrix& damp,
                                const ModalState& s, double t) {
  require_state_size(basis, s);
  if (!(t >= 0.0) || !std::isfinite(t)) throw validation_error("time must be finite and >= 0");
  if (t == 0.0) return s;
  return apply(make_propagator(basis, damp, t), s);
}

// Velocity part of the generator applied to a state: the modal coefficients
// of (dw/dt, d2w/dt2). Applying it twice gives the second derivative pair.
inline ModalState derivative_state(const EigenBasis& basis, const DampingMatrix& damp,
                                   const ModalState& s) {
  require_state_size(basis, s);
  ModalState out;
  out.b0 = s.b1;
  out.b1 = -(s.b0.cwiseProduct(Eigen::VectorXd::NullaryExpr(
                basis.size(),
                [&](Eigen::Index j) { return basis.modes[static_cast<std::size_t>(j)].mu; }))) -
           damp.mat * s.b1;
  return out;
}

struct DampedRun {
  EnergyTrace trace;
  std::vector<ModalState> states;
};

// Damped evolution sampled on a uniform record grid. Between records the
// state advances by `substeps` equal exponential substeps; the dissipation
// integral int b1' D b1 is accumulated by composite Simpson over substep
// pairs, so `substeps` must be even. The trace stores twice that integral,
// matching the energy identity E(t) + 2 int = E(0).
inline DampedRun run_damped(const EigenBasis& basis, const DampingMatrix& damp,
                            const ModalState& init, double t_final, double record_dt,
                            int substeps = 8, bool keep_states = false) {
  require_state_size(basis, init);
  if (!(t_final >= 0.0)) throw validation_error("final time must be >= 0");
  if (!(record_dt > 0.0)) throw validation_error("record spacing must be > 0");
  if (substeps < 2 || substeps % 2 != 0)
    throw validation_error("substeps must be even and at least 2");

  const int n_records = static_cast<int>(std::floor(t_final / record_dt + 1e-9));
  const double dt_sub = record_dt / static_cast<double>(substeps);
  DampedPropagator prop = make_propagator(basis, damp, dt_sub);

  auto power = [&](const ModalState& s) { return s.b1.dot(damp.mat * s.b1); };

  DampedRun out;
  ModalState s = init;
  double dissipated = 0.0;
  out.trace.t.push_back(0.0);
  out.trace.energy.push_back(energy_G(basis, s));
  out.trace.dissipation.push_back(0.0);
  if (keep_states) out.states.push_back(s);

  for (int rec = 1; rec <= n_records; ++rec) {
    double p_prev = power(s);
    for (int pair = 0; pair < substeps / 2; ++pair) {
      s = apply(prop, s);
      double p_mid = power(s);
      s = apply(prop, s);
      double p_end = power(s);
      dissipated += dt_sub / 3.0 * (p_prev + 4.0 * p_mid + p_end);
      p_prev = p_end;
    }
    out.trace.t.push_back(static_cast<double>(rec) * record_dt);
    out.trace.energy.push_back(energy_G(basis, s));
    out.trace.dissipation.push_back(2.0 * dissipated);
    if (keep_states) out.states.push_back(s);
  }
  return out;
}

struct FaceSet {
  bool gamma1 = false;
  bool gamma2 = false;
  bool upsilon = false;
};

// Gram of the normal derivatives over the selected faces. Lateral
// orthonormality reduces each face integral to a wall product times a
// Kronecker delta on the remaining axes.
inline Eigen::MatrixXd face_gram(const EigenBasis& basis, const FaceSet& faces) {
  const DomainSpec& dom = basis.domain;
  const int v = vertical_axis(dom);
  std::vector<std::pair<int, bool>> walls;
  if (faces.gamma1) walls.emplace_back(v, true);
  if (faces.gamma2) walls.emplace_back(v, false);
  if (faces.upsilon) {
    for (int d = 0; d < dom.dim - 1; ++d) {
      walls.emplace_back(d, false);
      walls.emplace_back(d, true);
    }
  }
  const int n = basis.size();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [axis, positive] : walls) {
    std::size_t ai = static_cast<std::size_t>(axis);
    for (int a = 0; a < n; ++a) {
      const auto& ka = basis.modes[static_cast<std::size_t>(a)].k;
      for (int b = a; b < n; ++b) {
        const auto& kb = basis.modes[static_cast<std::size_t>(b)].k;
        bool match = true;
        for (int d = 0; d < dom.dim; ++d) {
          std::size_t i = static_cast<std::size_t>(d);
          if (d != axis && ka[i] != kb[i]) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        double v_ab = detail::axis_mode_deriv_at_wall(dom, axis, ka[ai], positive) *
                      detail::axis_mode_deriv_at_wall(dom, axis, kb[ai], positive);
        f(a, b) += v_ab;
        if (a != b) f(b, a) += v_ab;
      }
    }
  }
  return f;
}

// int_0^T int_faces |normal derivative of u|^2 for the conservative flow,
// by the closed-form face Gram in space and panel Gauss-Legendre in time.
inline double normal_trace_energy(const EigenBasis& basis, const ModalState& s,
                                  const FaceSet& faces, double t_final, int panels = 0,
                                  int order = 8) {
  require_state_size(basis, s);
  if (!(t_final >= 0.0)) throw validation_error("final time must be >= 0");
  if (t_final == 0.0) return 0.0;
  Eigen::MatrixXd f = face_gram(basis, faces);
  double mu_max = basis.modes.back().mu;
  if (panels <= 0) {
    panels = std::max(8, static_cast<int>(std::ceil(t_final * std::sqrt(mu_max) / 2.0)));
  }
  return integrate_gl(
      [&](double t) {
        Eigen::VectorXd c = coeffs_at(basis, s, t);
        return c.dot(f * c);
      },
      0.0, t_final, panels, order);
}

inline std::string state_to_csv(const EigenBasis& basis, const ModalState& s) {
  require_state_size(basis, s);
  std::string out = "index,mu,b0,b1\n";
  for (int j = 0; j < basis.size(); ++j) {
    out += std::to_string(j + 1);
    out += ',';
    out += fmt_double(basis.modes[static_cast<std::size_t>(j)].mu);
    out += ',';
    out += fmt_double(s.b0[j]);
    out += ',';
    out += fmt_double(s.b1[j]);
    out += '\n';
  }
  return out;
}

inline ModalState state_from_csv(const EigenBasis& basis, std::string_view text) {
  ModalState s = make_state(basis);
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw validation_error("empty state file");
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::array<double, 4> vals{};
    for (std::size_t c = 0; c < 4; ++c) {
      if (!std::getline(cells, cell, ',')) throw validation_error("bad state row: " + line);
      vals[c] = std::stod(cell);
    }
    int idx = static_cast<int>(vals[0]) - 1;
    if (idx < 0 || idx >= basis.size()) throw validation_error("state row index out of range");
    s.b0[idx] = vals[2];
    s.b1[idx] = vals[3];
    ++rows;
  }
  if (rows != basis.size()) throw validation_error("state row count does not match the basis");
  return s;
}

}  // namespace wavebox
