#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wavebox/errors.hpp"
#include "wavebox/geometry.hpp"
#include "wavebox/io.hpp"
#include "wavebox/trace.hpp"

namespace wavebox {

using FieldSampler = std::function<double(const Vec3&)>;

// Leapfrog lattice state. Arrays live on the full node lattice including the
// boundary layer, which stays identically zero; `nodes[d]` counts nodes per
// axis (1 on unused slots).
struct GridState {
  DomainSpec domain;
  int resolution = 0;
  std::array<int, 3> nodes{1, 1, 1};
  std::array<double, 3> spacing{0.0, 0.0, 0.0};
  double dt = 0.0;
  long step_count = 0;
  std::vector<double> w_prev;
  std::vector<double> w_curr;
  std::vector<double> scratch;
  std::vector<double> alpha;
};

namespace detail {

inline std::size_t grid_index(const GridState& g, int i0, int i1, int i2) {
  return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(g.nodes[1]) +
          static_cast<std::size_t>(i1)) *
             static_cast<std::size_t>(g.nodes[2]) +
         static_cast<std::size_t>(i2);
}

inline Vec3 grid_point(const GridState& g, int i0, int i1, int i2) {
  Vec3 x{0.0, 0.0, 0.0};
  std::array<int, 3> idx{i0, i1, i2};
  for (int d = 0; d < g.domain.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    x[i] = -half_side(g.domain, d) + g.spacing[i] * static_cast<double>(idx[i]);
  }
  return x;
}

inline double cell_volume(const GridState& g) {
  double v = 1.0;
  for (int d = 0; d < g.domain.dim; ++d) v *= g.spacing[static_cast<std::size_t>(d)];
  return v;
}

// 5/7-point Dirichlet Laplacian at an interior node of the padded lattice.
inline double laplacian_at(const GridState& g, const std::vector<double>& w, std::size_t idx,
                           const std::array<std::size_t, 3>& stride) {
  double acc = 0.0;
  for (int d = 0; d < g.domain.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    double h2 = g.spacing[i] * g.spacing[i];
    acc += (w[idx + stride[i]] - 2.0 * w[idx] + w[idx - stride[i]]) / h2;
  }
  return acc;
}

inline std::array<std::size_t, 3> strides(const GridState& g) {
  return {static_cast<std::size_t>(g.nodes[1]) * static_cast<std::size_t>(g.nodes[2]),
          static_cast<std::size_t>(g.nodes[2]), 1};
}

// Applies fn(idx) at every interior node.
template <typename F>
void for_interior(const GridState& g, F&& fn) {
  int last2 = (g.domain.dim == 3) ? g.nodes[2] - 2 : 0;
  int first2 = (g.domain.dim == 3) ? 1 : 0;
  for (int i0 = 1; i0 <= g.nodes[0] - 2; ++i0) {
    for (int i1 = 1; i1 <= g.nodes[1] - 2; ++i1) {
      for (int i2 = first2; i2 <= last2; ++i2) {
        fn(grid_index(g, i0, i1, i2), i0, i1, i2);
      }
    }
  }
}

}  // namespace detail

inline GridState init_grid(const DomainSpec& dom, const DampingField& field, int resolution,
                           double dt, const FieldSampler& w0, const FieldSampler& w1) {
  if (resolution < 4) throw validation_error("resolution must be at least 4 cells per axis");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw validation_error("dt must be finite and > 0");

  GridState g;
  g.domain = dom;
  g.resolution = resolution;
  g.dt = dt;
  double h_min = box_diameter(dom);
  for (int d = 0; d < dom.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    g.nodes[i] = resolution + 1;
    g.spacing[i] = side(dom, d) / static_cast<double>(resolution);
    h_min = std::min(h_min, g.spacing[i]);
  }
  if (dt > h_min / std::sqrt(static_cast<double>(dom.dim)) * (1.0 + 1e-12))
    throw validation_error("dt violates the stability bound dt <= h_min/sqrt(dim)");

  std::size_t total = static_cast<std::size_t>(g.nodes[0]) *
                      static_cast<std::size_t>(g.nodes[1]) *
                      static_cast<std::size_t>(g.nodes[2]);
  g.w_prev.assign(total, 0.0);
  g.w_curr.assign(total, 0.0);
  g.scratch.assign(total, 0.0);
  g.alpha.assign(total, 0.0);

  std::vector<double> v1(total, 0.0);
  detail::for_interior(g, [&](std::size_t idx, int i0, int i1, int i2) {
    Vec3 x = detail::grid_point(g, i0, i1, i2);
    g.w_curr[idx] = w0(x);
    v1[idx] = w1(x);
    g.alpha[idx] = alpha_at(field, dom, x);
  });

  // Second-order start: w(-dt) = w0 - dt w1 + dt^2/2 (lap w0 - alpha w1).
  auto stride = detail::strides(g);
  detail::for_interior(g, [&](std::size_t idx, int, int, int) {
    double lap = detail::laplacian_at(g, g.w_curr, idx, stride);
    g.w_prev[idx] =
        g.w_curr[idx] - dt * v1[idx] + 0.5 * dt * dt * (lap - g.alpha[idx] * v1[idx]);
  });
  return g;
}

// One leapfrog step with the damping handled implicitly (pointwise solve),
// so the update stays stable for any alpha >= 0. Returns the power
// sum(alpha * centered velocity^2) * cell volume spent during the step.
inline double step(GridState& g) {
  const double dt = g.dt;
  auto stride = detail::strides(g);
  bool finite = true;
  double power = 0.0;
  detail::for_interior(g, [&](std::size_t idx, int, int, int) {
    double lap = detail::laplacian_at(g, g.w_curr, idx, stride);
    double a = g.alpha[idx];
    double next = (2.0 * g.w_curr[idx] - (1.0 - a * dt / 2.0) * g.w_prev[idx] +
                   dt * dt * lap) /
                  (1.0 + a * dt / 2.0);
    g.scratch[idx] = next;
    finite = finite && std::isfinite(next);
    double v_cent = (next - g.w_prev[idx]) / (2.0 * dt);
    power += a * v_cent * v_cent;
  });
  if (!finite)
    throw instability_error("non-finite lattice value at step " +
                            std::to_string(g.step_count + 1));
  g.w_prev.swap(g.w_curr);
  g.w_curr.swap(g.scratch);
  ++g.step_count;
  return power * detail::cell_volume(g);
}

// Midpoint-in-time discrete energy of the (w_curr, w_prev) pair:
// sum[((w-w_prev)/dt)^2 + |forward-difference grad of (w+w_prev)/2|^2] vol,
// with the gradient differences taken over every lattice edge (boundary
// values are zero).
inline double discrete_energy(const GridState& g) {
  const double dt = g.dt;
  auto stride = detail::strides(g);
  double kin = 0.0;
  detail::for_interior(g, [&](std::size_t idx, int, int, int) {
    double v = (g.w_curr[idx] - g.w_prev[idx]) / dt;
    kin += v * v;
  });

  double grad = 0.0;
  for (int d = 0; d < g.domain.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    double inv_h = 1.0 / g.spacing[i];
    // edges from node k to k+1 along axis d, k = 0..nodes-2; transverse
    // indices stay interior (boundary-plane edges are identically zero)
    std::array<int, 3> lo{1, 1, (g.domain.dim == 3) ? 1 : 0};
    std::array<int, 3> hi{g.nodes[0] - 2, g.nodes[1] - 2,
                          (g.domain.dim == 3) ? g.nodes[2] - 2 : 0};
    lo[i] = 0;
    for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
      for (int i1 = lo[1]; i1 <= hi[1]; ++i1) {
        for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
          std::size_t idx = detail::grid_index(g, i0, i1, i2);
          double m0 = 0.5 * (g.w_curr[idx] + g.w_prev[idx]);
          double m1 = 0.5 * (g.w_curr[idx + stride[i]] + g.w_prev[idx + stride[i]]);
          double dgrad = (m1 - m0) * inv_h;
          grad += dgrad * dgrad;
        }
      }
    }
  }
  return (kin + grad) * detail::cell_volume(g);
}

inline EnergyTrace run_fdtd(const DomainSpec& dom, const DampingField& field, int resolution,
                            double dt, const FieldSampler& w0, const FieldSampler& w1,
                            double t_final, int record_every = 1) {
  if (!(t_final >= 0.0)) throw validation_error("final time must be >= 0");
  if (record_every < 1) throw validation_error("record_every must be >= 1");

  GridState g = init_grid(dom, field, resolution, dt, w0, w1);
  long n_steps = static_cast<long>(std::llround(t_final / dt));

  EnergyTrace tr;
  tr.t.push_back(0.0);
  tr.energy.push_back(discrete_energy(g));
  tr.dissipation.push_back(0.0);

  double spent = 0.0;
  for (long n = 1; n <= n_steps; ++n) {
    spent += step(g);
    if (n % record_every == 0) {
      // the (w_n, w_{n-1}) pair is centered at (n - 1/2) dt
      tr.t.push_back((static_cast<double>(n) - 0.5) * dt);
      tr.energy.push_back(discrete_energy(g));
      tr.dissipation.push_back(2.0 * dt * spent);
    }
  }
  return tr;
}

// Flat binary snapshot (doubles over the full padded lattice) with a short
// JSON sidecar describing the layout.
inline void write_snapshot(const GridState& g, const std::string& path_prefix) {
  std::string header = "{\n  \"nodes\": [";
  for (int d = 0; d < 3; ++d) {
    header += std::to_string(g.nodes[static_cast<std::size_t>(d)]);
    header += (d < 2) ? ", " : "]";
  }
  header += ",\n  \"spacing\": [";
  for (int d = 0; d < 3; ++d) {
    header += fmt_double(g.spacing[static_cast<std::size_t>(d)]);
    header += (d < 2) ? ", " : "]";
  }
  header += ",\n  \"dt\": " + fmt_double(g.dt);
  header += ",\n  \"step\": " + std::to_string(g.step_count);
  header += "\n}\n";
  write_text_file(path_prefix + ".json", header);

  std::string blob(reinterpret_cast<const char*>(g.w_curr.data()),
                   g.w_curr.size() * sizeof(double));
  write_text_file(path_prefix + ".bin", blob);
}

}  // namespace wavebox
