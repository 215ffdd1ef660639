#pragma once

// Billiard flow of the wave operator in the box: speed-1 straight segments
// with specular reflection at faces. Edge and corner hits are reported as a
// termination signal, never resolved by an ad-hoc rule. Region first-hit
// queries and the sampled geometric-control check live here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "wavebox/errors.hpp"
#include "wavebox/geometry.hpp"
#include "wavebox/rng.hpp"

namespace wavebox {

struct Ray {
  Vec3 x{0.0, 0.0, 0.0};
  Vec3 v{0.0, 0.0, 0.0};  // unit direction
  double clock = 0.0;
  int reflections = 0;
};

inline constexpr double kCornerTol = 1e-12;

inline Ray make_ray(const DomainSpec& spec, const Vec3& x, const Vec3& v) {
  if (!inside_open_box(spec, x)) throw validation_error("ray position must be strictly inside");
  double n2 = 0.0;
  for (int d = 0; d < spec.dim; ++d) n2 += v[static_cast<std::size_t>(d)] * v[static_cast<std::size_t>(d)];
  if (std::abs(n2 - 1.0) > 1e-12)
    throw validation_error("ray direction must be a unit vector");
  Ray r;
  r.x = x;
  r.v = v;
  return r;
}

enum class HitKind { face, corner };

struct BoundaryHit {
  Ray ray;            // reflected ray sitting on the face (kind == face)
  Face face = Face::upsilon;
  double path_length = 0.0;
  HitKind kind = HitKind::face;
};

inline BoundaryHit advance_to_boundary(const DomainSpec& spec, const Ray& ray) {
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  int hit_axis = -1;
  int hit_sign = 0;
  for (int d = 0; d < spec.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    double vd = ray.v[i];
    if (vd == 0.0) continue;
    double target = (vd > 0.0) ? half_side(spec, d) : -half_side(spec, d);
    double tExit = (target - ray.x[i]) / vd;
    if (tExit < best) {
      second = best;
      best = tExit;
      hit_axis = d;
      hit_sign = (vd > 0.0) ? 1 : -1;
    } else if (tExit < second) {
      second = tExit;
    }
  }
  if (hit_axis < 0) throw validation_error("ray direction has no active component");

  BoundaryHit hit;
  hit.path_length = best;
  std::size_t hi = static_cast<std::size_t>(hit_axis);
  Ray out = ray;
  for (int d = 0; d < spec.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    out.x[i] = ray.x[i] + best * ray.v[i];
  }
  out.x[hi] = hit_sign > 0 ? half_side(spec, hit_axis) : -half_side(spec, hit_axis);
  out.v[hi] = -out.v[hi];
  out.clock = ray.clock + best;
  out.reflections = ray.reflections + 1;
  hit.ray = out;
  if (hit_axis == vertical_axis(spec)) {
    hit.face = hit_sign > 0 ? Face::gamma1 : Face::gamma2;
  } else {
    hit.face = Face::upsilon;
  }
  hit.kind = (second - best <= kCornerTol) ? HitKind::corner : HitKind::face;
  return hit;
}

enum class HitStatus { hit, none, corner };

struct FirstHit {
  HitStatus status = HitStatus::none;
  double time = 0.0;       // region entry clock (status == hit)
  double traced = 0.0;     // clock actually traced
  int reflections = 0;
};

namespace detail {

// Earliest tau in [0, seg] at which x + tau v enters the open box, or none.
inline std::optional<double> segment_entry(const BoxRegion& b, const Vec3& x, const Vec3& v,
                                           int dim, double seg) {
  double lo = 0.0;
  double hi = seg;
  for (int d = 0; d < dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    if (v[i] == 0.0) {
      if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return std::nullopt;
      continue;
    }
    double t1 = (b.lo[i] - x[i]) / v[i];
    double t2 = (b.hi[i] - x[i]) / v[i];
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
    if (hi <= lo) return std::nullopt;
  }
  return lo;
}

}  // namespace detail

inline FirstHit first_hit_time(const DomainSpec& spec, Ray ray, Region region, double T_max) {
  if (!(T_max > 0.0)) throw validation_error("T_max must be positive");
  std::vector<BoxRegion> boxes = region_union_boxes(spec, region);
  FirstHit result;
  double remaining = T_max;
  while (remaining > 0.0) {
    BoundaryHit hit = advance_to_boundary(spec, ray);
    double seg = std::min(hit.path_length, remaining);
    double entry = std::numeric_limits<double>::infinity();
    for (const auto& b : boxes) {
      auto e = detail::segment_entry(b, ray.x, ray.v, spec.dim, seg);
      if (e && *e < entry) entry = *e;
    }
    if (entry <= seg) {
      result.status = HitStatus::hit;
      result.time = ray.clock + entry;
      result.traced = result.time;
      result.reflections = ray.reflections;
      return result;
    }
    if (seg < hit.path_length) break;  // horizon reached mid-segment
    if (hit.kind == HitKind::corner) {
      result.status = HitStatus::corner;
      result.traced = hit.ray.clock;
      result.reflections = hit.ray.reflections;
      return result;
    }
    remaining -= hit.path_length;
    ray = hit.ray;
  }
  result.status = HitStatus::none;
  result.traced = T_max;
  result.reflections = ray.reflections;
  return result;
}

struct RaySample {
  Ray ray;
  FirstHit outcome;
};

struct GccReport {
  std::int64_t sample_count = 0;
  std::int64_t hits = 0;
  std::int64_t corner_terminated = 0;
  double controlled_fraction = 1.0;  // vacuous 1.0 when sample_count == 0
  double max_first_hit_time = 0.0;
  std::vector<RaySample> witnesses;  // uncontrolled rays, capped
  std::int64_t uncontrolled_count = 0;
};

inline constexpr std::size_t kMaxWitnesses = 64;

namespace detail {

inline Vec3 sampled_direction(const DomainSpec& spec, std::uint64_t idx) {
  Vec3 v{0.0, 0.0, 0.0};
  if (spec.dim == 2) {
    double theta = 2.0 * M_PI * radical_inverse(idx, 2);
    v[0] = std::cos(theta);
    v[1] = std::sin(theta);
  } else {
    double z = 2.0 * radical_inverse(idx, 2) - 1.0;
    double phi = 2.0 * M_PI * radical_inverse(idx, 3);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    v[0] = r * std::cos(phi);
    v[1] = r * std::sin(phi);
    v[2] = z;
  }
  return v;
}

inline Vec3 sampled_position(const DomainSpec& spec, std::uint64_t idx) {
  Vec3 x{0.0, 0.0, 0.0};
  for (int d = 0; d < spec.dim; ++d) {
    double u = radical_inverse(idx, kHaltonBases[static_cast<std::size_t>(d) + 2]);
    double m = half_side(spec, d);
    x[static_cast<std::size_t>(d)] = -m + 2.0 * m * u;
  }
  return x;
}

}  // namespace detail

// Options for gcc_check sampling: where positions are drawn from, and
// whether the direction set is the full sphere sample plus axis directions
// or only the vertical pair (the trapped family).
struct GccSampling {
  Region positions = Region::all;
  bool vertical_only = false;
};

// Sampled geometric-control check: low-discrepancy positions crossed with
// low-discrepancy directions plus the axis directions, each traced to the
// horizon. The sample list is generated up front; tracing order never
// affects the report.
inline GccReport gcc_check(const DomainSpec& spec, Region region, double T_max,
                           int n_positions, int n_directions, std::uint64_t seed,
                           const GccSampling& sampling = GccSampling{},
                           std::vector<RaySample>* all_samples = nullptr) {
  if (n_positions < 0 || n_directions < 0)
    throw validation_error("sample counts must be non-negative");
  GccReport report;
  if (n_positions == 0) return report;

  std::vector<Vec3> directions;
  int vaxis = vertical_axis(spec);
  if (sampling.vertical_only) {
    Vec3 up{0.0, 0.0, 0.0};
    up[static_cast<std::size_t>(vaxis)] = 1.0;
    Vec3 down{0.0, 0.0, 0.0};
    down[static_cast<std::size_t>(vaxis)] = -1.0;
    directions.push_back(up);
    directions.push_back(down);
  } else {
    for (int k = 0; k < n_directions; ++k) {
      directions.push_back(
          detail::sampled_direction(spec, seed + static_cast<std::uint64_t>(k) + 1));
    }
    for (int d = 0; d < spec.dim; ++d) {
      Vec3 plus{0.0, 0.0, 0.0};
      plus[static_cast<std::size_t>(d)] = 1.0;
      Vec3 minus{0.0, 0.0, 0.0};
      minus[static_cast<std::size_t>(d)] = -1.0;
      directions.push_back(plus);
      directions.push_back(minus);
    }
  }

  std::vector<Ray> samples;
  std::uint64_t idx = seed;
  for (int p = 0; p < n_positions; ++p) {
    Vec3 x{0.0, 0.0, 0.0};
    std::uint64_t guard = 0;
    do {
      ++idx;
      x = detail::sampled_position(spec, idx);
      if (++guard > 10000000ull)
        throw accuracy_error("position sampling cannot reach the requested region");
    } while (sampling.positions != Region::all && !in_region(spec, sampling.positions, x));
    for (const auto& v : directions) {
      Ray r;
      r.x = x;
      r.v = v;
      samples.push_back(r);
    }
  }

  report.sample_count = static_cast<std::int64_t>(samples.size());
  double max_hit = 0.0;
  for (const auto& r : samples) {
    FirstHit fh = first_hit_time(spec, r, region, T_max);
    if (all_samples) all_samples->push_back({r, fh});
    if (fh.status == HitStatus::hit) {
      ++report.hits;
      max_hit = std::max(max_hit, fh.time);
    } else {
      if (fh.status == HitStatus::corner) ++report.corner_terminated;
      ++report.uncontrolled_count;
      if (report.witnesses.size() < kMaxWitnesses) report.witnesses.push_back({r, fh});
    }
  }
  report.controlled_fraction =
      static_cast<double>(report.hits) / static_cast<double>(report.sample_count);
  report.max_first_hit_time = max_hit;
  return report;
}

}  // namespace wavebox
