#pragma once

// Axis-aligned box domains with a distinguished vertical axis (the last
// active one), the lateral damping collar omega, the central observation
// box omega0, face classification, and the damping coefficient field.
//
// Conventions: dim is 2 or 3; lateral axes are 0..dim-2 with half-widths
// m1 (and m2 in 3-D); the vertical axis is dim-1 with half-height rho.
// In 2-D a point is (x1, x3) stored in slots 0 and 1; slot 2 is unused.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavebox/errors.hpp"

namespace wavebox {

using Vec3 = std::array<double, 3>;

enum class Region { omega, omega0, omega_union, all };

enum class Face { gamma1, gamma2, upsilon };  // top, bottom, lateral

struct DomainSpec {
  int dim = 2;
  double m1 = 1.0;
  double m2 = 1.0;  // ignored when dim == 2
  double rho = 1.0;
  double r_o = 0.25;
  double collar = 0.25;
};

inline int vertical_axis(const DomainSpec& spec) { return spec.dim - 1; }

inline double half_side(const DomainSpec& spec, int axis) {
  if (axis == vertical_axis(spec)) return spec.rho;
  return axis == 0 ? spec.m1 : spec.m2;
}

inline double side(const DomainSpec& spec, int axis) { return 2.0 * half_side(spec, axis); }

// Packet scale cap, recomputed from r_o on demand.
inline double h_o(const DomainSpec& spec) {
  double q = spec.r_o / 8.0;
  return std::min(1.0, q * q);
}

inline double box_diameter(const DomainSpec& spec) {
  double sq = 0.0;
  for (int d = 0; d < spec.dim; ++d) sq += side(spec, d) * side(spec, d);
  return std::sqrt(sq);
}

inline DomainSpec make_domain(int dim, double m1, double m2, double rho, double r_o,
                              double collar) {
  if (dim != 2 && dim != 3) throw validation_error("dim must be 2 or 3");
  if (!(m1 > 0.0)) throw validation_error("m1 must be positive");
  if (dim == 3 && !(m2 > 0.0)) throw validation_error("m2 must be positive");
  if (!(rho > 0.0)) throw validation_error("rho must be positive");
  double lateral_min = (dim == 3) ? std::min(m1, m2) : m1;
  double bound = std::min(lateral_min, rho) / 2.0;
  if (!(r_o > 0.0) || !(r_o < bound))
    throw validation_error("r_o must satisfy 0 < r_o < min(m1, m2, rho)/2");
  if (!(collar > 0.0) || !(collar <= r_o))
    throw validation_error("collar must satisfy 0 < collar <= r_o");
  DomainSpec spec;
  spec.dim = dim;
  spec.m1 = m1;
  spec.m2 = (dim == 3) ? m2 : m1;
  spec.rho = rho;
  spec.r_o = r_o;
  spec.collar = collar;
  return spec;
}

inline bool inside_closed_box(const DomainSpec& spec, const Vec3& x) {
  for (int d = 0; d < spec.dim; ++d) {
    if (std::abs(x[static_cast<std::size_t>(d)]) > half_side(spec, d)) return false;
  }
  return true;
}

inline bool inside_open_box(const DomainSpec& spec, const Vec3& x) {
  for (int d = 0; d < spec.dim; ++d) {
    if (!(std::abs(x[static_cast<std::size_t>(d)]) < half_side(spec, d))) return false;
  }
  return true;
}

inline void require_in_closed_box(const DomainSpec& spec, const Vec3& x) {
  if (!inside_closed_box(spec, x)) throw std::domain_error("point outside the closed box");
}

struct BoxRegion {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{0.0, 0.0, 0.0};
};

inline bool in_open_box(const BoxRegion& b, const Vec3& x, int dim) {
  for (int d = 0; d < dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return false;
  }
  return true;
}

// Inclusion-exclusion term for integration over a region.
struct SignedBox {
  BoxRegion box;
  int sign = 1;
};

namespace detail {

inline BoxRegion whole_box(const DomainSpec& spec) {
  BoxRegion b;
  for (int d = 0; d < spec.dim; ++d) {
    b.lo[static_cast<std::size_t>(d)] = -half_side(spec, d);
    b.hi[static_cast<std::size_t>(d)] = half_side(spec, d);
  }
  return b;
}

// One lateral collar slab: the strip within `collar` of the lateral face
// `axis` on side `positive` (full extent in every other axis).
inline BoxRegion collar_slab(const DomainSpec& spec, int axis, bool positive) {
  BoxRegion b = whole_box(spec);
  std::size_t i = static_cast<std::size_t>(axis);
  double m = half_side(spec, axis);
  if (positive) {
    b.lo[i] = m - spec.collar;
  } else {
    b.hi[i] = -m + spec.collar;
  }
  return b;
}

inline BoxRegion omega0_box(const DomainSpec& spec) {
  BoxRegion b;
  for (int d = 0; d + 1 < spec.dim; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    double m = half_side(spec, d);
    b.lo[i] = -m + spec.r_o;
    b.hi[i] = m - spec.r_o;
  }
  std::size_t v = static_cast<std::size_t>(vertical_axis(spec));
  b.lo[v] = -spec.rho / 4.0;
  b.hi[v] = spec.rho / 4.0;
  return b;
}

}  // namespace detail

// Plain union cover of the region (boxes may overlap); membership in the
// open region is membership in any box.
inline std::vector<BoxRegion> region_union_boxes(const DomainSpec& spec, Region region) {
  std::vector<BoxRegion> out;
  if (region == Region::all) {
    out.push_back(detail::whole_box(spec));
    return out;
  }
  if (region == Region::omega || region == Region::omega_union) {
    for (int d = 0; d + 1 < spec.dim; ++d) {
      out.push_back(detail::collar_slab(spec, d, false));
      out.push_back(detail::collar_slab(spec, d, true));
    }
  }
  if (region == Region::omega0 || region == Region::omega_union) {
    out.push_back(detail::omega0_box(spec));
  }
  return out;
}

// Signed decomposition whose indicator sums (with signs) to the region
// indicator; used for exact integration of separable integrands.
inline std::vector<SignedBox> region_signed_boxes(const DomainSpec& spec, Region region) {
  std::vector<SignedBox> out;
  auto add = [&out](const BoxRegion& b, int sign) { out.push_back(SignedBox{b, sign}); };
  if (region == Region::all) {
    add(detail::whole_box(spec), 1);
    return out;
  }
  if (region == Region::omega || region == Region::omega_union) {
    std::vector<BoxRegion> slabs;
    for (int d = 0; d + 1 < spec.dim; ++d) {
      slabs.push_back(detail::collar_slab(spec, d, false));
      slabs.push_back(detail::collar_slab(spec, d, true));
    }
    for (const auto& s : slabs) add(s, 1);
    // In 3-D the x1 and x2 slabs overlap in four corner columns.
    if (spec.dim == 3) {
      for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) {
          BoxRegion a = detail::collar_slab(spec, 0, s1 == 1);
          BoxRegion b = detail::collar_slab(spec, 1, s2 == 1);
          BoxRegion c = a;
          c.lo[1] = b.lo[1];
          c.hi[1] = b.hi[1];
          add(c, -1);
        }
      }
    }
  }
  if (region == Region::omega0 || region == Region::omega_union) {
    add(detail::omega0_box(spec), 1);
  }
  return out;
}

inline bool in_region(const DomainSpec& spec, Region region, const Vec3& x) {
  for (const auto& b : region_union_boxes(spec, region)) {
    if (in_open_box(b, x, spec.dim)) return true;
  }
  return false;
}

struct PointClass {
  bool interior = false;
  bool in_omega = false;
  bool in_omega0 = false;
  bool on_gamma1 = false;
  bool on_gamma2 = false;
  bool on_upsilon = false;
};

inline PointClass classify_point(const DomainSpec& spec, const Vec3& x) {
  require_in_closed_box(spec, x);
  PointClass c;
  std::size_t v = static_cast<std::size_t>(vertical_axis(spec));
  if (x[v] == spec.rho) c.on_gamma1 = true;
  if (x[v] == -spec.rho) c.on_gamma2 = true;
  for (int d = 0; d + 1 < spec.dim; ++d) {
    if (std::abs(x[static_cast<std::size_t>(d)]) == half_side(spec, d)) c.on_upsilon = true;
  }
  c.interior = inside_open_box(spec, x);
  if (c.interior) {
    c.in_omega = in_region(spec, Region::omega, x);
    c.in_omega0 = in_region(spec, Region::omega0, x);
  }
  return c;
}

enum class DampingProfile { indicator, smooth_bump };

// Which faces the collar hugs: the lateral faces only (the default), every
// face, or no collar at all (constant damping on the whole box).
enum class DampingSupport { lateral_collar, boundary_collar, full_box };

struct DampingField {
  DampingProfile profile = DampingProfile::indicator;
  double alpha_max = 1.0;
  DampingSupport support = DampingSupport::lateral_collar;
};

inline DampingField make_damping(DampingProfile profile, double alpha_max,
                                 DampingSupport support = DampingSupport::lateral_collar) {
  if (!(alpha_max >= 0.0) || !std::isfinite(alpha_max))
    throw validation_error("alpha_max must be finite and >= 0");
  return DampingField{profile, alpha_max, support};
}

namespace detail {

// Penetration fraction into the collar along one axis: 0 at the inner
// collar boundary, 1 at the wall, clamped.
inline double collar_penetration(const DomainSpec& spec, int axis, double coord) {
  double m = half_side(spec, axis);
  double p = (std::abs(coord) - (m - spec.collar)) / spec.collar;
  if (p < 0.0) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

inline double profile_value(DampingProfile profile, double pen) {
  if (pen <= 0.0) return 0.0;
  if (profile == DampingProfile::indicator) return 1.0;
  return std::exp(1.0 - 1.0 / pen);
}

}  // namespace detail

// alpha(x) = alpha_max * (1 - prod_d (1 - psi_d(x_d))) over the collared
// axes; psi is the per-axis profile of the collar penetration. The product
// form keeps alpha smooth for the smooth-bump profile where two collars
// overlap, vanishes exactly off the collar union, and tops out at alpha_max.
inline double alpha_at(const DampingField& field, const DomainSpec& spec, const Vec3& x) {
  require_in_closed_box(spec, x);
  if (field.support == DampingSupport::full_box) return field.alpha_max;
  int first = 0;
  int last = (field.support == DampingSupport::boundary_collar) ? spec.dim : spec.dim - 1;
  double miss = 1.0;
  for (int d = first; d < last; ++d) {
    double pen = detail::collar_penetration(spec, d, x[static_cast<std::size_t>(d)]);
    miss *= 1.0 - detail::profile_value(field.profile, pen);
  }
  return field.alpha_max * (1.0 - miss);
}

}  // namespace wavebox
