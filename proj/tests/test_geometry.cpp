#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "wavebox/geometry.hpp"
#include "wavebox/rng.hpp"

using namespace wavebox;

TEST_CASE("make_domain validates and derives h_o") {
  DomainSpec spec = make_domain(3, 1.0, 1.0, 1.0, 0.3, 0.3);
  CHECK(spec.dim == 3);
  CHECK(h_o(spec) == 0.00140625);

  CHECK_THROWS_AS(make_domain(3, 1.0, 1.0, 1.0, 0.6, 0.6), validation_error);
  CHECK_THROWS_AS(make_domain(3, 1.0, 1.0, 1.0, 0.5, 0.5), validation_error);  // boundary case
  CHECK_THROWS_AS(make_domain(4, 1.0, 1.0, 1.0, 0.2, 0.2), validation_error);
  CHECK_THROWS_AS(make_domain(2, -1.0, 1.0, 1.0, 0.2, 0.2), validation_error);
  CHECK_THROWS_AS(make_domain(2, 1.0, 1.0, 1.0, 0.2, 0.3), validation_error);  // collar > r_o
  CHECK_THROWS_AS(make_domain(2, 1.0, 1.0, 1.0, 0.2, 0.0), validation_error);

  // h_o saturates at 1 for wide boxes
  DomainSpec wide = make_domain(2, 20.0, 20.0, 20.0, 9.0, 9.0);
  CHECK(h_o(wide) == 1.0);
}

TEST_CASE("core region matches the collar construction in 2-D") {
  DomainSpec spec = make_domain(2, 1.0, 1.0, 1.0, 0.2, 0.2);
  auto boxes = region_union_boxes(spec, Region::omega0);
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0].lo[0] == Catch::Approx(-0.8));
  CHECK(boxes[0].hi[0] == Catch::Approx(0.8));
  CHECK(boxes[0].lo[1] == Catch::Approx(-0.25));
  CHECK(boxes[0].hi[1] == Catch::Approx(0.25));
}

TEST_CASE("classify_point reports faces and open regions") {
  DomainSpec spec = make_domain(3, 1.0, 1.0, 1.0, 0.2, 0.2);

  PointClass origin = classify_point(spec, {0.0, 0.0, 0.0});
  CHECK(origin.interior);
  CHECK(origin.in_omega0);
  CHECK_FALSE(origin.in_omega);
  CHECK_FALSE(origin.on_gamma1);

  PointClass near_wall = classify_point(spec, {0.95, 0.0, 0.0});
  CHECK(near_wall.interior);
  CHECK(near_wall.in_omega);
  CHECK_FALSE(near_wall.in_omega0);

  PointClass top = classify_point(spec, {0.0, 0.0, 1.0});
  CHECK(top.on_gamma1);
  CHECK_FALSE(top.interior);
  PointClass bottom = classify_point(spec, {0.0, 0.0, -1.0});
  CHECK(bottom.on_gamma2);
  PointClass side_face = classify_point(spec, {1.0, 0.0, 0.0});
  CHECK(side_face.on_upsilon);

  CHECK_THROWS_AS(classify_point(spec, {1.5, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("vertical axis is the last active axis") {
  DomainSpec d2 = make_domain(2, 1.0, 1.0, 0.5, 0.2, 0.2);
  CHECK(vertical_axis(d2) == 1);
  CHECK(half_side(d2, 1) == 0.5);
  DomainSpec d3 = make_domain(3, 1.0, 0.8, 0.5, 0.2, 0.2);
  CHECK(vertical_axis(d3) == 2);
  CHECK(half_side(d3, 1) == 0.8);
  CHECK(box_diameter(d3) == Catch::Approx(std::sqrt(4.0 + 2.56 + 1.0)));
}

TEST_CASE("alpha_at on the lateral collar") {
  DomainSpec spec = make_domain(3, 1.0, 1.0, 1.0, 0.2, 0.2);
  DampingField ind = make_damping(DampingProfile::indicator, 2.0);

  CHECK(alpha_at(ind, spec, {0.95, 0.0, 0.0}) == 2.0);
  CHECK(alpha_at(ind, spec, {0.0, 0.0, 0.0}) == 0.0);
  CHECK(alpha_at(ind, spec, {0.0, 0.0, 0.9}) == 0.0);  // vertical face has no collar

  DampingField bump = make_damping(DampingProfile::smooth_bump, 2.0);
  // continuous across the support boundary
  CHECK(alpha_at(bump, spec, {0.8, 0.0, 0.0}) == 0.0);
  CHECK(alpha_at(bump, spec, {0.8 + 1e-9, 0.0, 0.0}) < 1e-6);
  CHECK(alpha_at(bump, spec, {1.0, 0.0, 0.0}) == Catch::Approx(2.0));
}

TEST_CASE("alpha support and sign over random samples") {
  DomainSpec spec = make_domain(2, 1.0, 1.0, 1.0, 0.25, 0.2);
  DampingField ind = make_damping(DampingProfile::indicator, 1.5);
  DampingField bump = make_damping(DampingProfile::smooth_bump, 1.5);
  Rng rng(91);
  for (int i = 0; i < 2000; ++i) {
    Vec3 x{rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), 0.0};
    bool in_om = in_region(spec, Region::omega, x);
    double ai = alpha_at(ind, spec, x);
    double ab = alpha_at(bump, spec, x);
    CHECK(ai >= 0.0);
    CHECK(ab >= 0.0);
    CHECK(ai <= 1.5);
    CHECK(ab <= 1.5);
    CHECK((ai > 0.0) == in_om);
    if (!in_om) CHECK(ab == 0.0);
    // core and collar are disjoint
    if (in_region(spec, Region::omega0, x)) CHECK_FALSE(in_om);
  }
}

TEST_CASE("damping support variants") {
  DomainSpec spec = make_domain(2, 1.0, 1.0, 1.0, 0.25, 0.25);
  DampingField full = make_damping(DampingProfile::indicator, 0.7, DampingSupport::full_box);
  CHECK(alpha_at(full, spec, {0.0, 0.0, 0.0}) == 0.7);
  CHECK(alpha_at(full, spec, {0.9, 0.9, 0.0}) == 0.7);

  DampingField bdry =
      make_damping(DampingProfile::indicator, 0.7, DampingSupport::boundary_collar);
  CHECK(alpha_at(bdry, spec, {0.0, 0.9, 0.0}) == 0.7);  // vertical collar active
  CHECK(alpha_at(bdry, spec, {0.0, 0.0, 0.0}) == 0.0);

  // complement product keeps alpha at alpha_max in collar overlaps
  DampingField lat = make_damping(DampingProfile::indicator, 0.7);
  CHECK(alpha_at(lat, spec, {0.9, 0.0, 0.0}) == Catch::Approx(0.7));
  DomainSpec spec3 = make_domain(3, 1.0, 1.0, 1.0, 0.25, 0.25);
  CHECK(alpha_at(lat, spec3, {0.9, 0.9, 0.0}) == Catch::Approx(0.7));

  CHECK_THROWS_AS(make_damping(DampingProfile::indicator, -1.0), validation_error);
}

TEST_CASE("signed decomposition integrates the region indicator") {
  // area of omega via signed boxes == monte carlo membership area
  DomainSpec spec = make_domain(3, 1.0, 0.9, 0.8, 0.2, 0.15);
  double area = 0.0;
  for (const SignedBox& sb : region_signed_boxes(spec, Region::omega)) {
    double v = 1.0;
    for (int d = 0; d < spec.dim; ++d) {
      std::size_t i = static_cast<std::size_t>(d);
      v *= sb.box.hi[i] - sb.box.lo[i];
    }
    area += sb.sign * v;
  }
  // lateral collar of width 0.15 on both x1 and x2 walls, union of slabs
  double lx = 2.0 * 1.0;
  double ly = 2.0 * 0.9;
  double lz = 2.0 * 0.8;
  double slabs = 2.0 * 0.15 * ly * lz + 2.0 * 0.15 * lx * lz;
  double corners = 4.0 * 0.15 * 0.15 * lz;
  CHECK(area == Catch::Approx(slabs - corners).epsilon(1e-12));
}
