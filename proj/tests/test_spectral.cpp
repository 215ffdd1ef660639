#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wavebox/spectral.hpp"

using namespace wavebox;

namespace {

DomainSpec square() { return make_domain(2, 1.0, 1.0, 1.0, 0.2, 0.2); }

// Closed-form (2/L) int sin(a pi u / L) sin(b pi u / L) du over [u0, u1].
double sine_pair(int a, int b, double L, double u0, double u1) {
  double pi = M_PI;
  if (a == b) {
    double w = 2.0 * a * pi / L;
    return (u1 - u0) / L - (std::sin(w * u1) - std::sin(w * u0)) / (L * w);
  }
  double wm = (a - b) * pi / L;
  double wp = (a + b) * pi / L;
  return (std::sin(wm * u1) - std::sin(wm * u0)) / (L * wm) -
         (std::sin(wp * u1) - std::sin(wp * u0)) / (L * wp);
}

}  // namespace

TEST_CASE("eigenvalues and ordering of the product basis") {
  DomainSpec cube = make_domain(3, 1.0, 1.0, 1.0, 0.2, 0.2);
  EigenBasis b3 = build_basis(cube, 10);
  CHECK(b3.modes[0].k == std::array<int, 3>{1, 1, 1});
  CHECK(b3.modes[0].mu == Catch::Approx(3.0 * M_PI * M_PI / 4.0).epsilon(1e-14));

  EigenBasis b2 = build_basis(square(), 8);
  CHECK(b2.modes[0].k == std::array<int, 3>{1, 1, 0});
  CHECK(b2.modes[1].k == std::array<int, 3>{1, 2, 0});
  CHECK(b2.modes[2].k == std::array<int, 3>{2, 1, 0});
  // symmetric pairs on equal sides collide bit-for-bit
  CHECK(b2.modes[1].mu == b2.modes[2].mu);
  for (std::size_t j = 1; j < b2.modes.size(); ++j) CHECK(b2.modes[j].mu >= b2.modes[j - 1].mu);

  CHECK(find_mode(b2, {2, 1, 0}) == 2);
  CHECK(find_mode(b2, {9, 9, 0}) == -1);
  CHECK_THROWS_AS(build_basis(square(), 0), validation_error);
}

TEST_CASE("basis is orthonormal over the whole box") {
  EigenBasis basis = build_basis(make_domain(2, 1.0, 0.9, 0.8, 0.2, 0.2), 12);
  Eigen::MatrixXd g = gram_matrix(basis, Region::all);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(12, 12);
  CHECK((g - eye).cwiseAbs().maxCoeff() <= 1e-12);

  // axis pair integrals over a full side reproduce the Kronecker delta
  DomainSpec dom = basis.domain;
  CHECK(detail::axis_pair_integral(dom, 0, 2, 2, -1.0, 1.0) ==
        Catch::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(detail::axis_pair_integral(dom, 0, 1, 3, -1.0, 1.0)) <= 1e-13);
}

TEST_CASE("energy and norm functionals on simple states") {
  EigenBasis basis = build_basis(square(), 6);
  ModalState s = make_state(basis);
  CHECK(energy_G(basis, s) == 0.0);

  s.b0[0] = 1.0;
  CHECK(energy_G(basis, s) == Catch::Approx(basis.modes[0].mu).epsilon(1e-14));
  CHECK(h2_norm_sq(basis, s) ==
        Catch::Approx(basis.modes[0].mu * basis.modes[0].mu).epsilon(1e-14));
  CHECK(lambda_quotient(basis, s) == Catch::Approx(basis.modes[0].mu).epsilon(1e-13));

  ModalState v = make_state(basis);
  v.b1[0] = 1.0;
  CHECK(energy_G(basis, v) == 1.0);
  CHECK(h1_norm_sq(basis, v) == Catch::Approx(basis.modes[0].mu).epsilon(1e-14));

  ModalState mix = make_state(basis);
  mix.b0[0] = 1.0;
  mix.b0[5] = 0.5;
  double q = lambda_quotient(basis, mix);
  CHECK(q > basis.modes[0].mu);
  CHECK(q < basis.modes[5].mu);

  ModalState zero = make_state(basis);
  CHECK_THROWS_AS(lambda_quotient(basis, zero), degenerate_error);
}

TEST_CASE("synthesis matches the mode function and is periodic undamped") {
  EigenBasis basis = build_basis(square(), 5);
  ModalState s = make_state(basis);
  s.b0[0] = 1.0;
  Vec3 p{0.37, -0.21, 0.0};
  auto [u0, v0] = synthesize_u(basis, s, p, 0.0);
  CHECK(u0 == Catch::Approx(mode_value(basis.domain, basis.modes[0], p)).epsilon(1e-14));
  CHECK(v0 == 0.0);

  double period = 2.0 * M_PI / std::sqrt(basis.modes[0].mu);
  auto [u1, v1] = synthesize_u(basis, s, p, period);
  CHECK(u1 == Catch::Approx(u0).epsilon(1e-12));
  CHECK(std::abs(v1) <= 1e-12);

  // quarter period turns position into velocity
  auto [uq, vq] = synthesize_u(basis, s, p, period / 4.0);
  CHECK(std::abs(uq) <= 1e-12);
  CHECK(vq == Catch::Approx(-std::sqrt(basis.modes[0].mu) * u0).epsilon(1e-12));
}

TEST_CASE("damping matrix special cases") {
  EigenBasis basis = build_basis(square(), 8);

  DampingField none = make_damping(DampingProfile::indicator, 0.0);
  DampingMatrix d0 = damping_matrix(basis, none, 12);
  CHECK(d0.mat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d0.converged);

  DampingField uniform =
      make_damping(DampingProfile::indicator, 0.7, DampingSupport::full_box);
  DampingMatrix dc = damping_matrix(basis, uniform, 12);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(8, 8);
  CHECK((dc.mat - 0.7 * eye).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(dc.converged);
}

TEST_CASE("damping matrix matches the closed-form collar integrals") {
  DomainSpec dom = make_domain(2, 1.0, 1.0, 0.8, 0.22, 0.22);
  double alpha_max = 1.7;
  DampingField field = make_damping(DampingProfile::indicator, alpha_max);
  EigenBasis basis = build_basis(dom, 8);
  DampingMatrix d = damping_matrix(basis, field, 12);

  double L = 2.0;      // lateral side
  double c = 0.22;     // collar depth
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      const auto& ka = basis.modes[static_cast<std::size_t>(a)].k;
      const auto& kb = basis.modes[static_cast<std::size_t>(b)].k;
      double expect = 0.0;
      if (ka[1] == kb[1]) {
        expect = alpha_max * (sine_pair(ka[0], kb[0], L, 0.0, c) +
                              sine_pair(ka[0], kb[0], L, L - c, L));
      }
      CHECK(std::abs(d.mat(a, b) - expect) <= 1e-12);
    }
  }

  CHECK(d.converged);
  CHECK((d.mat - d.mat.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.mat);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  for (int a = 0; a < 8; ++a) {
    CHECK(d.mat(a, a) > 0.0);
    CHECK(d.mat(a, a) < alpha_max);
  }
}

TEST_CASE("damped evolution against closed forms") {
  EigenBasis basis = build_basis(square(), 6);

  DampingField none = make_damping(DampingProfile::indicator, 0.0);
  DampingMatrix d0 = damping_matrix(basis, none, 8);
  ModalState s = make_state(basis);
  s.b0[2] = 0.8;
  s.b1[4] = -0.3;

  ModalState id = evolve_damped(basis, d0, s, 0.0);
  CHECK((id.b0 - s.b0).cwiseAbs().maxCoeff() == 0.0);

  double mu2 = basis.modes[2].mu;
  double period = 2.0 * M_PI / std::sqrt(mu2);
  ModalState only2 = make_state(basis);
  only2.b0[2] = 0.8;
  ModalState back = evolve_damped(basis, d0, only2, period);
  CHECK(std::abs(back.b0[2] - 0.8) <= 1e-10);
  CHECK(std::abs(back.b1[2]) <= 1e-10);

  // uniform damping c: b0(t) = e^{-ct/2} (cos(nu t) + (c / 2 nu) sin(nu t)) b0(0)
  double cval = 0.3;
  DampingField uniform =
      make_damping(DampingProfile::indicator, cval, DampingSupport::full_box);
  DampingMatrix dc = damping_matrix(basis, uniform, 8);
  ModalState u0 = make_state(basis);
  u0.b0[0] = 1.0;
  double mu = basis.modes[0].mu;
  double nu = std::sqrt(mu - cval * cval / 4.0);
  for (double t : {0.3, 1.0, 4.7}) {
    ModalState ut = evolve_damped(basis, dc, u0, t);
    double env = std::exp(-cval * t / 2.0);
    double b0_exact = env * (std::cos(nu * t) + cval / (2.0 * nu) * std::sin(nu * t));
    double b1_exact = -(mu / nu) * env * std::sin(nu * t);
    CHECK(std::abs(ut.b0[0] - b0_exact) <= 1e-8);
    CHECK(std::abs(ut.b1[0] - b1_exact) <= 1e-8);
  }

  // propagator composition
  DampedPropagator prop = make_propagator(basis, dc, 0.25);
  ModalState two = apply(prop, apply(prop, u0));
  ModalState direct = evolve_damped(basis, dc, u0, 0.5);
  CHECK((two.b0 - direct.b0).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("derivative_state matches a finite difference of the flow") {
  EigenBasis basis = build_basis(square(), 6);
  DampingField field = make_damping(DampingProfile::smooth_bump, 1.3);
  DampingMatrix d = damping_matrix(basis, field, 12);
  ModalState s = make_state(basis);
  for (int j = 0; j < 6; ++j) {
    s.b0[j] = 0.1 * (j + 1);
    s.b1[j] = 0.05 * (6 - j);
  }
  // central difference around an interior time of the flow
  double t0 = 1.0;
  double h = 1e-5;
  ModalState mid = evolve_damped(basis, d, s, t0);
  ModalState ds = derivative_state(basis, d, mid);
  ModalState p = evolve_damped(basis, d, s, t0 + h);
  ModalState m_state = evolve_damped(basis, d, s, t0 - h);
  for (int j = 0; j < 6; ++j) {
    CHECK(std::abs((p.b0[j] - m_state.b0[j]) / (2.0 * h) - ds.b0[j]) <= 1e-6);
    CHECK(std::abs((p.b1[j] - m_state.b1[j]) / (2.0 * h) - ds.b1[j]) <= 1e-6);
  }
}

TEST_CASE("run_damped keeps the energy identity and record layout") {
  EigenBasis basis = build_basis(square(), 12);
  DampingField field = make_damping(DampingProfile::indicator, 1.0);
  DampingMatrix d = damping_matrix(basis, field, 12);
  ModalState init = make_state(basis);
  for (int j = 0; j < 12; ++j) init.b1[j] = 1.0 / (1.0 + j);

  DampedRun run = run_damped(basis, d, init, 5.0, 0.25, 8, true);
  REQUIRE(run.trace.t.size() == 21);
  CHECK(run.trace.t.front() == 0.0);
  CHECK(run.trace.t.back() == Catch::Approx(5.0));
  CHECK(run.trace.dissipation[0] == 0.0);
  REQUIRE(run.states.size() == 21);

  auto worst_residual = [&](const DampedRun& r) {
    double e0 = r.trace.energy[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < r.trace.t.size(); ++i)
      worst = std::max(worst,
                       std::abs(r.trace.energy[i] + r.trace.dissipation[i] - e0));
    return worst / e0;
  };
  double res8 = worst_residual(run);
  CHECK(res8 <= 2e-7);
  for (std::size_t i = 1; i < run.trace.t.size(); ++i)
    CHECK(run.trace.energy[i] <= run.trace.energy[i - 1] + 1e-12);

  // the dissipation quadrature is fourth order in the substep
  DampedRun fine = run_damped(basis, d, init, 5.0, 0.25, 32);
  double res32 = worst_residual(fine);
  CHECK(res32 <= 1e-9);
  CHECK(res8 / res32 > 50.0);

  CHECK_THROWS_AS(run_damped(basis, d, init, 5.0, 0.25, 7), validation_error);
  CHECK_THROWS_AS(run_damped(basis, d, init, 5.0, -1.0), validation_error);
}

TEST_CASE("normal trace energy of a single mode over periods") {
  EigenBasis basis = build_basis(square(), 4);
  ModalState s = make_state(basis);
  s.b0[0] = 1.0;
  double mu = basis.modes[0].mu;
  double period = 2.0 * M_PI / std::sqrt(mu);

  FaceSet all_faces{true, true, true};
  double one = normal_trace_energy(basis, s, all_faces, period);
  CHECK(one == Catch::Approx(period * mu).epsilon(1e-8));
  double two = normal_trace_energy(basis, s, all_faces, 2.0 * period);
  CHECK(two == Catch::Approx(2.0 * one).epsilon(1e-8));

  FaceSet top{true, false, false};
  double top_only = normal_trace_energy(basis, s, top, period);
  CHECK(top_only == Catch::Approx(period / 2.0 * M_PI * M_PI / 4.0).epsilon(1e-8));

  ModalState zero = make_state(basis);
  CHECK(normal_trace_energy(basis, zero, all_faces, period) == 0.0);
  CHECK(normal_trace_energy(basis, s, FaceSet{}, period) == 0.0);
}

TEST_CASE("state CSV round trip") {
  EigenBasis basis = build_basis(square(), 5);
  ModalState s = make_state(basis);
  for (int j = 0; j < 5; ++j) {
    s.b0[j] = std::sin(1.0 + j) * 1e-3;
    s.b1[j] = std::cos(2.0 + j);
  }
  std::string csv = state_to_csv(basis, s);
  ModalState t = state_from_csv(basis, csv);
  CHECK((t.b0 - s.b0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.b1 - s.b1).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(state_from_csv(basis, ""), validation_error);
  CHECK_THROWS_AS(state_from_csv(basis, "index,mu,b0,b1\n1,2,3\n"), validation_error);
  CHECK_THROWS_AS(state_from_csv(basis, "index,mu,b0,b1\n9,1,0,0\n"), validation_error);
}

TEST_CASE("three-dimensional eigenvalue growth is polynomial") {
  DomainSpec cube = make_domain(3, 1.0, 1.0, 1.0, 0.2, 0.2);
  EigenBasis basis = build_basis(cube, 300);
  double c_min = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= 300; ++j) {
    double ratio = basis.modes[static_cast<std::size_t>(j - 1)].mu / std::pow(j, 2.0 / 3.0);
    c_min = std::min(c_min, ratio);
  }
  CHECK(c_min > 0.5);
  CHECK(basis.modes[299].mu > basis.modes[0].mu * 10.0);
}
