#include <doctest.h>

#include <cmath>
#include <sstream>

#include "arnoldi_lindblad/oracle.hpp"
#include "helpers.hpp"

using namespace al_test;

namespace {

IntegratorConfig fixed_steps(int n) {
  IntegratorConfig cfg;
  cfg.substeps = n;
  cfg.stability_guard = false;
  return cfg;
}

double mean_photons(const Operator& rho) {
  const Operator n = create(rho.space().n_max) * destroy(rho.space().n_max);
  return expectation(n, rho).real();
}

}  // namespace

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  cfg.substeps = 0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.dt = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.rtol = 0.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("trivial model propagates as the identity") {
  const auto space = HilbertSpec::full(2, 2);
  const LindbladModel model(Operator::zero(space), {});
  const Operator rho = random_operator(space, 3);
  for (double t : {0.01, 1.0, 50.0}) {
    CHECK(propagate(model, rho, 0.0, t).matrix() == rho.matrix());
    IntegratorConfig dp;
    dp.method = IntegratorMethod::DormandPrince45;
    CHECK(rel_error(propagate(model, rho, 0.0, t, dp).matrix(), rho.matrix()) < 1e-15);
  }
}

TEST_CASE("photon number decays exponentially") {
  const double gamma = 0.8;
  const auto model = decaying_mode(4, gamma);
  const Operator rho0 = random_density_matrix(model.space(), 11).op();
  const double n0 = mean_photons(rho0);
  for (double t : {0.05, 1.0, 3.0}) {
    const Operator rho = propagate(model, rho0, 0.0, t);
    CHECK(std::abs(mean_photons(rho) - n0 * std::exp(-gamma * t)) < 1e-10);
    IntegratorConfig dp;
    dp.method = IntegratorMethod::DormandPrince45;
    const Operator rho_dp = propagate(model, rho0, 0.0, t, dp);
    CHECK(std::abs(mean_photons(rho_dp) - n0 * std::exp(-gamma * t)) < 1e-8);
  }
}

TEST_CASE("RK4 is fourth order on the decaying mode") {
  const auto model = decaying_mode(1, 1.0);
  Operator rho0 = fock_projector(model.space(), 1);
  const double exact = std::exp(-2.0);
  double prev = 0.0;
  for (int steps : {8, 16, 32}) {
    const double err = std::abs(mean_photons(propagate(model, rho0, 0.0, 2.0, fixed_steps(steps))) - exact);
    if (prev > 0.0) {
      const double ratio = prev / err;
      CHECK(ratio > 14.0);
      CHECK(ratio < 18.0);
    }
    prev = err;
  }
}

TEST_CASE("RK4 amplification factor stays within the unit disc on the guarded region") {
  // |z| <= kRk4StableRadius, Re z <= 0
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const cplx z(-kRk4StableRadius * i / 200.0, kRk4StableRadius * (2.0 * j / 200.0 - 1.0));
      if (std::abs(z) > kRk4StableRadius) continue;
      const cplx r = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
      CHECK(std::abs(r) <= 1.0 + 1e-12);
    }
}

TEST_CASE("stability guard raises the step count") {
  const auto model = ddbh_model(dimer_fig3_params(3));
  IntegratorConfig cfg;
  CHECK(fixed_step_count(model, 0.05, cfg) == 200);
  const int n = fixed_step_count(model, 10.0, cfg);
  CHECK(n >= static_cast<int>(std::ceil(10.0 * model.generator_radius_bound() / 2.0)));
  cfg.stability_guard = false;
  CHECK(fixed_step_count(model, 10.0, cfg) == 200);
  cfg.dt = 0.01;
  CHECK(fixed_step_count(model, 0.05, cfg) == 5);
}

TEST_CASE("trace and Hermiticity drift on physical inputs") {
  for (const auto& model : {ddbh_model(dimer_fig3_params(3)), floquet_dimer_model(floquet_fig8_params(8))}) {
    const Operator rho0 = random_density_matrix(model.space(), 2).op();
    for (auto method : {IntegratorMethod::RK4, IntegratorMethod::DormandPrince45}) {
      IntegratorConfig cfg;
      cfg.method = method;
      const double tol = method == IntegratorMethod::RK4 ? 1e-12 : cfg.rtol;
      const Operator rho = propagate(model, rho0, 0.3, 1.7, cfg);
      CHECK(std::abs(rho.trace() - 1.0) < 10 * tol);
      CHECK((rho.matrix() - rho.matrix().adjoint()).norm() < 10 * tol);
    }
  }
}

TEST_CASE("linearity on non-physical inputs") {
  const auto model = ddbh_model(dimer_fig3_params(2));
  const Operator a = random_operator(model.space(), 1), b = random_operator(model.space(), 2);
  const cplx alpha(1.5, 0.5), beta(-0.25, 2.0);
  const Matrix lhs = propagate(model, alpha * a + beta * b, 0.0, 0.4).matrix();
  const Matrix rhs = alpha * propagate(model, a, 0.0, 0.4).matrix() + beta * propagate(model, b, 0.0, 0.4).matrix();
  CHECK(rel_error(lhs, rhs) < 1e-12);
}

TEST_CASE("composition threads absolute time") {
  const auto model = floquet_dimer_model(floquet_fig8_params(6));
  const Operator rho0 = random_density_matrix(model.space(), 9).op();
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const Operator split = propagate(model, propagate(model, rho0, 0.0, 0.7, cfg), 0.7, 1.3, cfg);
  const Operator whole = propagate(model, rho0, 0.0, 2.0, cfg);
  CHECK((split.matrix() - whole.matrix()).norm() < 1e-10);

  IntegratorConfig dp;
  dp.method = IntegratorMethod::DormandPrince45;
  const Operator split_dp = propagate(model, propagate(model, rho0, 0.0, 0.7, dp), 0.7, 1.3, dp);
  CHECK((split_dp.matrix() - whole.matrix()).norm() < 10 * 1e-8);

  // A wrong start time changes the answer for a driven model.
  const Operator shifted = propagate(model, rho0, 1.0, 2.0, cfg);
  CHECK((shifted.matrix() - whole.matrix()).norm() > 1e-4);
}

TEST_CASE("matches the dense exponential of the oracle Liouvillian") {
  const auto model = ddbh_model(dimer_fig3_params(3));
  const auto lmat = build_liouvillian_matrix(model);
  const Matrix e = expm_dense(Matrix(lmat.data * 0.05));
  for (unsigned seed = 0; seed < 3; ++seed) {
    const Operator rho = random_density_matrix(model.space(), seed).op();
    const Matrix expect = devectorize(Vector(e * vectorize(rho)));
    CHECK((propagate(model, rho, 0.0, 0.05).matrix() - expect).norm() < 1e-8);
  }
}

TEST_CASE("adaptive integrator reports step-size underflow with the failure time") {
  const auto model = ddbh_model(dimer_fig3_params(3));
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::DormandPrince45;
  cfg.rtol = 1e-15;
  cfg.atol = 1e-300;
  cfg.min_step = 0.1;
  const Operator rho = random_density_matrix(model.space(), 1).op();
  try {
    propagate(model, rho, 2.0, 1.0, cfg);
    FAIL("expected StepSizeUnderflow");
  } catch (const StepSizeUnderflow& e) {
    CHECK(e.time() >= 2.0);
    CHECK(e.time() < 3.0);
  }
}

TEST_CASE("propagate preconditions") {
  const auto model = decaying_mode(2);
  const Operator rho = fock_projector(model.space(), 1);
  CHECK_THROWS_AS(propagate(model, rho, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate(model, rho, 0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate(model, fock_projector(HilbertSpec::full(1, 3), 0), 0.0, 1.0), DimensionError);
}

TEST_CASE("observable trajectory") {
  const auto model = ddbh_model(dimer_fig3_params(3));
  const Operator rho0 = random_density_matrix(model.space(), 4).op();
  std::vector<double> times;
  for (int i = 0; i <= 30; ++i) times.push_back(0.5 * i);

  SUBCASE("no observables gives the time column only") {
    const auto traj = observable_trajectory(model, rho0, times, {});
    CHECK(traj.times.size() == times.size());
    CHECK(traj.values.front().empty());
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    CHECK(csv.str().substr(0, 2) == "t\n");
  }
  SUBCASE("identity gives ones and n1 follows the oracle") {
    const Operator n1 = embed(create(3) * destroy(3), 1, model.space());
    const auto traj = observable_trajectory(
        model, rho0, times, {{"I", Operator::identity(model.space())}, {"n1", n1}});
    const auto lmat = build_liouvillian_matrix(model);
    const Matrix step = expm_dense(Matrix(lmat.data * 0.5));
    Vector v = vectorize(rho0);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(traj.values[i][0] - 1.0) < 1e-10);
      const cplx expect = expectation(n1, devectorize(v, model.space()));
      worst = std::max(worst, std::abs(traj.values[i][1] - expect));
      v = step * v;
    }
    CHECK(worst < 1e-6);

    std::stringstream csv;
    write_trajectory_csv(csv, traj);
    CHECK(csv.str().rfind("t,re(I),im(I),re(n1),im(n1)\n", 0) == 0);
    const auto back = read_trajectory_csv(csv);
    CHECK(back.names == traj.names);
    CHECK(back.times == traj.times);
    CHECK(back.values[7][1] == traj.values[7][1]);
  }
  SUBCASE("invalid sample times") {
    CHECK_THROWS(observable_trajectory(model, rho0, {}, {}));
    CHECK_THROWS(observable_trajectory(model, rho0, {-1.0, 0.0}, {}));
    CHECK_THROWS(observable_trajectory(model, rho0, {1.0, 0.5}, {}));
  }
}
