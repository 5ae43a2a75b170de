#include <doctest.h>

#include <cmath>
#include <tuple>

#include "nsgap/solver.hpp"

using namespace nsgap;

namespace {

SolverConfig base(int dim, int n, int m, double dt, double T) {
  SolverConfig c;
  c.grid = make_grid(dim, n);
  c.m = m;
  c.dt = dt;
  c.T = T;
  return c;
}

double inner(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (int c = 0; c < a.dim(); ++c) {
    for (std::size_t i = 0; i < a.grid().size(); ++i) s += std::real(a.component(c)[i] * std::conj(b.component(c)[i]));
  }
  return s * a.grid().volume();
}

}  // namespace

TEST_CASE("stokes single mode decays as exp(-2|k|^2 t)") {
  for (const auto integrator : {Integrator::kImexRk2, Integrator::kRk4}) {
    SolverConfig c = base(2, 16, 4, 1e-2, 0.5);
    c.nonlinear = false;
    c.integrator = integrator;
    const Trajectory tr = run(c, single_mode(c.grid, {2, 1, 0}));
    const double E0 = tr.energy.front();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(tr.energy[i] == doctest::Approx(E0 * std::exp(-10.0 * tr.times[i])).epsilon(1e-13));
      CHECK(tr.grad_norm_sq[i] == doctest::Approx(5.0 * tr.energy[i]).epsilon(1e-13));
      CHECK(tr.dgrad_dt[i] == doctest::Approx(-10.0 * tr.grad_norm_sq[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("taylor-green: nonlinear term is a pure gradient, energy decays as exp(-4t)") {
  const Grid g = make_grid(2, 32);
  const SpectralField v = taylor_green(g);
  const SpectralField r = rhs(v, 8);
  double err = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(r.component(c)[i] + 2.0 * v.component(c)[i]));
  }
  CHECK(err < 1e-15);
  const Trajectory tr = run(base(2, 32, 8, 1e-3, 0.2), v);
  CHECK(tr.size() == 201);
  CHECK(tr.energy.back() == doctest::Approx(tr.energy.front() * std::exp(-0.8)).epsilon(1e-13));
}

TEST_CASE("mollified advection does no work: (N(v), v) = 0") {
  for (const int dim : {2, 3}) {
    SolverConfig c = base(dim, dim == 2 ? 32 : 16, dim == 2 ? 8 : 4, 1e-3, 1.0);
    MnsSolver solver(c);
    const SpectralField v = random_divfree(c.grid, -2.0, 11);
    const SpectralField nv = solver.advection(v);
    CHECK(std::abs(inner(nv, v)) < 1e-12 * l2_norm_sq(v));
    CHECK(l2_norm_sq(nv) > 0.0);
    CHECK(max_abs_divergence(nv) < 1e-12);
    // dE/dt = 2 (v, v_t) = -2 D.
    CHECK(2.0 * inner(solver.rhs(v), v) == doctest::Approx(-2.0 * grad_norm_sq(v)).epsilon(1e-12));
  }
}

TEST_CASE("stored dD/dt matches a finite difference of D") {
  const SolverConfig c = base(2, 32, 8, 5e-4, 0.1);
  const Trajectory tr = run(c, random_divfree(c.grid, -3.0, 2));
  const auto& D = tr.grad_norm_sq;
  const double h = c.dt;
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < tr.size(); ++i) {
    const double fd = (D[i - 2] - 8.0 * D[i - 1] + 8.0 * D[i + 1] - D[i + 2]) / (12.0 * h);
    worst = std::max(worst, std::abs(fd - tr.dgrad_dt[i]) / std::abs(tr.dgrad_dt[i]));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("time integrators converge at their design order") {
  const Grid g = make_grid(2, 32);
  const SpectralField v0 = scaled(random_divfree(g, -3.0, 5), 3.0);
  // Coarsest steps sit in the asymptotic range of each scheme.
  for (const auto [integrator, order, dt0] :
       {std::tuple{Integrator::kImexRk2, 2.0, 1.25e-3}, std::tuple{Integrator::kRk4, 4.0, 5e-3}}) {
    double e[3];
    for (int k = 0; k < 3; ++k) {
      SolverConfig c = base(2, 32, 8, dt0 / (1 << k), 0.2);
      c.integrator = integrator;
      e[k] = run(c, v0).energy.back();
    }
    const double rate = std::log2(std::abs(e[0] - e[1]) / std::abs(e[1] - e[2]));
    CHECK(rate > 0.9 * order);
    CHECK(rate < order + 0.75);
  }
}

TEST_CASE("CFL violation reports a usable step") {
  SolverConfig c = base(2, 32, 8, 0.5, 1.0);
  const SpectralField v0 = scaled(random_divfree(c.grid, -3.0, 5), 20.0);
  try {
    (void)run(c, v0);
    FAIL("expected a CFL violation");
  } catch (const CflViolation& e) {
    CHECK(e.cfl() > c.cfl_max);
    CHECK(e.suggested_dt() < c.dt);
    c.dt = e.suggested_dt();
    c.T = 10 * c.dt;
    CHECK_NOTHROW((void)run(c, v0));
  }
}

TEST_CASE("runs are deterministic and respect sampling") {
  SolverConfig c = base(3, 16, 4, 2e-3, 0.02);
  c.sample_every = 3;
  const SpectralField v0 = random_divfree(c.grid, -3.0, 8);
  const Trajectory a = run(c, v0);
  const Trajectory b = run(c, v0);
  CHECK(a.energy == b.energy);
  CHECK(a.grad_norm_sq == b.grad_norm_sq);
  CHECK(a.dgrad_dt == b.dgrad_dt);
  // Steps 0, 3, 6, 9 and the final step 10.
  CHECK(a.size() == 5);
  CHECK(a.times.back() == doctest::Approx(0.02));
}

TEST_CASE("initial data is mollified and checked") {
  const SolverConfig c = base(2, 32, 2, 1e-3, 0.001);
  const SpectralField v0 = random_divfree(c.grid, -1.0, 3);
  const Trajectory tr = run(c, v0);
  CHECK(tr.energy.front() == doctest::Approx(l2_norm_sq(mollify(v0, 2))).epsilon(1e-14));

  std::vector<std::vector<double>> vals(2, std::vector<double>(c.grid.size()));
  for (std::size_t i = 0; i < c.grid.size(); ++i) vals[0][i] = std::sin(c.grid.spacing() * (i / c.grid.n));
  CHECK_THROWS_AS((void)run(c, from_physical(c.grid, vals)), std::invalid_argument);
}
