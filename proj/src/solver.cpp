#include "nsgap/solver.hpp"

#include <cmath>
#include <sstream>

#include "nsgap/fft.hpp"
#include "nsgap/kernels.hpp"

namespace nsgap {
namespace {

using Cplx = std::complex<double>;

std::string cfl_message(double cfl, double suggested) {
  std::ostringstream msg;
  msg << "CFL violation: advective CFL number " << cfl << " exceeds the limit; suggested dt <= "
      << suggested;
  return msg.str();
}

// Builds a new field whose coefficient (c, i) is f(c, i, |k|^2).
template <class F>
SpectralField combine(const Grid& g, F&& f) {
  std::vector<SpectralField::Coeffs> out(static_cast<std::size_t>(g.dim),
                                         SpectralField::Coeffs(g.size()));
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double k2 = kernels::ksq(g.wavevector(i));
    for (int c = 0; c < g.dim; ++c) out[c][i] = f(c, i, k2);
  }
  return SpectralField(g, std::move(out));
}

}  // namespace

CflViolation::CflViolation(double cfl, double suggested_dt)
    : std::runtime_error(cfl_message(cfl, suggested_dt)), cfl_(cfl), suggested_dt_(suggested_dt) {}

struct MnsSolver::Workspace {
  explicit Workspace(const Grid& g) : fft(g, 2 * g.dim + g.dim * g.dim) {}
  FftEngine fft;
};

MnsSolver::MnsSolver(const SolverConfig& config) : config_(config) {
  validate(config_);
  ws_ = std::make_unique<Workspace>(config_.grid);
}

MnsSolver::~MnsSolver() = default;

SpectralField MnsSolver::advection(const SpectralField& v) {
  const Grid& g = config_.grid;
  if (!(v.grid() == g)) throw std::invalid_argument("advection: field grid differs from solver grid");
  last_cfl_ = 0.0;
  last_speed_sum_ = 0.0;
  if (!config_.nonlinear || v.is_zero()) return SpectralField(g);

  const int dim = g.dim;
  auto& fft = ws_->fft;
  const int grad0 = dim;
  const int out0 = dim + dim * dim;
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  const int m = config_.m;
  const auto profile = config_.mollifier;
  const bool dealias = config_.dealias;

  std::vector<std::complex<double>*> bufs(static_cast<std::size_t>(fft.buffer_count()));
  for (int b = 0; b < fft.buffer_count(); ++b) bufs[b] = fft.buffer(b).data();

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto k = g.wavevector(i);
    const double keep = (dealias && !dealias_keep(k, g.n)) ? 0.0 : 1.0;
    const double moll = keep * mollifier_factor(k, m, profile);
    for (int c = 0; c < dim; ++c) {
      const Cplx vc = v.component(c)[i];
      bufs[c][i] = moll * vc;
      for (int j = 0; j < dim; ++j) {
        bufs[grad0 + c * dim + j][i] = keep * Cplx{0.0, static_cast<double>(k[j])} * vc;
      }
    }
  }
  for (int b = 0; b < out0; ++b) fft.to_physical(b);

  for (int j = 0; j < dim; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mx = std::max(mx, std::abs(bufs[j][i].real()));
    last_speed_sum_ += mx;
  }

  std::vector<const Cplx*> u(bufs.begin(), bufs.begin() + dim);
  std::vector<const Cplx*> grad(bufs.begin() + grad0, bufs.begin() + out0);
  std::vector<Cplx*> out(bufs.begin() + out0, bufs.end());
  kernels::parallel::advect(g.size(), dim, u, grad, out);
  for (int c = 0; c < dim; ++c) fft.to_spectral(out0 + c);

  std::vector<SpectralField::Coeffs> comps(static_cast<std::size_t>(dim));
  for (int c = 0; c < dim; ++c) comps[c].assign(bufs[out0 + c], bufs[out0 + c] + g.size());
  kernels::Components view{};
  for (int c = 0; c < dim; ++c) view[c] = comps[c];
  if (dealias) {
    kernels::parallel::scale_modes(g, view, [&g](const std::array<int, 3>& k) {
      return dealias_keep(k, g.n) ? -1.0 : 0.0;
    });
  } else {
    kernels::parallel::scale_modes(g, view, [](const std::array<int, 3>&) { return -1.0; });
  }
  kernels::parallel::leray_project(g, view);
  kernels::parallel::hermitian_symmetrize(g, view);
  return SpectralField(g, std::move(comps));
}

SpectralField MnsSolver::rhs(const SpectralField& v) {
  const SpectralField nl = advection(v);
  return combine(config_.grid, [&](int c, std::size_t i, double k2) {
    return -k2 * v.component(c)[i] + nl.component(c)[i];
  });
}

double MnsSolver::exact_dDdt(const SpectralField& v) { return 2.0 * grad_inner(v, rhs(v)); }

void MnsSolver::check_cfl(double dt) const {
  const double dx = config_.grid.spacing();
  const double cfl = dt * last_speed_sum_ / dx;
  if (cfl > config_.cfl_max) {
    throw CflViolation(cfl, 0.5 * config_.cfl_max * dx / last_speed_sum_);
  }
}

SpectralField MnsSolver::step_with(const SpectralField& v, const SpectralField& n0, double dt) {
  const Grid& g = config_.grid;
  if (config_.integrator == Integrator::kImexRk2) {
    // Lawson RK2 (integrating-factor Heun).
    const SpectralField stage = combine(g, [&](int c, std::size_t i, double k2) {
      return std::exp(-k2 * dt) * (v.component(c)[i] + dt * n0.component(c)[i]);
    });
    const SpectralField n1 = advection(stage);
    return combine(g, [&](int c, std::size_t i, double k2) {
      const double e = std::exp(-k2 * dt);
      return e * (v.component(c)[i] + 0.5 * dt * n0.component(c)[i]) + 0.5 * dt * n1.component(c)[i];
    });
  }
  // Lawson RK4.
  const SpectralField v1 = combine(g, [&](int c, std::size_t i, double k2) {
    return std::exp(-0.5 * k2 * dt) * (v.component(c)[i] + 0.5 * dt * n0.component(c)[i]);
  });
  const SpectralField b = advection(v1);
  const SpectralField v2 = combine(g, [&](int c, std::size_t i, double k2) {
    return std::exp(-0.5 * k2 * dt) * v.component(c)[i] + 0.5 * dt * b.component(c)[i];
  });
  const SpectralField cc = advection(v2);
  const SpectralField v3 = combine(g, [&](int c, std::size_t i, double k2) {
    return std::exp(-k2 * dt) * v.component(c)[i] +
           dt * std::exp(-0.5 * k2 * dt) * cc.component(c)[i];
  });
  const SpectralField d = advection(v3);
  return combine(g, [&](int c, std::size_t i, double k2) {
    const double e = std::exp(-k2 * dt);
    const double eh = std::exp(-0.5 * k2 * dt);
    return e * v.component(c)[i] +
           dt / 6.0 *
               (e * n0.component(c)[i] + 2.0 * eh * (b.component(c)[i] + cc.component(c)[i]) +
                d.component(c)[i]);
  });
}

SolverState MnsSolver::step(const SolverState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  const SpectralField n0 = advection(state.v);
  check_cfl(dt);
  return SolverState{step_with(state.v, n0, dt), state.time + dt};
}

Trajectory MnsSolver::run(const SpectralField& v0) {
  const Grid& g = config_.grid;
  if (!(v0.grid() == g)) throw std::invalid_argument("run: initial field grid differs from config");
  const double scale = std::sqrt(kernels::parallel::sum_sq(g, v0.view()));
  if (max_abs_divergence(v0) > 1e-10 * std::max(1.0, scale) * g.n) {
    throw std::invalid_argument("run: initial field is not divergence-free");
  }
  SpectralField v = config_.mollify_initial ? mollify(v0, config_.m, config_.mollifier) : v0;

  Trajectory traj;
  traj.config = config_;
  const long steps = step_count(config_);
  long sample_no = 0;
  for (long n = 0;; ++n) {
    const SpectralField n0 = advection(v);
    if (n % config_.sample_every == 0 || n == steps) {
      const double t = static_cast<double>(n) * config_.dt;
      const SpectralField vt = combine(g, [&](int c, std::size_t i, double k2) {
        return -k2 * v.component(c)[i] + n0.component(c)[i];
      });
      traj.times.push_back(t);
      traj.energy.push_back(l2_norm_sq(v));
      traj.grad_norm_sq.push_back(grad_norm_sq(v));
      traj.dgrad_dt.push_back(2.0 * grad_inner(v, vt));
      if (config_.snapshot_every > 0 && sample_no % config_.snapshot_every == 0) {
        traj.snapshots.emplace_back(t, v);
      }
      ++sample_no;
    }
    if (n == steps) break;
    check_cfl(config_.dt);
    v = step_with(v, n0, config_.dt);
  }
  return traj;
}

SpectralField rhs(const SpectralField& v, int m, bool dealias) {
  SolverConfig c;
  c.grid = v.grid();
  c.m = std::min(m, v.grid().n / 2);
  c.dealias = dealias;
  MnsSolver solver(c);
  return solver.rhs(v);
}

double exact_dDdt(const SpectralField& v, int m, bool dealias) {
  SolverConfig c;
  c.grid = v.grid();
  c.m = std::min(m, v.grid().n / 2);
  c.dealias = dealias;
  MnsSolver solver(c);
  return solver.exact_dDdt(v);
}

Trajectory run(const SolverConfig& config, const SpectralField& v0) {
  MnsSolver solver(config);
  return solver.run(v0);
}

}  // namespace nsgap
