#include "gbbm/flow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "gbbm/error.hpp"
#include "gbbm/parallel.hpp"

namespace gbbm {
namespace {

using Modes = std::vector<Complex>;

constexpr int kDirectProductLimit = 32;

int next_pow2(int n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

// Modes 1..N of the product u v for u, v in E_N.
void truncated_product(const Modes& u, const Modes& v, Modes& out) {
  const int n_modes = static_cast<int>(u.size());
  if (n_modes < kDirectProductLimit) {
    for (int n = 1; n <= n_modes; ++n) {
      Complex sum{};
      for (int a = 1; a < n; ++a) sum += u[a - 1] * v[n - a - 1];
      for (int a = n + 1; a <= n_modes; ++a)
        sum += u[a - 1] * std::conj(v[a - n - 1]) + v[a - 1] * std::conj(u[a - n - 1]);
      out[n - 1] = sum;
    }
    return;
  }
  // A grid of more than 3N points keeps the aliased images of modes N+1..2N
  // away from 1..N.
  const int grid = next_pow2(3 * n_modes + 1);
  thread_local std::vector<double> gu, gv;
  gu.resize(grid);
  gv.resize(grid);
  detail::synthesize_real(u, gu);
  if (&u == &v) {
    for (int j = 0; j < grid; ++j) gu[j] *= gu[j];
  } else {
    detail::synthesize_real(v, gv);
    for (int j = 0; j < grid; ++j) gu[j] *= gv[j];
  }
  detail::analyze_real(gu, out);
}

// Vector field of the truncated system with cached phase speeds.
class ModeSystem {
 public:
  explicit ModeSystem(const GbbmParams& p) : nonlinear_(p.nonlinear()), omega_(p.n_modes()) {
    for (int n = 1; n <= p.n_modes(); ++n) omega_[n - 1] = p.phase_speed(n);
  }

  int size() const { return static_cast<int>(omega_.size()); }
  double omega(int n) const { return omega_[n - 1]; }

  void rhs(const Modes& u, Modes& out) const {
    out.resize(u.size());
    if (nonlinear_) {
      truncated_product(u, u, out);
    } else {
      std::fill(out.begin(), out.end(), Complex{});
    }
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = Complex{0.0, -omega_[k]} * (u[k] + out[k]);
  }

  // Linearization of rhs at u applied to v.
  void linear_rhs(const Modes& u, const Modes& v, Modes& out) const {
    out.resize(v.size());
    if (nonlinear_) {
      truncated_product(u, v, out);
    } else {
      std::fill(out.begin(), out.end(), Complex{});
    }
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = Complex{0.0, -omega_[k]} * (v[k] + 2.0 * out[k]);
  }

  // Bound on the operator norm of linear_rhs(u, ·).
  double linear_scale(const Modes& u) const {
    double l1 = 0.0;
    for (Complex c : u) l1 += std::abs(c);
    const double wmax = *std::max_element(omega_.begin(), omega_.end());
    return wmax * (1.0 + (nonlinear_ ? 4.0 * l1 : 0.0));
  }

 private:
  bool nonlinear_;
  std::vector<double> omega_;
};

void axpy(Modes& out, const Modes& x, double a, const Modes& y) {
  out.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + a * y[k];
}

void check_finite(const Modes& u, double time) {
  for (Complex c : u) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << time;
      throw FlowError(msg.str(), time);
    }
  }
}

struct Rk4 {
  Modes k1, k2, k3, k4, tmp;

  template <class Rhs>
  void step(Modes& u, double h, Rhs&& f) {
    f(u, k1);
    axpy(tmp, u, 0.5 * h, k1);
    f(tmp, k2);
    axpy(tmp, u, 0.5 * h, k2);
    f(tmp, k3);
    axpy(tmp, u, h, k3);
    f(tmp, k4);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
};

Modes modes_of(const SpectralField& u, const GbbmParams& p, const char* what) {
  if (u.support() > p.n_modes()) {
    std::ostringstream msg;
    msg << what << ": field has modes above the cutoff N = " << p.n_modes();
    throw DomainError(msg.str());
  }
  Modes m(u.coeffs().begin(), u.coeffs().end());
  m.resize(static_cast<std::size_t>(p.n_modes()));
  return m;
}

int step_count(double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (t == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt - 1e-9)));
}

}  // namespace

GbbmParams::GbbmParams(double gamma, int s, int n_modes, bool nonlinear)
    : gamma_(gamma), s_(s), n_modes_(n_modes), nonlinear_(nonlinear) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("GbbmParams: gamma must be > 1");
  if (s < 1) throw DomainError("GbbmParams: s must be >= 1");
  if (n_modes < 1) throw DomainError("GbbmParams: n_modes must be >= 1");
}

double GbbmParams::phase_speed(int n) const {
  const double x = static_cast<double>(n);
  return x / (1.0 + std::pow(x, gamma_));
}

double Trajectory::max_relative_drift() const {
  if (conserved_log.empty()) return 0.0;
  const double ref = conserved_log.front();
  double worst = 0.0;
  for (double q : conserved_log) worst = std::max(worst, std::abs(q - ref));
  return ref == 0.0 ? worst : worst / ref;
}

SpectralField free_evolution(const SpectralField& u, double gamma, double t) {
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  for (int n = 1; n <= u.n_max(); ++n) {
    const double x = static_cast<double>(n);
    const double omega = x / (1.0 + std::pow(x, gamma));
    c[n - 1] *= std::polar(1.0, -t * omega);
  }
  return SpectralField(std::move(c));
}

SpectralField gbbm_rhs(const SpectralField& u, const GbbmParams& p) {
  const Modes m = modes_of(u, p, "gbbm_rhs");
  Modes out;
  ModeSystem(p).rhs(m, out);
  return SpectralField(std::move(out));
}

double conserved_quantity(const SpectralField& u, double gamma) {
  double sum = 0.0;
  for (int n = 1; n <= u.n_max(); ++n) sum += (1.0 + std::pow(n, gamma)) * std::norm(u[n]);
  return 4.0 * std::numbers::pi * sum;
}

double truncated_energy(const SpectralField& u, const GbbmParams& p) {
  const double weight = 2.0 * p.energy_index();
  const int top = std::min(u.n_max(), p.n_modes());
  double sum = 0.0;
  for (int n = 1; n <= top; ++n) sum += std::pow(n, weight) * std::norm(u[n]);
  return sum;
}

Trajectory integrate(const SpectralField& u0, const GbbmParams& p, double t_final, double dt,
                     const IntegrateOptions& options) {
  Modes u = modes_of(u0, p, "integrate");
  const int steps = step_count(t_final, dt);
  const double h = steps == 0 ? 0.0 : t_final / steps;
  const ModeSystem sys(p);

  Trajectory traj{p, {}, {}, {}, {}, false};
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  auto record = [&](double time) {
    SpectralField state(u);
    traj.conserved_log.push_back(conserved_quantity(state, p.gamma()));
    traj.energy_log.push_back(truncated_energy(state, p));
    traj.times.push_back(time);
    traj.states.push_back(std::move(state));
  };
  record(0.0);
  Rk4 rk;
  for (int k = 1; k <= steps; ++k) {
    rk.step(u, h, [&](const Modes& x, Modes& out) { sys.rhs(x, out); });
    const double time = k == steps ? t_final : k * h;
    check_finite(u, time);
    record(time);
  }
  traj.flagged = traj.max_relative_drift() > options.drift_tolerance;
  return traj;
}

SpectralField flow_map(const SpectralField& u0, const GbbmParams& p, double t, double dt) {
  Modes u = modes_of(u0, p, "flow_map");
  const int steps = step_count(t, dt);
  if (steps == 0) return SpectralField(std::move(u));
  const double h = t / steps;
  const ModeSystem sys(p);
  Rk4 rk;
  for (int k = 1; k <= steps; ++k) {
    rk.step(u, h, [&](const Modes& x, Modes& out) { sys.rhs(x, out); });
    check_finite(u, k * h);
  }
  return SpectralField(std::move(u));
}

SpectralField galerkin_flow(const SpectralField& u0, const GbbmParams& p, double t, double dt) {
  const int n = p.n_modes();
  const SpectralField head = flow_map(dirichlet_project(u0, n).resized(n), p, t, dt);
  if (u0.n_max() <= n) return head;
  SpectralField tail = free_evolution(u0 - dirichlet_project(u0, n), p.gamma(), t);
  return tail + head;
}

double picard_time_limit(const SpectralField& u0, const GbbmParams& p, double contraction) {
  return contraction / (1.0 + sobolev_norm(u0, 0.5 * p.gamma()));
}

PicardResult picard_local_solve(const SpectralField& u0, const GbbmParams& p, double tau, double tol,
                                int max_iter, int nodes) {
  if (nodes < 3) throw DomainError("picard_local_solve: need at least 3 quadrature intervals");
  if (!(tol > 0.0)) throw DomainError("picard_local_solve: tol must be positive");
  const Modes init = modes_of(u0, p, "picard_local_solve");
  const int n_modes = p.n_modes();
  const ModeSystem sys(p);
  const double h = tau / nodes;
  const double half_gamma = 0.5 * p.gamma();

  // rotation[j][k] = e^{-i t_j ω_k}
  std::vector<Modes> rotation(nodes + 1, Modes(n_modes));
  for (int j = 0; j <= nodes; ++j)
    for (int k = 0; k < n_modes; ++k) rotation[j][k] = std::polar(1.0, -j * h * sys.omega(k + 1));

  std::vector<Modes> iterate(nodes + 1, Modes(n_modes));
  for (int j = 0; j <= nodes; ++j)
    for (int k = 0; k < n_modes; ++k) iterate[j][k] = rotation[j][k] * init[k];

  // Cubic-interpolation weights (×h/24) for ∫ over one interval.
  static constexpr double kFirst[4] = {9, 19, -5, 1};
  static constexpr double kInner[4] = {-1, 13, 13, -1};
  static constexpr double kLast[4] = {1, -5, 19, 9};

  PicardResult result{SpectralField(n_modes), {}};
  std::vector<Modes> integrand(nodes + 1, Modes(n_modes));
  Modes product(n_modes);
  for (int iter = 0; iter < max_iter; ++iter) {
    // S(-τ) (1+|D|^γ)^{-1} ∂_x π_N(u(τ)²) at each node.
    for (int j = 0; j <= nodes; ++j) {
      if (p.nonlinear()) {
        truncated_product(iterate[j], iterate[j], product);
      } else {
        std::fill(product.begin(), product.end(), Complex{});
      }
      for (int k = 0; k < n_modes; ++k)
        integrand[j][k] = std::conj(rotation[j][k]) * Complex{0.0, sys.omega(k + 1)} * product[k];
    }
    Modes cumulative(n_modes);
    double distance = 0.0;
    for (int j = 0; j <= nodes; ++j) {
      if (j > 0) {
        const int interval = j - 1;
        const double* w = interval == 0 ? kFirst : (interval == nodes - 1 ? kLast : kInner);
        const int first = interval == 0 ? 0 : (interval == nodes - 1 ? nodes - 3 : interval - 1);
        for (int q = 0; q < 4; ++q)
          for (int k = 0; k < n_modes; ++k) cumulative[k] += (h / 24.0) * w[q] * integrand[first + q][k];
      }
      Modes next(n_modes);
      double dist2 = 0.0;
      for (int k = 0; k < n_modes; ++k) {
        next[k] = rotation[j][k] * (init[k] - cumulative[k]);
        dist2 += std::pow(k + 1.0, p.gamma()) * std::norm(next[k] - iterate[j][k]);
      }
      distance = std::max(distance, std::sqrt(dist2));
      iterate[j] = std::move(next);
    }
    result.distances.push_back(distance);
    if (distance < tol) {
      result.state = SpectralField(iterate[nodes]);
      return result;
    }
  }
  std::ostringstream msg;
  msg << "Picard iteration did not contract within " << max_iter << " iterations (tau = " << tau
      << ", last distance = " << result.distances.back() << "); tau is likely above the contraction limit "
      << picard_time_limit(u0, p) << " in H^" << half_gamma;
  throw PicardError(msg.str(), result.distances);
}

std::vector<std::pair<double, double>> diagonal_partials(const SpectralField& u, const GbbmParams& p) {
  const Modes base = modes_of(u, p, "diagonal_partials");
  const ModeSystem sys(p);
  Modes plus = base, minus = base, f_plus, f_minus;
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(sys.size()));
  for (int k = 0; k < sys.size(); ++k) {
    const double step = 1e-5 * std::max(1.0, std::abs(base[k]));
    for (int part = 0; part < 2; ++part) {
      const Complex direction = part == 0 ? Complex{1.0, 0.0} : Complex{0.0, 1.0};
      plus[k] = base[k] + step * direction;
      minus[k] = base[k] - step * direction;
      sys.rhs(plus, f_plus);
      sys.rhs(minus, f_minus);
      const Complex diff = (f_plus[k] - f_minus[k]) / (2.0 * step);
      (part == 0 ? out[k].first : out[k].second) = part == 0 ? diff.real() : diff.imag();
      plus[k] = minus[k] = base[k];
    }
  }
  return out;
}

double divergence_diagnostic(const SpectralField& u, const GbbmParams& p) {
  double worst = 0.0;
  for (const auto& [da, db] : diagonal_partials(u, p)) worst = std::max(worst, std::abs(da + db));
  return worst;
}

Trajectory linearized_flow(const Trajectory& base, const SpectralField& v0) {
  const GbbmParams& p = base.params;
  Modes v = modes_of(v0, p, "linearized_flow");
  const ModeSystem sys(p);
  const std::size_t steps = base.size() - 1;

  Trajectory out{p, {}, {}, {}, {}, false};
  auto record = [&](double time) {
    SpectralField state(v);
    out.conserved_log.push_back(conserved_quantity(state, p.gamma()));
    out.energy_log.push_back(truncated_energy(state, p));
    out.times.push_back(time);
    out.states.push_back(std::move(state));
  };
  record(base.times.front());

  Modes ua(base.states.front().coeffs().begin(), base.states.front().coeffs().end());
  Modes fa, fb, mid(sys.size()), k1, k2, k3, k4, tmp;
  ua.resize(sys.size());
  sys.rhs(ua, fa);
  for (std::size_t s = 0; s < steps; ++s) {
    const double h = base.times[s + 1] - base.times[s];
    Modes ub(base.states[s + 1].coeffs().begin(), base.states[s + 1].coeffs().end());
    ub.resize(sys.size());
    const double scale = std::abs(h) * std::max(sys.linear_scale(ua), sys.linear_scale(ub));
    if (scale > 0.5) {
      std::ostringstream msg;
      msg << "linearized_flow: base step " << h << " at t = " << base.times[s]
          << " is too coarse (|h| * operator bound = " << scale << " > 0.5)";
      throw ResolutionError(msg.str());
    }
    sys.rhs(ub, fb);
    // Cubic Hermite value at the step midpoint.
    for (int k = 0; k < sys.size(); ++k) mid[k] = 0.5 * (ua[k] + ub[k]) + (h / 8.0) * (fa[k] - fb[k]);

    sys.linear_rhs(ua, v, k1);
    axpy(tmp, v, 0.5 * h, k1);
    sys.linear_rhs(mid, tmp, k2);
    axpy(tmp, v, 0.5 * h, k2);
    sys.linear_rhs(mid, tmp, k3);
    axpy(tmp, v, h, k3);
    sys.linear_rhs(ub, tmp, k4);
    for (int k = 0; k < sys.size(); ++k) v[k] += (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    check_finite(v, base.times[s + 1]);
    record(base.times[s + 1]);
    ua.swap(ub);
    fa.swap(fb);
  }
  return out;
}

double jacobian_determinant(const SpectralField& u0, const GbbmParams& p, double t, double dt) {
  const int n_modes = p.n_modes();
  const int dim = 2 * n_modes;
  if (dim > 40) throw DomainError("jacobian_determinant: requires 2N <= 40");
  Modes u = modes_of(u0, p, "jacobian_determinant");
  const int steps = step_count(t, dt);
  if (steps == 0) return 1.0;
  const double h = t / steps;
  const ModeSystem sys(p);

  // Column c perturbs Re û(c+1) for c < N and Im û(c-N+1) otherwise.
  std::vector<Modes> cols(dim, Modes(n_modes));
  for (int c = 0; c < dim; ++c) cols[c][c % n_modes] = c < n_modes ? Complex{1, 0} : Complex{0, 1};

  // Augmented RK4 on (u, J).
  std::vector<Modes> kc(4 * dim), tmpc(dim);
  Modes ku[4], tmpu, stage_u;
  for (int step = 1; step <= steps; ++step) {
    const double coef[4] = {0.0, 0.5 * h, 0.5 * h, h};
    for (int stage = 0; stage < 4; ++stage) {
      if (stage == 0) {
        stage_u = u;
        for (int c = 0; c < dim; ++c) tmpc[c] = cols[c];
      } else {
        axpy(stage_u, u, coef[stage], ku[stage - 1]);
        for (int c = 0; c < dim; ++c) axpy(tmpc[c], cols[c], coef[stage], kc[(stage - 1) * dim + c]);
      }
      sys.rhs(stage_u, ku[stage]);
      for (int c = 0; c < dim; ++c) sys.linear_rhs(stage_u, tmpc[c], kc[stage * dim + c]);
    }
    for (int k = 0; k < n_modes; ++k) u[k] += (h / 6.0) * (ku[0][k] + 2.0 * ku[1][k] + 2.0 * ku[2][k] + ku[3][k]);
    for (int c = 0; c < dim; ++c)
      for (int k = 0; k < n_modes; ++k)
        cols[c][k] += (h / 6.0) * (kc[c][k] + 2.0 * kc[dim + c][k] + 2.0 * kc[2 * dim + c][k] + kc[3 * dim + c][k]);
    check_finite(u, step * h);
  }

  Eigen::MatrixXd jac(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int k = 0; k < n_modes; ++k) {
      jac(k, c) = cols[c][k].real();
      jac(k + n_modes, c) = cols[c][k].imag();
    }
  return jac.partialPivLu().determinant();
}

SpectralField forced_linear_flow(const SpectralField& h, double gamma, double t) {
  std::vector<Complex> c(h.coeffs().begin(), h.coeffs().end());
  for (int n = 1; n <= h.n_max(); ++n) {
    const double x = static_cast<double>(n);
    const double omega = x / (1.0 + std::pow(x, gamma));
    c[n - 1] *= std::polar(1.0, -t * omega) - 1.0;
  }
  return SpectralField(std::move(c));
}

SpectralField dk_apply(const Trajectory& base, const SpectralField& v0) {
  const Trajectory lin = linearized_flow(base, v0);
  const double t = base.times.back() - base.times.front();
  return free_evolution(lin.final_state(), base.params.gamma(), -t) - v0.resized(base.params.n_modes());
}

DkPartialSums dk_partial_sums(const SpectralField& u0, const GbbmParams& p, double t,
                              std::span<const int> basis_dims, double dt, unsigned workers) {
  if (basis_dims.empty()) throw DomainError("dk_partial_sums: no basis dimensions");
  const int max_dim = *std::max_element(basis_dims.begin(), basis_dims.end());
  if (*std::min_element(basis_dims.begin(), basis_dims.end()) < 1 || max_dim > p.n_modes())
    throw DomainError("dk_partial_sums: basis_dim must lie in [1, N]");

  const Trajectory base = integrate(u0, p, t, dt);
  const double alpha = p.energy_index();

  // column_rows[c][m-1]: squared H^α-coordinates of DK e_c at mode m.
  const int columns = 2 * max_dim;
  std::vector<std::vector<double>> column_rows(columns);
  parallel_for(
      columns,
      [&](std::size_t c) {
        const int mode = static_cast<int>(c / 2) + 1;
        const Complex unit = c % 2 == 0 ? Complex{1, 0} : Complex{0, 1};
        const SpectralField e = SpectralField::single_mode(p.n_modes(), mode, unit * std::pow(mode, -alpha));
        const SpectralField image = dk_apply(base, e);
        std::vector<double> rows(max_dim);
        for (int m = 1; m <= max_dim; ++m) rows[m - 1] = std::pow(m, 2.0 * alpha) * std::norm(image[m]);
        column_rows[c] = std::move(rows);
      },
      workers);

  DkPartialSums out;
  for (int d : basis_dims) {
    double sum = 0.0;
    for (int c = 0; c < 2 * d; ++c)
      for (int m = 0; m < d; ++m) sum += column_rows[c][m];
    out.basis_dims.push_back(d);
    out.hs_squared.push_back(sum);
    out.hs_norm.push_back(std::sqrt(sum));
  }
  return out;
}

double dk_hilbert_schmidt(const SpectralField& u0, const GbbmParams& p, double t, int basis_dim, double dt) {
  const int dims[1] = {basis_dim};
  return dk_partial_sums(u0, p, t, dims, dt).hs_norm.front();
}

}  // namespace gbbm
