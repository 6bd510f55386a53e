#include "kerrcat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <boost/math/tools/toms748_solve.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/kernels.hpp"

namespace kerrcat {

void NoiseParams::validate() const {
  if (!(kappa1 >= 0.0) || !(nth >= 0.0) || !(kappa_phi >= 0.0))
    throw InvalidParameter("noise rates must be nonnegative");
}

// ---------------------------------------------------------------------------
// Generator

Lindbladian::Lindbladian(QuantumOperator hamiltonian, std::vector<JumpOperator> jumps)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  if (h_.matrix.rows() != h_.matrix.cols() ||
      static_cast<std::size_t>(h_.matrix.rows()) != h_.basis.dim)
    throw BasisMismatch("Hamiltonian matrix does not match its basis descriptor");
  for (const auto& j : jumps_) {
    if (!(j.op.basis == h_.basis)) throw BasisMismatch("jump operator basis differs from Hamiltonian");
    if (!(j.rate >= 0.0)) throw InvalidParameter("jump rates must be nonnegative");
  }
}

namespace {

// G = -iH - 1/2 sum k L^+L so that L(rho) = G rho + rho G^+ + sum k L rho L^+.
CMatrix effective_generator(const QuantumOperator& h, const std::vector<JumpOperator>& jumps) {
  CMatrix g = -kI * h.matrix;
  for (const auto& j : jumps) g -= 0.5 * j.rate * (j.op.matrix.adjoint() * j.op.matrix);
  return g;
}

}  // namespace

const CMatrix& Lindbladian::superoperator() const {
  if (super_) return *super_;
  const auto d = static_cast<Eigen::Index>(dim());
  const CMatrix g = effective_generator(h_, jumps_);
  auto s = std::make_shared<CMatrix>(CMatrix::Zero(d * d, d * d));
  CMatrix& sm = *s;
  // (I (x) G) + (conj(G) (x) I)
  for (Eigen::Index j = 0; j < d; ++j) {
    sm.block(d * j, d * j, d, d) += g;
    for (Eigen::Index l = 0; l < d; ++l) {
      const cplx c = std::conj(g(j, l));
      if (c == cplx(0)) continue;
      for (Eigen::Index i = 0; i < d; ++i) sm(i + d * j, i + d * l) += c;
    }
  }
  // k conj(L) (x) L
  for (const auto& jump : jumps_) {
    if (jump.rate == 0.0) continue;
    const CMatrix& op = jump.op.matrix;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index l = 0; l < d; ++l) {
        const cplx c = jump.rate * std::conj(op(j, l));
        if (c == cplx(0)) continue;
        sm.block(d * j, d * l, d, d) += c * op;
      }
    }
  }
  super_ = std::move(s);
  return *super_;
}

CMatrix Lindbladian::apply(const CMatrix& rho) const {
  const CMatrix g = effective_generator(h_, jumps_);
  CMatrix out = g * rho + rho * g.adjoint();
  for (const auto& j : jumps_) out += j.rate * (j.op.matrix * rho * j.op.matrix.adjoint());
  return out;
}

CMatrix Lindbladian::apply_adjoint(const CMatrix& x) const {
  const CMatrix g = effective_generator(h_, jumps_);
  CMatrix out = g.adjoint() * x + x * g;
  for (const auto& j : jumps_) out += j.rate * (j.op.matrix.adjoint() * x * j.op.matrix);
  return out;
}

Lindbladian build_lindbladian(const QuantumOperator& h, const std::vector<JumpOperator>& jumps) {
  return Lindbladian(h, jumps);
}

std::vector<JumpOperator> ambient_jumps(const QuantumOperator& a, const QuantumOperator& n,
                                        const NoiseParams& noise) {
  noise.validate();
  std::vector<JumpOperator> out;
  if (noise.kappa_minus() > 0) out.push_back({a, noise.kappa_minus()});
  if (noise.kappa_plus() > 0) out.push_back({a.adjoint(), noise.kappa_plus()});
  if (noise.kappa_phi > 0) out.push_back({n, noise.kappa_phi});
  return out;
}

// ---------------------------------------------------------------------------
// Eigenbasis

EigenBasis make_eigenbasis(const Spectrum& spectrum, std::size_t n_trunc) {
  const std::size_t need_even = (n_trunc + 1) / 2;
  const std::size_t need_odd = n_trunc / 2;
  if (n_trunc == 0 || spectrum.even_levels.size() < need_even ||
      spectrum.odd_levels.size() < need_odd) {
    throw InsufficientLevels("eigenbasis of " + std::to_string(n_trunc) + " states requested, " +
                             std::to_string(spectrum.even_levels.size()) + " even and " +
                             std::to_string(spectrum.odd_levels.size()) + " odd available");
  }
  EigenBasis eb;
  const auto n = static_cast<Eigen::Index>(n_trunc);
  eb.vectors.resize(static_cast<Eigen::Index>(spectrum.dim), n);
  eb.energies.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto k = static_cast<std::size_t>(c / 2);
    const bool even = c % 2 == 0;
    const Level& lv = even ? spectrum.even_levels[k] : spectrum.odd_levels[k];
    eb.vectors.col(c) = lv.state;
    eb.energies(c) = lv.energy;
    eb.parity.push_back(even ? 1 : -1);
    eb.pair_index.push_back(static_cast<int>(k));
  }
  return eb;
}

QuantumOperator project(const QuantumOperator& op, const EigenBasis& eb) {
  if (op.basis.kind != BasisKind::fock || op.basis.dim != static_cast<std::size_t>(eb.vectors.rows()))
    throw BasisMismatch("projection expects a Fock-basis operator of matching dimension");
  return {eb.descriptor(), eb.vectors.adjoint() * op.matrix * eb.vectors};
}

CatModel make_cat_model(const SystemParams& params, std::size_t n_trunc, std::size_t fock_dim) {
  const FockBasis basis(fock_dim ? fock_dim : default_fock_dim(params));
  SpectrumOptions sopts;
  sopts.levels_per_parity = (n_trunc + 1) / 2;
  CatModel cm;
  cm.spectrum = diagonalize(params, basis, sopts);
  cm.code = code_states(cm.spectrum);
  cm.eb = make_eigenbasis(cm.spectrum, n_trunc);
  cm.h = {cm.eb.descriptor(), cm.eb.energies.cast<cplx>().asDiagonal()};
  cm.a = project(annihilation(basis), cm.eb);
  cm.n = project(number(basis), cm.eb);
  cm.s = project(sign_x_observable(basis), cm.eb);
  cm.x = project(position_quadrature(basis), cm.eb);
  cm.ket0 = project_state(cm.code.ket0, cm.eb);
  cm.ket1 = project_state(cm.code.ket1, cm.eb);
  cm.ket_plus = project_state(cm.code.ket_plus, cm.eb);
  cm.ket_minus = project_state(cm.code.ket_minus, cm.eb);
  return cm;
}

CVector project_state(const CVector& psi, const EigenBasis& eb) {
  if (psi.size() != eb.vectors.rows()) throw BasisMismatch("state dimension mismatch");
  return eb.vectors.adjoint() * psi;
}

CMatrix project_density(const CMatrix& rho, const EigenBasis& eb) {
  if (rho.rows() != eb.vectors.rows()) throw BasisMismatch("density dimension mismatch");
  return eb.vectors.adjoint() * rho * eb.vectors;
}

CMatrix lift_density(const CMatrix& rho, const EigenBasis& eb) {
  if (rho.rows() != eb.vectors.cols()) throw BasisMismatch("density dimension mismatch");
  return eb.vectors * rho * eb.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Propagation

namespace {

void check_times(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
      throw InvalidParameter("evolution times must be finite and nonnegative");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidParameter("evolution times must be strictly increasing");
  }
}

// exp(t S) v from cached powers P_j = exp(2^j tau S) plus a Taylor remainder.
class BinaryCachePropagator {
 public:
  BinaryCachePropagator(const CMatrix& s, double t_max) : n_(static_cast<std::size_t>(s.rows())) {
    const double norm = one_norm(s);
    tau_ = norm > 0 ? 0.5 / norm : std::max(t_max, 1.0);
    generator_ = s;
    std::uint64_t steps = static_cast<std::uint64_t>(std::floor(t_max / tau_));
    CMatrix p = expm(s * tau_);
    powers_.push_back(p);
    for (std::uint64_t reach = 2; reach <= steps; reach *= 2) {
      p = p * p;
      powers_.push_back(p);
    }
  }

  CVector apply(double t, const CVector& v) const {
    const auto k = static_cast<std::uint64_t>(std::floor(t / tau_));
    const double r = t - static_cast<double>(k) * tau_;
    CVector cur = v;
    CVector tmp(v.size());
    for (std::size_t j = 0; j < powers_.size() && (k >> j) != 0; ++j) {
      if ((k >> j) & 1u) {
        matvec(powers_[j], cur, tmp);
        cur.swap(tmp);
      }
    }
    if ((k >> powers_.size()) != 0) throw Error("propagation time beyond the cached horizon");
    return taylor(r, cur);
  }

 private:
  void matvec(const RowMajorCMatrix& m, const CVector& x, CVector& y) const {
    kernels::cgemv({m.data(), n_ * n_}, {x.data(), n_}, {y.data(), n_}, n_, n_);
  }

  CVector taylor(double r, const CVector& v) const {
    if (r == 0.0) return v;
    CVector sum = v;
    CVector term = v;
    CVector next(v.size());
    const double base = std::max(v.norm(), 1e-300);
    for (int k = 1; k < 200; ++k) {
      matvec(generator_, term, next);
      term = next * (r / k);
      sum += term;
      if (term.norm() <= 1e-17 * base) return sum;
    }
    throw IntegratorFailure("Taylor remainder did not converge");
  }

  std::size_t n_;
  double tau_;
  RowMajorCMatrix generator_;
  std::vector<RowMajorCMatrix> powers_;
};

// Sequential stepping with exp(dt S) cached per distinct gap.
class StepCachePropagator {
 public:
  explicit StepCachePropagator(const CMatrix& s) : s_(s) {}

  const CMatrix& step(double dt) {
    const double key = std::round(dt * 1e9) / 1e9;
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, expm(s_ * dt)).first;
    return it->second;
  }

 private:
  const CMatrix& s_;
  std::map<double, CMatrix> cache_;
};

template <class Sink>
void propagate(const Lindbladian& lindbladian, const CMatrix& rho0, const std::vector<double>& times,
               const EvolveOptions& opts, Sink&& sink) {
  check_times(times);
  const auto d = static_cast<Eigen::Index>(lindbladian.dim());
  if (rho0.rows() != d || rho0.cols() != d) throw BasisMismatch("initial state dimension mismatch");
  if (times.empty()) return;
  const CMatrix& s = lindbladian.superoperator();
  const CVector v0 = vectorize(rho0);
  auto method = opts.method;
  if (method == PropagationMethod::automatic) {
    method = static_cast<std::size_t>(s.rows()) <= opts.binary_cache_limit
                 ? PropagationMethod::binary_cache
                 : PropagationMethod::step_cache;
  }
  if (method == PropagationMethod::binary_cache) {
    BinaryCachePropagator prop(s, times.back());
    for (std::size_t i = 0; i < times.size(); ++i) sink(i, prop.apply(times[i], v0));
  } else {
    StepCachePropagator prop(s);
    CVector v = v0;
    double t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] > t) v = prop.step(times[i] - t) * v;
      t = times[i];
      sink(i, v);
    }
  }
}

}  // namespace

Trajectory evolve(const Lindbladian& lindbladian, const CMatrix& rho0,
                  const std::vector<double>& times, const EvolveOptions& opts) {
  Trajectory traj;
  traj.times = times;
  traj.states.resize(times.size());
  const auto d = static_cast<Eigen::Index>(lindbladian.dim());
  propagate(lindbladian, rho0, times, opts,
            [&](std::size_t i, const CVector& v) { traj.states[i] = unvectorize(v, d); });
  return traj;
}

std::vector<CVector> evolve_expectations(const Lindbladian& lindbladian, const CMatrix& rho0,
                                         const std::vector<double>& times,
                                         const std::vector<CMatrix>& observables,
                                         const EvolveOptions& opts) {
  // tr(O rho) = vec(O^T) . vec(rho)
  std::vector<CVector> funcs;
  for (const auto& o : observables) {
    if (o.rows() != static_cast<Eigen::Index>(lindbladian.dim()))
      throw BasisMismatch("observable dimension mismatch");
    funcs.push_back(vectorize(o.transpose()));
  }
  std::vector<CVector> out(observables.size(), CVector(static_cast<Eigen::Index>(times.size())));
  propagate(lindbladian, rho0, times, opts, [&](std::size_t i, const CVector& v) {
    for (std::size_t k = 0; k < funcs.size(); ++k)
      out[k](static_cast<Eigen::Index>(i)) = (funcs[k].array() * v.array()).sum();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Steady state

SteadyState steady_state(const Lindbladian& lindbladian, const SteadyStateOptions& opts) {
  const auto d = static_cast<Eigen::Index>(lindbladian.dim());
  const CMatrix& s = lindbladian.superoperator();
  SteadyState out;
  CVector v;
  if (static_cast<std::size_t>(s.rows()) <= opts.svd_limit) {
    Eigen::BDCSVD<CMatrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    const Eigen::Index n = sv.size();
    const double cut = std::max(opts.kernel_tol * sv(0), opts.metastable_rate);
    Eigen::Index k = 1;
    while (k < n && sv(n - 1 - k) < cut) ++k;
    out.kernel_dim = static_cast<std::size_t>(k);
    const CMatrix right = svd.matrixV().rightCols(k);
    if (k == 1) {
      v = right.col(0);
    } else {
      const CMatrix left = svd.matrixU().rightCols(k);
      const CMatrix start = opts.initial ? *opts.initial : CMatrix(CMatrix::Identity(d, d) / double(d));
      if (start.rows() != d) throw BasisMismatch("initial state dimension mismatch");
      const CMatrix overlap = left.adjoint() * right;
      v = right * overlap.fullPivLu().solve(left.adjoint() * vectorize(start));
    }
  } else {
    CMatrix a = s;
    a.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i) a(0, i + d * i) = 1.0;
    CVector rhs = CVector::Zero(d * d);
    rhs(0) = 1.0;
    v = a.partialPivLu().solve(rhs);
  }
  CMatrix rho = unvectorize(v, d);
  rho = hermitian_part(rho / rho.trace());
  out.rho = rho;
  out.residual = lindbladian.apply(rho).norm();
  return out;
}

// ---------------------------------------------------------------------------
// Decay fit

namespace {

struct DecayFunctor : Eigen::DenseFunctor<double> {
  const std::vector<double>& t;
  const std::vector<double>& v;
  double scale;

  DecayFunctor(const std::vector<double>& t_, const std::vector<double>& v_, double scale_)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(t_.size())), t(t_), v(v_), scale(scale_) {}

  // x = (A, g) with Gamma = g / scale
  int operator()(const InputType& x, ValueType& f) const {
    for (std::size_t i = 0; i < t.size(); ++i)
      f(static_cast<Eigen::Index>(i)) = x(0) * std::exp(-2.0 * x(1) * t[i] / scale) - v[i];
    return 0;
  }

  int df(const InputType& x, JacobianType& j) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double e = std::exp(-2.0 * x(1) * t[i] / scale);
      j(static_cast<Eigen::Index>(i), 0) = e;
      j(static_cast<Eigen::Index>(i), 1) = -2.0 * t[i] / scale * x(0) * e;
    }
    return 0;
  }
};

}  // namespace

std::vector<double> log_times(double lo, double hi, std::size_t n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw InvalidParameter("log_times needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double t_start, double t_end) {
  if (times.size() != values.size()) throw FitError("times and values differ in length");
  if (t_end < 0) t_end = times.empty() ? 0.0 : times.back();
  std::vector<double> t;
  std::vector<double> v;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_start && times[i] <= t_end) {
      t.push_back(times[i]);
      v.push_back(values[i]);
    }
  }
  if (t.size() < 10) throw FitError("fit window holds " + std::to_string(t.size()) + " samples, need >= 10");

  DecayFit fit;
  fit.window_start = t.front();
  fit.window_end = t.back();
  const double scale = std::max(t.back(), 1e-300);

  // log-linear initial guess on the positive segment
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t np = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (v[i] <= 0) continue;
    const double y = std::log(v[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++np;
  }
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  if (np >= 2) {
    const double den = np * sxx - sx * sx;
    if (den > 0) {
      const double slope = (np * sxy - sx * sy) / den;
      const double icpt = (sy - slope * sx) / np;
      x << std::exp(icpt), -0.5 * slope * scale;
    }
  } else {
    fit.warning = "fewer than two positive samples in the window";
  }

  DecayFunctor functor(t, v, scale);
  Eigen::LevenbergMarquardt<DecayFunctor> lm(functor);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  lm.setMaxfev(2000);
  lm.minimize(x);

  fit.amplitude = x(0);
  fit.gamma = x(1) / scale;
  Eigen::VectorXd res(static_cast<Eigen::Index>(t.size()));
  functor(x, res);
  fit.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(t.size()));

  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - v[i - 1] > 1e-6 * std::abs(v.front())) {
      if (!fit.warning.empty()) fit.warning += "; ";
      fit.warning += "data not monotone in the fit window";
      break;
    }
  }
  if (*std::min_element(v.begin(), v.end()) < -1e-6) {
    if (!fit.warning.empty()) fit.warning += "; ";
    fit.warning += "negative samples in the fit window";
  }

  const double total_decay = 2.0 * fit.gamma * (fit.window_end - fit.window_start);
  if (!(fit.gamma > 0) || total_decay < 1e-8) {
    fit.below_resolution = true;
    fit.gamma = std::max(fit.gamma, 0.0);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Pipelines

ExcursionResult excursion_rate(const SystemParams& params, const NoiseParams& noise,
                               const ExcursionOptions& opts) {
  noise.validate();
  const FockBasis basis(opts.fock_dim ? opts.fock_dim : default_fock_dim(params));
  SpectrumOptions sopts;
  sopts.levels_per_parity = (opts.n_trunc + 1) / 2;
  const Spectrum spec = diagonalize(params, basis, sopts);
  const CodeStates cs = code_states(spec);
  const EigenBasis eb = make_eigenbasis(spec, opts.n_trunc);

  const QuantumOperator a = project(annihilation(basis), eb);
  const QuantumOperator n = project(number(basis), eb);
  const QuantumOperator s = project(sign_x_observable(basis), eb);
  const QuantumOperator h{eb.descriptor(), eb.energies.cast<cplx>().asDiagonal()};
  const Lindbladian lind(h, ambient_jumps(a, n, noise));

  const CVector psi = project_state(cs.ket0, eb);
  const CMatrix rho0 = psi * psi.adjoint();

  double t_lo, t_hi, w_lo;
  if (noise.kappa1 > 0) {
    t_lo = opts.t_min_over_kappa / noise.kappa1;
    t_hi = opts.horizon_over_kappa / noise.kappa1;
    w_lo = opts.window_start_over_kappa / noise.kappa1;
  } else {
    t_hi = opts.horizon_without_noise;
    t_lo = t_hi * opts.t_min_over_kappa / opts.horizon_over_kappa;
    w_lo = t_hi * opts.window_start_over_kappa / opts.horizon_over_kappa;
  }

  ExcursionResult out;
  out.nbar = cs.nbar;
  out.times = log_times(t_lo, t_hi, opts.samples);
  const auto ex = evolve_expectations(lind, rho0, out.times, {s.matrix});
  for (Eigen::Index i = 0; i < ex[0].size(); ++i) out.sign_expectation.push_back(ex[0](i).real());
  out.fit = fit_decay(out.times, out.sign_expectation, w_lo, t_hi);
  return out;
}

SystemParams params_for_nbar(double nbar, int m, std::size_t fock_dim) {
  if (m < 0) throw InvalidParameter("m must be nonnegative");
  if (!(nbar > m + 0.5)) {
    throw InvalidParameter("nbar must exceed m + 1/2 at Delta = 2 m K (got nbar = " +
                           std::to_string(nbar) + ", m = " + std::to_string(m) + ")");
  }
  const FockBasis basis(fock_dim ? fock_dim : default_fock_dim(nbar + m + 1.0));
  SpectrumOptions sopts;
  sopts.levels_per_parity = 1;
  auto f = [&](double alpha) {
    const auto cs = code_states(diagonalize(SystemParams::at_degeneracy(alpha, m), basis, sopts));
    return cs.nbar - nbar;
  };
  const double lo = 1e-3;
  const double hi = std::sqrt(nbar) + 0.25;
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo * fhi > 0) throw InvalidParameter("could not bracket alpha for the requested nbar");
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(45), iters);
  return SystemParams::at_degeneracy(0.5 * (r.first + r.second), m);
}

std::vector<std::pair<double, double>> pair_populations(const CMatrix& rho_eig,
                                                        const EigenBasis& eb) {
  if (rho_eig.rows() != eb.vectors.cols()) throw BasisMismatch("density dimension mismatch");
  int pairs = 0;
  for (int p : eb.pair_index) pairs = std::max(pairs, p + 1);
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(pairs), {0.0, 0.0});
  for (Eigen::Index c = 0; c < rho_eig.rows(); ++c) {
    auto& slot = out[static_cast<std::size_t>(eb.pair_index[c])];
    (eb.parity[c] > 0 ? slot.first : slot.second) += rho_eig(c, c).real();
  }
  return out;
}

double mean_excitation_degenerate(const CMatrix& rho_eig, const EigenBasis& eb, int m) {
  const auto pops = pair_populations(rho_eig, eb);
  if (static_cast<int>(pops.size()) < m + 1) throw InsufficientLevels("eigenbasis lacks degenerate pairs");
  double num = 0.0;
  double den = 0.0;
  for (int n = 0; n <= m; ++n) {
    const double p = pops[static_cast<std::size_t>(n)].first + pops[static_cast<std::size_t>(n)].second;
    num += n * p;
    den += p;
  }
  if (den < 1e-12) throw InvalidParameter("degenerate manifold population below 1e-12; nbar_ex undefined");
  return num / den;
}

double leakage(const CMatrix& rho, const CodeStates& cs) {
  return 1.0 - state_fidelity(rho, cs.ket_plus) - state_fidelity(rho, cs.ket_minus);
}

double leakage_eigenbasis(const CMatrix& rho_eig) {
  return 1.0 - rho_eig(0, 0).real() - rho_eig(1, 1).real();
}

void write_excursion_csv(std::ostream& os, const std::vector<ExcursionRow>& rows) {
  os << "nbar,delta_over_K,gamma_S_over_K,residual\n";
  for (const auto& r : rows)
    os << fmt(r.nbar) << ',' << fmt(r.delta) << ',' << fmt(r.gamma) << ',' << fmt(r.residual) << '\n';
}

void write_population_csv(std::ostream& os, const std::vector<std::pair<double, double>>& pops) {
  os << "pair_index,parity,population\n";
  for (std::size_t i = 0; i < pops.size(); ++i) {
    os << i << ",even," << fmt(pops[i].first) << '\n';
    os << i << ",odd," << fmt(pops[i].second) << '\n';
  }
}

}  // namespace kerrcat
