#include "kerrcat/gates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <numbers>
#include <ostream>

#include <Eigen/SparseCore>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/parallel.hpp"

namespace kerrcat {

namespace {

namespace odeint = boost::numeric::odeint;

// Complex state integrated as interleaved real/imaginary parts.
template <class Rhs>
void integrate(Rhs&& rhs, CVector& state, double duration, const IntegratorOptions& opts) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw InvalidParameter("gate duration must be finite and >= 0");
  if (duration == 0.0) return;
  const auto n = state.size();
  RVector x(2 * n);
  Eigen::Map<CVector>(reinterpret_cast<cplx*>(x.data()), n) = state;
  using Stepper = odeint::runge_kutta_dopri5<RVector, double, RVector, double, odeint::vector_space_algebra>;
  auto system = [&](const RVector& in, RVector& out, double t) {
    out.resize(in.size());
    rhs(t, reinterpret_cast<const cplx*>(in.data()), reinterpret_cast<cplx*>(out.data()));
  };
  std::size_t steps = 0;
  auto observer = [&](const RVector& s, double) {
    if (++steps > opts.max_steps) throw IntegratorFailure("step limit reached");
    if (!s.allFinite()) throw IntegratorFailure("non-finite state");
  };
  odeint::integrate_adaptive(odeint::make_controlled(opts.atol, opts.rtol, Stepper()), system, x, 0.0,
                             duration, std::min(duration, 1e-3), observer);
  state = Eigen::Map<const CVector>(reinterpret_cast<const cplx*>(x.data()), n);
}

double unit_gaussian_area(double duration, double sigma) {
  return sigma * std::sqrt(2.0 * std::numbers::pi) * std::erf(duration / (2.0 * std::sqrt(2.0) * sigma));
}

double trapezoid(const std::vector<double>& v, double duration) {
  if (v.size() < 2) return 0.0;
  const double h = duration / static_cast<double>(v.size() - 1);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s += 0.5 * h * (v[i] + v[i + 1]);
  return s;
}

void normalize(Pulse& p, double unit_area) {
  if (!(p.duration > 0.0)) throw InvalidParameter("pulse duration must be positive");
  if (p.target_angle == 0.0) {
    p.scale = 0.0;
    return;
  }
  if (!(p.nbar > 0.0)) throw InvalidParameter("pulse normalization needs nbar > 0");
  if (unit_area == 0.0) throw InvalidParameter("pulse shape has zero area");
  p.scale = p.target_angle / (4.0 * std::sqrt(p.nbar) * unit_area);
}

}  // namespace

// ---------------------------------------------------------------------------
// Pulses and schedules

double Pulse::amplitude(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  switch (shape) {
    case PulseShape::gaussian: {
      const double u = t - 0.5 * duration;
      return scale * std::exp(-u * u / (2.0 * sigma * sigma));
    }
    case PulseShape::constant: return scale;
    case PulseShape::samples: {
      if (values.size() < 2) return 0.0;
      const double pos = t / duration * static_cast<double>(values.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(pos), values.size() - 2);
      const double w = pos - static_cast<double>(i);
      return scale * ((1.0 - w) * values[i] + w * values[i + 1]);
    }
  }
  return 0.0;
}

double Pulse::area() const {
  switch (shape) {
    case PulseShape::gaussian: return scale * unit_gaussian_area(duration, sigma);
    case PulseShape::constant: return scale * duration;
    case PulseShape::samples: return scale * trapezoid(values, duration);
  }
  return 0.0;
}

Pulse Pulse::negated() const {
  Pulse p = *this;
  p.scale = -scale;
  p.target_angle = -target_angle;
  return p;
}

Pulse gaussian_pulse(double duration, double angle, double nbar, double sigma_fraction) {
  if (!(sigma_fraction > 0.0)) throw InvalidParameter("gaussian width must be positive");
  Pulse p;
  p.shape = PulseShape::gaussian;
  p.duration = duration;
  p.target_angle = angle;
  p.nbar = nbar;
  p.sigma = sigma_fraction * duration;
  normalize(p, unit_gaussian_area(duration, p.sigma));
  return p;
}

Pulse constant_pulse(double duration, double angle, double nbar) {
  Pulse p;
  p.shape = PulseShape::constant;
  p.duration = duration;
  p.target_angle = angle;
  p.nbar = nbar;
  normalize(p, duration);
  return p;
}

Pulse sampled_pulse(double duration, double angle, double nbar, std::vector<double> shape) {
  if (shape.size() < 2) throw InvalidParameter("sampled pulse needs at least two samples");
  Pulse p;
  p.shape = PulseShape::samples;
  p.duration = duration;
  p.target_angle = angle;
  p.nbar = nbar;
  p.values = std::move(shape);
  normalize(p, trapezoid(p.values, duration));
  return p;
}

double ThetaSchedule::theta(double t, double duration) const {
  const double u = std::clamp(t / duration, 0.0, 1.0);
  const double s = shape == ThetaShape::linear ? u : u * u * (3.0 - 2.0 * u);
  return final_angle * s;
}

double ThetaSchedule::theta_dot(double t, double duration) const {
  if (t < 0.0 || t > duration) return 0.0;
  const double u = t / duration;
  const double ds = shape == ThetaShape::linear ? 1.0 : 6.0 * u * (1.0 - u);
  return final_angle * ds / duration;
}

// ---------------------------------------------------------------------------
// Zeno gate

double alpha_tilde(const CatModel& model) {
  return 0.5 * model.ket0.dot(model.x.matrix * model.ket0).real();
}

GateResult zeno_z_gate(const SystemParams& params, const std::optional<NoiseParams>& noise,
                       const std::optional<FilterParams>& filter, const Pulse& pulse,
                       const ZenoOptions& opts) {
  const CatModel cm = make_cat_model(params, opts.n_trunc, opts.fock_dim);
  const auto nc = cm.eb.vectors.cols();
  const double th = pulse.target_angle;
  const CVector ideal = std::sqrt(0.5) * (std::exp(-0.5 * kI * th) * cm.ket0 + std::exp(0.5 * kI * th) * cm.ket1);
  const bool open = (noise && !noise->silent()) || filter;

  GateResult res;
  if (!open) {
    const CMatrix h = cm.h.matrix;
    const CMatrix x = cm.x.matrix;
    CVector psi = cm.ket_plus;
    integrate(
        [&](double t, const cplx* in, cplx* out) {
          Eigen::Map<const CVector> v(in, nc);
          Eigen::Map<CVector> d(out, nc);
          d.noalias() = -kI * (h * v + pulse.amplitude(t) * (x * v));
        },
        psi, pulse.duration, opts.integrator);
    res.rho = psi * psi.adjoint();
  } else {
    const NoiseParams nz = noise.value_or(NoiseParams{});
    QuantumOperator h = cm.h;
    QuantumOperator x = cm.x;
    std::vector<JumpOperator> jumps;
    std::optional<CompositeLayout> layout;
    if (filter) {
      const Lindbladian lind = build_colored_lindbladian(cm.h, cm.a, cm.n, nz, *filter, opts.cap);
      layout = composite_layout(static_cast<std::size_t>(nc), *filter, opts.cap);
      h = lind.hamiltonian();
      x = layout->lift_cat(cm.x);
      jumps = lind.jumps();
    } else {
      jumps = ambient_jumps(cm.a, cm.n, nz);
    }
    const auto d = h.matrix.rows();
    CMatrix g0 = -kI * h.matrix;
    for (const auto& j : jumps) g0 -= 0.5 * j.rate * (j.op.matrix.adjoint() * j.op.matrix);
    const CMatrix xm = x.matrix;
    const CMatrix rho_cat = cm.ket_plus * cm.ket_plus.adjoint();
    CVector state = vectorize(layout ? layout->with_filter_vacuum(rho_cat) : rho_cat);
    CMatrix g(d, d), tmp(d, d);
    integrate(
        [&](double t, const cplx* in, cplx* out) {
          Eigen::Map<const CMatrix> r(in, d, d);
          Eigen::Map<CMatrix> dr(out, d, d);
          g = g0 - (kI * pulse.amplitude(t)) * xm;
          dr.noalias() = g * r;
          dr.noalias() += r * g.adjoint();
          for (const auto& j : jumps) {
            tmp.noalias() = j.op.matrix * r;
            dr.noalias() += j.rate * (tmp * j.op.matrix.adjoint());
          }
        },
        state, pulse.duration, opts.integrator);
    const CMatrix rho = unvectorize(state, d);
    res.rho = layout ? layout->reduce_to_cat(rho) : rho;
    res.p_z = cm.code.nbar * nz.kappa1 * pulse.duration;
  }
  res.fidelity = state_fidelity(res.rho, ideal);
  res.leakage = 1.0 - state_fidelity(res.rho, cm.ket_plus) - state_fidelity(res.rho, cm.ket_minus);
  res.p_z_na = 1.0 - res.fidelity;
  res.p_z_na_projected = res.leakage < 1.0 ? 1.0 - res.fidelity / (1.0 - res.leakage) : 1.0;
  return res;
}

// ---------------------------------------------------------------------------
// X gate

QuantumOperator x_gate_hamiltonian(const SystemParams& params, const FockBasis& basis, double theta,
                                   double theta_dot, double n_ref) {
  params.validate();
  const auto a = annihilation(basis);
  const auto ad = a.adjoint();
  const auto n = number(basis);
  const double k = params.kerr;
  const double a2 = params.alpha * params.alpha;
  const cplx e2 = params.eps2();
  const cplx rot = std::exp(2.0 * kI * theta);
  QuantumOperator h = cplx(k) * (ad * ad * a * a);
  h += (e2 * rot) * (ad * ad);
  h += (e2 * std::conj(rot)) * (a * a);
  h -= cplx(params.delta + theta_dot) * n;
  h += cplx(k * a2 * a2 + theta_dot * n_ref) * identity(basis);
  return h;
}

namespace {

CVector rotate(const CVector& psi, double theta) {
  CVector out = psi;
  for (Eigen::Index k = 0; k < out.size(); ++k) out(k) *= std::exp(kI * (theta * static_cast<double>(k)));
  return out;
}

}  // namespace

GateResult x_gate(const SystemParams& params, const ThetaSchedule& schedule, double duration,
                  const XGateOptions& opts) {
  const FockBasis basis(opts.fock_dim ? opts.fock_dim : default_fock_dim(params));
  const Spectrum spec = diagonalize(params, basis, SpectrumOptions{1, {}});
  const CodeStates cs = code_states(spec);
  const auto d = static_cast<Eigen::Index>(basis.dim());
  const double k = params.kerr;
  const double a2 = params.alpha * params.alpha;
  const double e2 = params.eps2();
  RVector diag(d), off(d);  // off(j) = <j+2| a+^2 |j>
  for (Eigen::Index j = 0; j < d; ++j) {
    const double nj = static_cast<double>(j);
    diag(j) = k * nj * (nj - 1.0) - params.delta * nj + k * a2 * a2;
    off(j) = j + 2 < d ? std::sqrt((nj + 1.0) * (nj + 2.0)) : 0.0;
  }
  CVector psi = cs.ket0;
  integrate(
      [&](double t, const cplx* in, cplx* out) {
        const double th = schedule.theta(t, duration);
        const double thd = schedule.theta_dot(t, duration);
        const cplx up = e2 * std::exp(2.0 * kI * th);
        const cplx down = std::conj(up);
        for (Eigen::Index j = 0; j < d; ++j) {
          cplx acc = (diag(j) - thd * static_cast<double>(j)) * in[j];
          if (j >= 2) acc += up * off(j - 2) * in[j - 2];
          if (j + 2 < d) acc += down * off(j) * in[j + 2];
          out[j] = -kI * acc;
        }
      },
      psi, duration, opts.integrator);
  const double th_end = schedule.theta(duration, duration);
  GateResult res;
  res.rho = psi * psi.adjoint();
  res.fidelity = std::norm(rotate(cs.ket0, th_end).dot(psi));
  res.leakage = 1.0 - std::norm(rotate(cs.ket_plus, th_end).dot(psi)) -
                std::norm(rotate(cs.ket_minus, th_end).dot(psi));
  res.p_z_na = 1.0 - res.fidelity;
  res.p_z_na_projected = res.leakage < 1.0 ? 1.0 - res.fidelity / (1.0 - res.leakage) : 1.0;
  return res;
}

// ---------------------------------------------------------------------------
// CNOT

namespace {

struct CnotParts {
  CMatrix h0, b, c;
};

// Target bracket product and feed-forward of the conditional rotation, with
// the control lowering operator given as a matrix (1x1 for a scalar).
CnotParts assemble_cnot(const CMatrix& ac, double at_c, const SystemParams& pt, const FockBasis& bt,
                        double nbar_t) {
  const auto dc = ac.rows();
  const CMatrix ic = CMatrix::Identity(dc, dc);
  const CMatrix acd = ac.adjoint();
  const CMatrix p = (at_c * ic + ac) / (2.0 * at_c);
  const CMatrix q = (at_c * ic - ac) / (2.0 * at_c);
  const CMatrix a = annihilation(bt).matrix;
  const CMatrix ad = a.adjoint();
  const CMatrix a2 = a * a;
  const CMatrix ad2 = ad * ad;
  const CMatrix nt = number(bt).matrix;
  const CMatrix it = CMatrix::Identity(nt.rows(), nt.cols());
  const double k = pt.kerr;
  const double al2 = pt.alpha * pt.alpha;
  CnotParts out;
  out.h0 = kron(ic, k * (ad2 * a2) - pt.delta * nt) - k * al2 * (kron(p, ad2) + kron(p.adjoint(), a2)) +
           k * al2 * al2 * kron(q.adjoint() * q + p.adjoint() * p, it);
  out.b = -k * al2 * kron(q, ad2) + k * al2 * al2 * kron(p.adjoint() * q, it);
  out.c = kron((2.0 * at_c * ic - acd - ac) / (4.0 * at_c), nt - nbar_t * it);
  return out;
}

}  // namespace

CnotModel make_cnot_model(const SystemParams& control, const SystemParams& target, std::size_t dim_c,
                          std::size_t dim_t, std::size_t cap) {
  if (dim_c * dim_t > cap) {
    throw DimensionCapExceeded("two-mode dimension " + std::to_string(dim_c * dim_t) + " exceeds cap " +
                               std::to_string(cap));
  }
  CnotModel m;
  m.control = control;
  m.target = target;
  m.dim_c = dim_c;
  m.dim_t = dim_t;
  const FockBasis bc(dim_c), bt(dim_t);
  m.code_c = code_states(diagonalize(control, bc, SpectrumOptions{1, {}}));
  m.code_t = code_states(diagonalize(target, bt, SpectrumOptions{1, {}}));
  m.alpha_tilde_c = 0.5 * expectation(position_quadrature(bc), m.code_c.ket0).real();
  if (std::abs(m.alpha_tilde_c) < 1e-6) throw IllConditionedControl("control alpha~ below 1e-6");
  m.nbar_t = m.code_t.nbar;
  auto parts = assemble_cnot(annihilation(bc).matrix, m.alpha_tilde_c, target, bt, m.nbar_t);
  const auto it = CMatrix::Identity(static_cast<Eigen::Index>(dim_t), static_cast<Eigen::Index>(dim_t));
  m.h0 = kron(build_hamiltonian(control, bc).matrix, it) + parts.h0;
  m.b = std::move(parts.b);
  m.c = std::move(parts.c);
  return m;
}

QuantumOperator cnot_hamiltonian(const CnotModel& model, const ThetaSchedule& schedule, double t,
                                 double duration) {
  const double th = schedule.theta(t, duration);
  const double thd = schedule.theta_dot(t, duration);
  const cplx e = std::exp(-2.0 * kI * th);
  return {model.descriptor(), model.h0 + e * model.b + std::conj(e) * model.b.adjoint() + thd * model.c};
}

QuantumOperator cnot_target_reduction(const CnotModel& model, cplx control_value, double theta,
                                      double theta_dot) {
  const FockBasis bt(model.dim_t);
  CMatrix ac(1, 1);
  ac(0, 0) = control_value;
  const auto parts = assemble_cnot(ac, model.alpha_tilde_c, model.target, bt, model.nbar_t);
  const cplx e = std::exp(-2.0 * kI * theta);
  return {bt.descriptor(), parts.h0 + e * parts.b + std::conj(e) * parts.b.adjoint() + theta_dot * parts.c};
}

CnotResult cnot_gate(const CnotModel& model, const ThetaSchedule& schedule, double duration,
                     const IntegratorOptions& integ, unsigned threads) {
  using Sparse = Eigen::SparseMatrix<cplx>;
  const Sparse h0 = model.h0.sparseView(1.0, 1e-14);
  const Sparse b = model.b.sparseView(1.0, 1e-14);
  const Sparse bd = Sparse(b.adjoint());
  const Sparse c = model.c.sparseView(1.0, 1e-14);
  const auto n = static_cast<Eigen::Index>(model.dim_c * model.dim_t);
  const std::array<const CVector*, 2> kc{&model.code_c.ket0, &model.code_c.ket1};
  const std::array<const CVector*, 2> kt{&model.code_t.ket0, &model.code_t.ket1};
  CnotResult res;
  parallel_for(4, threads, [&](std::size_t idx) {
    const std::size_t ci = idx / 2, ti = idx % 2;
    CVector psi = kron(*kc[ci], *kt[ti]);
    integrate(
        [&](double t, const cplx* in, cplx* out) {
          Eigen::Map<const CVector> v(in, n);
          Eigen::Map<CVector> d(out, n);
          const double th = schedule.theta(t, duration);
          const cplx e = std::exp(-2.0 * kI * th);
          d = h0 * v;
          d += e * (b * v);
          d += std::conj(e) * (bd * v);
          d += schedule.theta_dot(t, duration) * (c * v);
          d *= -kI;
        },
        psi, duration, integ);
    const bool flip = std::abs(schedule.final_angle - std::numbers::pi) < 1e-12 ||
                      std::abs(schedule.final_angle + std::numbers::pi) < 1e-12;
    const std::size_t out_t = (ci == 1 && flip) ? 1 - ti : ti;
    const CVector expect = kron(*kc[ci], *kt[out_t]);
    res.fidelities[idx] = std::norm(expect.dot(psi));
  });
  res.min_fidelity = *std::min_element(res.fidelities.begin(), res.fidelities.end());
  return res;
}

// ---------------------------------------------------------------------------
// Adiabatic preparation

GateResult adiabatic_prepare(const AdiabaticRamp& ramp, double duration, PrepStart start,
                             const std::optional<NoiseParams>& noise, const PrepOptions& opts) {
  const SystemParams p0 = SystemParams::detuned(ramp.alpha_start, ramp.delta_start);
  const SystemParams p1 = SystemParams::detuned(ramp.alpha_end, ramp.delta_end);
  const SystemParams big = SystemParams::detuned(std::max(ramp.alpha_start, ramp.alpha_end),
                                                 std::max(ramp.delta_start, ramp.delta_end));
  const FockBasis basis(opts.fock_dim ? opts.fock_dim : default_fock_dim(big));
  const SpectrumOptions sopts{1, {}};
  const Spectrum s1 = diagonalize(p1, basis, sopts);

  CVector psi0, target;
  if (start == PrepStart::vacuum) {
    psi0 = fock_state(0, basis);
    target = s1.even_levels[0].state;
  } else {
    psi0 = code_states(diagonalize(p0, basis, sopts)).ket0;
    target = code_states(s1).ket0;
  }

  const auto d = static_cast<Eigen::Index>(basis.dim());
  const double k = p0.kerr;
  RVector off(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double nj = static_cast<double>(j);
    off(j) = j + 2 < d ? std::sqrt((nj + 1.0) * (nj + 2.0)) : 0.0;
  }
  auto at = [&](double t) {
    const double u = duration > 0 ? std::clamp(t / duration, 0.0, 1.0) : 1.0;
    const double s = ramp.smooth ? u * u * (3.0 - 2.0 * u) : u;
    const double a2 = ramp.alpha_start * ramp.alpha_start +
                      (ramp.alpha_end * ramp.alpha_end - ramp.alpha_start * ramp.alpha_start) * s;
    return std::pair{-k * a2, ramp.delta_start + (ramp.delta_end - ramp.delta_start) * s};
  };
  auto apply_h = [&](double t, const cplx* in, cplx* out, Eigen::Index stride, Eigen::Index cols) {
    const auto [e2, delta] = at(t);
    for (Eigen::Index col = 0; col < cols; ++col) {
      const cplx* v = in + col * stride;
      cplx* w = out + col * stride;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double nj = static_cast<double>(j);
        cplx acc = (k * nj * (nj - 1.0) - delta * nj) * v[j];
        if (j >= 2) acc += e2 * off(j - 2) * v[j - 2];
        if (j + 2 < d) acc += e2 * off(j) * v[j + 2];
        w[j] = acc;
      }
    }
  };

  GateResult res;
  const bool open = noise && !noise->silent();
  if (!open) {
    CVector psi = psi0;
    integrate(
        [&](double t, const cplx* in, cplx* out) {
          apply_h(t, in, out, d, 1);
          for (Eigen::Index j = 0; j < d; ++j) out[j] *= -kI;
        },
        psi, duration, opts.integrator);
    res.rho = psi * psi.adjoint();
  } else {
    const auto a = annihilation(basis);
    const auto jumps = ambient_jumps(a, number(basis), *noise);
    CMatrix damp = CMatrix::Zero(d, d);
    for (const auto& j : jumps) damp += 0.5 * j.rate * (j.op.matrix.adjoint() * j.op.matrix);
    CVector state = vectorize(psi0 * psi0.adjoint());
    CMatrix hr(d, d), tmp(d, d);
    integrate(
        [&](double t, const cplx* in, cplx* out) {
          Eigen::Map<const CMatrix> r(in, d, d);
          Eigen::Map<CMatrix> dr(out, d, d);
          apply_h(t, r.data(), hr.data(), d, d);  // H rho
          dr = -kI * hr;
          dr += kI * hr.adjoint();                 // -i[H, rho] for Hermitian rho
          dr -= damp * r + r * damp;
          for (const auto& j : jumps) {
            tmp.noalias() = j.op.matrix * r;
            dr.noalias() += j.rate * (tmp * j.op.matrix.adjoint());
          }
        },
        state, duration, opts.integrator);
    res.rho = unvectorize(state, d);
  }
  res.fidelity = state_fidelity(res.rho, target);
  res.leakage = 1.0 - state_fidelity(res.rho, s1.even_levels[0].state) -
                state_fidelity(res.rho, s1.odd_levels[0].state);
  res.p_z_na = 1.0 - res.fidelity;
  res.p_z_na_projected = res.leakage < 1.0 ? 1.0 - res.fidelity / (1.0 - res.leakage) : 1.0;
  return res;
}

void write_zeno_csv(std::ostream& os, const std::vector<ZenoRow>& rows) {
  os << "T_in_inv_K,p_Z_NA,kappa_eng_over_K,n_filters\n";
  for (const auto& r : rows)
    os << fmt(r.duration) << ',' << fmt(r.p_z_na) << ',' << fmt(r.kappa_eng) << ',' << r.n_filters << '\n';
}

}  // namespace kerrcat
