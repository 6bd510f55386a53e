#include "kerrcat/estimators.hpp"

#include <cmath>
#include <ostream>

#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"

namespace kerrcat {

double one_minus_sinc(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-3) return x2 / 6.0 - x2 * x2 / 120.0;
  return 1.0 - std::sin(x) / x;
}

GammaEstimate gamma_formula(const Spectrum& spectrum, const NoiseParams& noise,
                            std::optional<double> kappa_conf) {
  noise.validate();
  const double alpha = spectrum.params.alpha;
  const double a2 = alpha * alpha;
  const double kl = noise.leakage_rate(alpha);
  GammaEstimate out;
  out.weights.kappa_conf = kappa_conf.value_or(noise.kappa1);
  if (!(out.weights.kappa_conf >= 0.0)) throw InvalidParameter("kappa_conf must be nonnegative");

  const FockBasis basis(spectrum.dim);
  const CVector probe = displaced_fock(alpha, 1, basis);
  for (std::size_t n = 1; n < spectrum.pair_count(); ++n) {
    const double lp = std::norm(spectrum.even_levels[n].state.dot(probe));
    const double lm = std::norm(spectrum.odd_levels[n].state.dot(probe));
    out.weights.lambda.push_back(0.5 * (lp + lm));
    out.weights.delta.push_back(spectrum.pair_spacings[n]);
  }

  out.loss_term = noise.kappa1 * a2 * std::exp(-4.0 * a2);
  out.floor_term = kl * std::exp(-2.0 * a2);
  double sum = 0.0;
  for (std::size_t i = 0; i < out.weights.lambda.size(); ++i) {
    const double d = out.weights.delta[i];
    double bracket;
    if (out.weights.kappa_conf == 0.0) {
      bracket = d == 0.0 ? 0.0 : 1.0;
    } else {
      bracket = one_minus_sinc(d / out.weights.kappa_conf);
    }
    sum += out.weights.lambda[i] * bracket;
  }
  out.pair_term = kl * sum;
  out.gamma = out.loss_term + out.floor_term + out.pair_term;
  return out;
}

cplx PerturbativeState::tau(std::size_t a, std::size_t b, double t) const {
  const cplx k = kappa(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  const double d = energies(static_cast<Eigen::Index>(a)) - energies(static_cast<Eigen::Index>(b));
  if (std::abs(d) < resonant_threshold) return k * t;
  return kI * k * (std::exp(-kI * (d * t)) - 1.0) / d;
}

CMatrix PerturbativeState::density(double t) const {
  const auto n = kappa.rows();
  CMatrix rho = (1.0 - kappa_l * t) * (ket0 * ket0.adjoint());
  for (Eigen::Index p = 0; p < n / 2; ++p) {
    for (Eigen::Index s = 0; s < 2; ++s) {
      for (Eigen::Index r = 0; r < 2; ++r) {
        const auto a = static_cast<std::size_t>(2 * p + s);
        const auto b = static_cast<std::size_t>(2 * p + r);
        rho(2 * p + s, 2 * p + r) += tau(a, b, t);
      }
    }
  }
  return rho;
}

std::vector<std::pair<double, double>> PerturbativeState::populations(double t) const {
  const CMatrix rho = density(t);
  std::vector<std::pair<double, double>> out;
  for (Eigen::Index p = 0; p + 1 < rho.rows(); p += 2) out.emplace_back(rho(p, p).real(), rho(p + 1, p + 1).real());
  return out;
}

double PerturbativeState::sign_expectation(double t) const {
  return (sign * density(t)).trace().real();
}

double PerturbativeState::sign_deficit(double t) const {
  double deficit = 0.0;
  for (Eigen::Index p = 0; p + 1 < kappa.rows(); p += 2) {
    const auto a = static_cast<std::size_t>(p);
    const auto b = static_cast<std::size_t>(p + 1);
    const cplx ideal = kappa(p, p + 1) * t;
    // 2 Re[(tau_ideal - tau) S_{-+}] covers both coherences of the pair
    deficit += 2.0 * ((ideal - tau(a, b, t)) * sign(p + 1, p)).real();
  }
  return deficit;
}

PerturbativeState perturbative_leakage(const SystemParams& params, const NoiseParams& noise,
                                       const PerturbativeOptions& opts) {
  noise.validate();
  if (opts.n_cutoff == 0) throw InvalidParameter("n_cutoff must be positive");
  const std::size_t n_states = 2 * (opts.n_cutoff + 1);
  const std::size_t dim = opts.fock_dim ? opts.fock_dim
                                        : std::max(default_fock_dim(params), n_states + 20);
  const FockBasis basis(dim);
  SpectrumOptions sopts;
  sopts.levels_per_parity = opts.n_cutoff + 1;
  const Spectrum spec = diagonalize(params, basis, sopts);
  const CodeStates cs = code_states(spec);
  const EigenBasis eb = make_eigenbasis(spec, n_states);

  const auto a = annihilation(basis);
  const auto num = number(basis);
  const CVector& z = cs.ket0;
  const CMatrix rho0 = z * z.adjoint();
  CMatrix drho = CMatrix::Zero(rho0.rows(), rho0.cols());
  for (const auto& j : ambient_jumps(a, num, noise)) {
    const CVector lz = j.op.matrix * z;
    const CMatrix ll = j.op.matrix.adjoint() * j.op.matrix;
    drho += j.rate * (lz * lz.adjoint() - 0.5 * (ll * rho0 + rho0 * ll));
  }

  PerturbativeState st;
  st.n_cutoff = opts.n_cutoff;
  st.kappa_l = std::max(0.0, -z.dot(drho * z).real());
  st.energies = eb.energies;
  st.kappa = eb.vectors.adjoint() * (drho + st.kappa_l * rho0) * eb.vectors;
  st.sign = project(sign_x_observable(basis), eb).matrix;
  st.ket0 = project_state(z, eb);
  for (Eigen::Index i = 0; i < st.kappa.rows(); ++i)
    for (Eigen::Index j = 0; j < st.kappa.cols(); ++j)
      if (i / 2 != j / 2) st.max_neglected = std::max(st.max_neglected, std::abs(st.kappa(i, j)));
  return st;
}

DecayFit perturbative_bitflip_rate(const PerturbativeState& state, const PerturbativeFitOptions& opts) {
  if (!(state.kappa_l > 0.0)) {
    DecayFit fit;
    fit.below_resolution = true;
    fit.warning = "no leakage";
    return fit;
  }
  const double t_hi = opts.window_over_leak / state.kappa_l;
  const double t_lo = opts.window_start_fraction * t_hi;
  std::vector<double> times(opts.samples + 1);
  std::vector<double> values(opts.samples + 1);
  const double s0 = state.sign_expectation(0.0);
  for (std::size_t k = 0; k <= opts.samples; ++k) {
    times[k] = t_hi * static_cast<double>(k) / static_cast<double>(opts.samples);
    values[k] = s0 - state.sign_deficit(times[k]);
  }
  return fit_decay(times, values, t_lo, t_hi);
}

void write_estimate_csv(std::ostream& os, const std::vector<EstimateRow>& rows) {
  os << "nbar,delta_over_K,gamma_estimated,gamma_simulated\n";
  for (const auto& r : rows)
    os << fmt(r.nbar) << ',' << fmt(r.delta) << ',' << fmt(r.gamma_estimated) << ','
       << fmt(r.gamma_simulated) << '\n';
}

}  // namespace kerrcat
