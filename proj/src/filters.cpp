#include "kerrcat/filters.hpp"

#include <cmath>
#include <ostream>

#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"

namespace kerrcat {

FilterParams FilterParams::standard(double delta_f, int modes) {
  FilterParams f;
  f.modes = modes;
  f.delta_f = delta_f;
  f.kappa_f = delta_f / 5.0;
  f.J = f.kappa_f / 2.0;
  f.g = f.kappa_f / 5.0;
  f.validate();
  return f;
}

FilterParams FilterParams::from_engineered_rate(double delta_f, double kappa_eng, int modes) {
  if (!(kappa_eng >= 0.0)) throw InvalidParameter("engineered rate must be nonnegative");
  FilterParams f;
  f.modes = modes;
  f.delta_f = delta_f;
  f.kappa_f = 25.0 * kappa_eng / 4.0;
  f.J = f.kappa_f / 2.0;
  f.g = f.kappa_f / 5.0;
  return f;
}

void FilterParams::validate() const {
  if (modes < 1) throw InvalidParameter("filter needs at least one mode");
  if (!(g >= 0.0) || !(J >= 0.0) || !(kappa_f >= 0.0))
    throw InvalidParameter("filter rates must be nonnegative");
  if (!std::isfinite(delta_f)) throw InvalidParameter("filter detuning must be finite");
}

double default_filter_detuning(const Spectrum& spectrum) {
  if (spectrum.even_levels.size() < 2) throw InsufficientLevels("need two even levels");
  return spectrum.even_levels[1].energy - spectrum.even_levels[0].energy;
}

std::vector<CMatrix> build_filter_operators(int modes) {
  if (modes < 1) throw InvalidParameter("filter needs at least one mode");
  const auto n = static_cast<Eigen::Index>(modes + 1);
  std::vector<CMatrix> out;
  for (Eigen::Index j = 1; j < n; ++j) {
    CMatrix f = CMatrix::Zero(n, n);
    f(0, j) = 1.0;
    out.push_back(std::move(f));
  }
  return out;
}

QuantumOperator CompositeLayout::lift_cat(const QuantumOperator& op) const {
  if (op.basis.dim != cat_dim) throw BasisMismatch("cat operator dimension mismatch");
  const auto nf = static_cast<Eigen::Index>(filter_dim);
  return {descriptor(), kron(CMatrix::Identity(nf, nf), op.matrix)};
}

QuantumOperator CompositeLayout::lift_filter(const CMatrix& f) const {
  if (f.rows() != static_cast<Eigen::Index>(filter_dim)) throw BasisMismatch("filter operator dimension mismatch");
  const auto nc = static_cast<Eigen::Index>(cat_dim);
  return {descriptor(), kron(f, CMatrix::Identity(nc, nc))};
}

CMatrix CompositeLayout::reduce_to_cat(const CMatrix& rho) const {
  const auto nc = static_cast<Eigen::Index>(cat_dim);
  if (rho.rows() != static_cast<Eigen::Index>(dim())) throw BasisMismatch("composite state dimension mismatch");
  CMatrix out = CMatrix::Zero(nc, nc);
  for (Eigen::Index f = 0; f < static_cast<Eigen::Index>(filter_dim); ++f)
    out += rho.block(f * nc, f * nc, nc, nc);
  return out;
}

double CompositeLayout::filter_excitation(const CMatrix& rho) const {
  const auto nc = static_cast<Eigen::Index>(cat_dim);
  double p = 0.0;
  for (Eigen::Index f = 1; f < static_cast<Eigen::Index>(filter_dim); ++f)
    p += rho.block(f * nc, f * nc, nc, nc).trace().real();
  return p;
}

CMatrix CompositeLayout::with_filter_vacuum(const CMatrix& rho_cat) const {
  const auto nc = static_cast<Eigen::Index>(cat_dim);
  if (rho_cat.rows() != nc) throw BasisMismatch("cat state dimension mismatch");
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
  out.topLeftCorner(nc, nc) = rho_cat;
  return out;
}

CompositeLayout composite_layout(std::size_t cat_dim, const FilterParams& filter, std::size_t cap) {
  filter.validate();
  CompositeLayout l{cat_dim, static_cast<std::size_t>(filter.modes + 1)};
  if (l.dim() > cap) {
    throw DimensionCapExceeded("composite dimension " + std::to_string(l.dim()) + " exceeds cap " +
                               std::to_string(cap));
  }
  return l;
}

QuantumOperator filter_hamiltonian(const QuantumOperator& a_cat, const FilterParams& filter,
                                   const CompositeLayout& layout) {
  const auto fs = build_filter_operators(filter.modes);
  const auto a = layout.lift_cat(a_cat);
  const auto f1 = layout.lift_filter(fs.front());
  QuantumOperator h = filter.g * (a * f1.adjoint() + a.adjoint() * f1);
  for (std::size_t j = 0; j + 1 < fs.size(); ++j) {
    const CMatrix hop = fs[j + 1].adjoint() * fs[j];
    h += layout.lift_filter(filter.J * (hop + hop.adjoint()));
  }
  CMatrix occ = CMatrix::Zero(layout.filter_dim, layout.filter_dim);
  for (const auto& f : fs) occ += f.adjoint() * f;
  h += layout.lift_filter(filter.delta_f * occ);
  return h;
}

Lindbladian build_colored_lindbladian(const QuantumOperator& h_cat, const QuantumOperator& a_cat,
                                      const QuantumOperator& n_cat, const NoiseParams& noise,
                                      const FilterParams& filter, std::size_t cap) {
  noise.validate();
  const auto layout = composite_layout(h_cat.basis.dim, filter, cap);
  const QuantumOperator h = layout.lift_cat(h_cat) + filter_hamiltonian(a_cat, filter, layout);
  auto jumps = ambient_jumps(layout.lift_cat(a_cat), layout.lift_cat(n_cat), noise);
  if (filter.kappa_f > 0)
    jumps.push_back({layout.lift_filter(build_filter_operators(filter.modes).back()), filter.kappa_f});
  return Lindbladian(h, std::move(jumps));
}

namespace {

std::vector<double> uniform_grid(double horizon, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  return t;
}

double horizon_for(const NoiseParams& noise, const ColoredOptions& opts) {
  return noise.kappa1 > 0 ? opts.horizon_over_kappa / noise.kappa1 : opts.horizon_without_noise;
}

}  // namespace

ColoredBitflip colored_bitflip_rate(const SystemParams& params, const NoiseParams& noise,
                                    const std::optional<FilterParams>& filter,
                                    const ColoredOptions& opts) {
  noise.validate();
  const CatModel cm = make_cat_model(params, opts.n_trunc, opts.fock_dim);
  const CMatrix rho_cat = cm.ket0 * cm.ket0.adjoint();
  const double horizon = horizon_for(noise, opts);

  ColoredBitflip out;
  out.nbar = cm.code.nbar;
  out.times = uniform_grid(horizon, opts.samples);
  if (filter) {
    const auto layout = composite_layout(cm.eb.vectors.cols(), *filter, opts.cap);
    const auto lind = build_colored_lindbladian(cm.h, cm.a, cm.n, noise, *filter, opts.cap);
    const auto nc = static_cast<Eigen::Index>(layout.cat_dim);
    CMatrix excite = CMatrix::Identity(static_cast<Eigen::Index>(layout.dim()), static_cast<Eigen::Index>(layout.dim()));
    excite.topLeftCorner(nc, nc).setZero();
    const auto ex = evolve_expectations(lind, layout.with_filter_vacuum(rho_cat), out.times,
                                        {layout.lift_cat(cm.s).matrix, excite});
    for (Eigen::Index i = 0; i < ex[0].size(); ++i) {
      out.sign_expectation.push_back(ex[0](i).real());
      out.max_filter_excitation = std::max(out.max_filter_excitation, ex[1](i).real());
    }
  } else {
    const Lindbladian lind(cm.h, ambient_jumps(cm.a, cm.n, noise));
    const auto ex = evolve_expectations(lind, rho_cat, out.times, {cm.s.matrix});
    for (Eigen::Index i = 0; i < ex[0].size(); ++i) out.sign_expectation.push_back(ex[0](i).real());
  }
  const double w_lo = horizon * opts.window_start_over_kappa / opts.horizon_over_kappa;
  out.fit = fit_decay(out.times, out.sign_expectation, w_lo, horizon);
  return out;
}

ColoredLeakage colored_leakage(const SystemParams& params, const NoiseParams& noise,
                               const std::optional<FilterParams>& filter,
                               const ColoredOptions& opts) {
  noise.validate();
  const CatModel cm = make_cat_model(params, opts.n_trunc, opts.fock_dim);
  const CMatrix rho_cat = cm.ket0 * cm.ket0.adjoint();
  const std::vector<double> t{horizon_for(noise, opts)};

  ColoredLeakage out;
  out.nbar = cm.code.nbar;
  CMatrix final_cat;
  if (filter) {
    const auto layout = composite_layout(cm.eb.vectors.cols(), *filter, opts.cap);
    const auto lind = build_colored_lindbladian(cm.h, cm.a, cm.n, noise, *filter, opts.cap);
    const auto traj = evolve(lind, layout.with_filter_vacuum(rho_cat), t);
    final_cat = layout.reduce_to_cat(traj.states.back());
    out.filter_excitation = layout.filter_excitation(traj.states.back());
  } else {
    const Lindbladian lind(cm.h, ambient_jumps(cm.a, cm.n, noise));
    final_cat = evolve(lind, rho_cat, t).states.back();
  }
  out.leakage = leakage_eigenbasis(final_cat);
  out.populations = pair_populations(final_cat, cm.eb);
  return out;
}

void write_leakage_csv(std::ostream& os, const std::vector<LeakageRow>& rows) {
  os << "nbar,delta_over_K,leakage,filtered\n";
  for (const auto& r : rows)
    os << fmt(r.nbar) << ',' << fmt(r.delta) << ',' << fmt(r.leakage) << ',' << (r.filtered ? "true" : "false") << '\n';
}

void write_bitflip_csv(std::ostream& os, const std::vector<BitflipRow>& rows) {
  os << "nbar,delta_over_K,gamma_bitflip_over_K,filtered\n";
  for (const auto& r : rows)
    os << fmt(r.nbar) << ',' << fmt(r.delta) << ',' << fmt(r.gamma) << ',' << (r.filtered ? "true" : "false") << '\n';
}

}  // namespace kerrcat
