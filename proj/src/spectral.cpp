#include "kerrcat/spectral.hpp"

#include <cmath>
#include <ostream>

#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/parallel.hpp"

namespace kerrcat {

namespace {

struct Sector {
  RVector energies;
  RMatrix states;  // columns in the full Fock basis
};

Sector diagonalize_sector(const RMatrix& h, int parity_bit) {
  const Eigen::Index n = h.rows();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = parity_bit; k < n; k += 2) idx.push_back(k);
  const auto s = static_cast<Eigen::Index>(idx.size());
  RMatrix sub(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j) sub(i, j) = h(idx[i], idx[j]);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sub);
  Sector out{es.eigenvalues(), RMatrix::Zero(n, s)};
  for (Eigen::Index i = 0; i < s; ++i) out.states.row(idx[i]) = es.eigenvectors().row(i);
  return out;
}

// Index of the largest-magnitude entry; ties resolved toward the lower index.
Eigen::Index dominant(const RVector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  return best;
}

}  // namespace

Spectrum diagonalize(const SystemParams& params, const FockBasis& basis,
                     const SpectrumOptions& opts) {
  params.validate();
  const RMatrix h = build_hamiltonian(params, basis).matrix.real();
  const Sector even = diagonalize_sector(h, 0);
  const Sector odd = diagonalize_sector(h, 1);

  const auto keep = [&](const Sector& s) {
    const auto avail = static_cast<std::size_t>(s.energies.size());
    return opts.levels_per_parity == 0 ? avail : std::min(avail, opts.levels_per_parity);
  };
  const std::size_t n_even = keep(even);
  const std::size_t n_odd = keep(odd);

  const RMatrix ladder = displacement(params.alpha, basis).matrix.real();
  const RMatrix sign = sign_x_observable(basis).matrix.real();
  const RMatrix par = parity(basis).matrix.real();

  Spectrum out;
  out.params = params;
  out.dim = basis.dim();
  out.energy_shift = even.energies(0);

  for (std::size_t i = 0; i < n_even; ++i) {
    RVector v = even.states.col(static_cast<Eigen::Index>(i));
    const RVector overlaps = ladder.transpose() * v;
    if (overlaps(dominant(overlaps)) < 0) v = -v;
    out.even_levels.push_back({even.energies(static_cast<Eigen::Index>(i)) - out.energy_shift,
                               v.cast<cplx>()});
  }
  for (std::size_t i = 0; i < n_odd; ++i) {
    RVector v = odd.states.col(static_cast<Eigen::Index>(i));
    double align = 0.0;
    if (i < n_even) align = out.even_levels[i].state.real().dot(sign * v);
    if (std::abs(align) > 1e-12) {
      if (align < 0) v = -v;
    } else {
      const RVector overlaps = ladder.transpose() * v;
      if (overlaps(dominant(overlaps)) < 0) v = -v;
    }
    out.odd_levels.push_back({odd.energies(static_cast<Eigen::Index>(i)) - out.energy_shift,
                              v.cast<cplx>()});
  }

  for (const auto* levels : {&out.even_levels, &out.odd_levels}) {
    const double expected = levels == &out.even_levels ? 1.0 : -1.0;
    for (const auto& lv : *levels) {
      const double p = lv.state.real().dot(par * lv.state.real());
      if (std::abs(p - expected) > opts.tol.parity) {
        throw DegeneracyResolution("eigenstate parity " + std::to_string(p) +
                                   " is not definite; project onto parity sectors first");
      }
    }
  }

  const std::size_t pairs = std::min(n_even, n_odd);
  for (std::size_t i = 0; i < pairs; ++i)
    out.pair_spacings.push_back(out.odd_levels[i].energy - out.even_levels[i].energy);
  return out;
}

std::vector<SpacingRow> pair_spacing_sweep(double alpha, const std::vector<double>& delta_grid,
                                           std::size_t n_pairs, const FockBasis& basis,
                                           unsigned threads) {
  std::vector<std::vector<SpacingRow>> per_point(delta_grid.size());
  SpectrumOptions opts;
  opts.levels_per_parity = n_pairs;
  parallel_for(delta_grid.size(), threads, [&](std::size_t i) {
    const double delta = delta_grid[i];
    if (!std::isfinite(delta)) throw InvalidParameter("detuning grid contains a non-finite value");
    const auto spec = diagonalize(SystemParams::detuned(alpha, delta), basis, opts);
    for (std::size_t k = 0; k < spec.pair_count(); ++k)
      per_point[i].push_back({delta, k, spec.pair_spacings[k]});
  });
  std::vector<SpacingRow> rows;
  for (auto& pp : per_point) rows.insert(rows.end(), pp.begin(), pp.end());
  return rows;
}

BlockHamiltonian displaced_block_hamiltonian(const SystemParams& params, int sign) {
  params.validate();
  if (sign != 1 && sign != -1) throw InvalidParameter("block sign must be +1 or -1");
  const auto m = params.degeneracy_index();
  if (!m) {
    throw NotBlockable("detuning " + std::to_string(params.delta) +
                       " is not an even multiple of K; the displaced frame does not block");
  }
  const double k = params.kerr;
  const double a = params.alpha;
  const double delta = params.delta;
  const Eigen::Index size = *m + 1;
  BlockHamiltonian out;
  out.sign = sign;
  out.energy_offset = -delta * a * a;
  out.block = RMatrix::Zero(size, size);
  for (Eigen::Index n = 0; n < size; ++n) {
    const double nn = static_cast<double>(n);
    out.block(n, n) = (k * (nn - 1.0) + 4.0 * k * a * a - delta) * nn;
    if (n + 1 < size) {
      const double c = sign * (delta - 2.0 * k * nn) * a * std::sqrt(nn + 1.0);
      out.block(n, n + 1) = c;
      out.block(n + 1, n) = c;
    }
  }
  return out;
}

DegenerateManifold analytic_degenerate_states(const SystemParams& params, const FockBasis& basis) {
  const auto right = displaced_block_hamiltonian(params, -1);
  const auto left = displaced_block_hamiltonian(params, +1);
  const Eigen::Index size = right.block.rows();
  if (static_cast<std::size_t>(size) > basis.dim())
    throw InsufficientLevels("basis too small for the displaced block");

  Eigen::SelfAdjointEigenSolver<RMatrix> er(right.block);
  Eigen::SelfAdjointEigenSolver<RMatrix> el(left.block);
  const CMatrix d_plus = displacement(params.alpha, basis).matrix;
  const CMatrix d_minus = displacement(-params.alpha, basis).matrix;
  const auto n = static_cast<Eigen::Index>(basis.dim());

  DegenerateManifold out;
  out.m = static_cast<int>(size - 1);
  for (Eigen::Index i = 0; i < size; ++i) {
    RVector chi = er.eigenvectors().col(i);
    if (chi(dominant(chi)) < 0) chi = -chi;
    // the left block is the parity image of the right block
    RVector chi_img = chi;
    for (Eigen::Index k = 1; k < size; k += 2) chi_img(k) = -chi_img(k);
    RVector chi_l = el.eigenvectors().col(i);
    if (chi_l.dot(chi_img) < 0) chi_l = -chi_l;

    CVector pad_r = CVector::Zero(n);
    CVector pad_l = CVector::Zero(n);
    pad_r.head(size) = chi.cast<cplx>();
    pad_l.head(size) = chi_l.cast<cplx>();
    CVector r = d_plus * pad_r;
    CVector l = d_minus * pad_l;
    // same phase rule as diagonalize() applied to the even combination
    const RVector overlaps = (d_plus.adjoint() * (r + l)).real();
    if (overlaps(dominant(overlaps)) < 0) {
      r = -r;
      l = -l;
    }
    out.right_states.push_back(std::move(r));
    out.left_states.push_back(std::move(l));
    out.energies.push_back(er.eigenvalues()(i) + right.energy_offset);
  }
  return out;
}

double m1_mixing_angle(double alpha) {
  const double a2 = alpha * alpha;
  return std::atan(2.0 * alpha / (2.0 * a2 - 1.0 + std::sqrt(4.0 * a2 * a2 + 1.0)));
}

double m1_gap(double alpha, double kerr) {
  const double a2 = alpha * alpha;
  return 2.0 * kerr * std::sqrt(1.0 + 4.0 * a2 * a2);
}

CodeStates code_states(const Spectrum& spectrum, const Tolerances& tol) {
  if (spectrum.pair_count() == 0) throw InsufficientLevels("spectrum has no parity pair");
  const double d0 = spectrum.pair_spacings[0];
  if (std::abs(d0) > tol.degeneracy) {
    throw NonDegenerateGround("ground pair split by " + std::to_string(d0) +
                              " K; detuning is off a degenerate working point");
  }
  const FockBasis basis(spectrum.dim);
  CodeStates cs;
  cs.ket_plus = spectrum.even_levels[0].state;
  cs.ket_minus = spectrum.odd_levels[0].state;
  const double r = std::sqrt(0.5);
  cs.ket0 = r * (cs.ket_plus + cs.ket_minus);
  cs.ket1 = r * (cs.ket_plus - cs.ket_minus);
  if (expectation(sign_x_observable(basis), cs.ket0).real() < 0) std::swap(cs.ket0, cs.ket1);
  cs.nbar = expectation(number(basis), cs.ket0).real();
  return cs;
}

void write_spacing_csv(std::ostream& os, const std::vector<SpacingRow>& rows) {
  os << "delta_over_K,n,delta_n_over_K\n";
  for (const auto& r : rows) os << fmt(r.delta) << ',' << r.n << ',' << fmt(r.spacing) << '\n';
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
  os << "parity,n,energy_over_K\n";
  for (std::size_t i = 0; i < spectrum.even_levels.size(); ++i)
    os << "even," << i << ',' << fmt(spectrum.even_levels[i].energy) << '\n';
  for (std::size_t i = 0; i < spectrum.odd_levels.size(); ++i)
    os << "odd," << i << ',' << fmt(spectrum.odd_levels[i].energy) << '\n';
}

}  // namespace kerrcat
