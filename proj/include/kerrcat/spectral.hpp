#pragma once
// Parity-resolved eigenstructure of the detuned Kerr Hamiltonian and the
// displaced-frame block solver for the degenerate working points.

#include <iosfwd>
#include <vector>

#include "kerrcat/fock.hpp"

namespace kerrcat {

struct Level {
  double energy;
  CVector state;
};

/// Eigenpairs split by photon-number parity, each sector sorted ascending.
/// Reported energies are shifted so the even ground level sits at 0; the
/// subtracted amount is kept in `energy_shift`.
struct Spectrum {
  SystemParams params;
  std::size_t dim = 0;
  std::vector<Level> even_levels;
  std::vector<Level> odd_levels;
  std::vector<double> pair_spacings;  // odd minus even, per pair index
  double energy_shift = 0.0;

  std::size_t pair_count() const { return pair_spacings.size(); }
};

struct SpectrumOptions {
  std::size_t levels_per_parity = 20;  // 0 keeps every level
  Tolerances tol{};
};

Spectrum diagonalize(const SystemParams& params, const FockBasis& basis,
                     const SpectrumOptions& opts = {});

struct SpacingRow {
  double delta;
  std::size_t n;
  double spacing;
};

/// First n_pairs spacings for every detuning of the grid, ordered by grid
/// index then pair index. Grid points are evaluated on `threads` workers.
std::vector<SpacingRow> pair_spacing_sweep(double alpha, const std::vector<double>& delta_grid,
                                           std::size_t n_pairs, const FockBasis& basis,
                                           unsigned threads = 1);

/// Displaced-frame (m+1)x(m+1) block. sign = +1 couples with +(Delta - 2Kn),
/// giving left-well states D(-alpha) chi; sign = -1 gives right-well states
/// D(alpha) chi. Full energies are block eigenvalues plus `energy_offset`.
struct BlockHamiltonian {
  RMatrix block;
  double energy_offset = 0.0;
  int sign = 1;
};

BlockHamiltonian displaced_block_hamiltonian(const SystemParams& params, int sign);

struct DegenerateManifold {
  int m = 0;
  std::vector<CVector> right_states;
  std::vector<CVector> left_states;
  std::vector<double> energies;  // unshifted eigenvalues of H
};

DegenerateManifold analytic_degenerate_states(const SystemParams& params, const FockBasis& basis);

/// Mixing angle of the m = 1 right-well ground state in the {D(a)|0>, D(a)|1>} ladder.
double m1_mixing_angle(double alpha);
/// Gap between the two lowest degenerate pairs at m = 1.
double m1_gap(double alpha, double kerr = 1.0);

struct CodeStates {
  CVector ket0;
  CVector ket1;
  CVector ket_plus;
  CVector ket_minus;
  double nbar = 0.0;
};

CodeStates code_states(const Spectrum& spectrum, const Tolerances& tol = {});

/// delta_over_K,n,delta_n_over_K
void write_spacing_csv(std::ostream& os, const std::vector<SpacingRow>& rows);
/// parity,n,energy_over_K
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);

}  // namespace kerrcat
