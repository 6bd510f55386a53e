#pragma once
// Wigner functions on a rectangular phase-space grid and their CSV/SVG
// rendering. Convention: beta = x + i p, so a coherent state |alpha> peaks at
// x = Re alpha, and W(beta) = (2/pi) tr[D(beta) rho D(beta)^dagger Pi].

#include <iosfwd>
#include <string>
#include <vector>

#include "kerrcat/linalg.hpp"

namespace kerrcat {

struct GridSpec {
  double x_min = -5.0;
  double x_max = 5.0;
  double p_min = -5.0;
  double p_max = 5.0;
  std::size_t nx = 101;
  std::size_t np = 101;

  void validate() const;
};

struct WignerGrid {
  std::vector<double> x;
  std::vector<double> p;
  RMatrix values;  // values(i, j) = W(x[j] + i p[i])
  std::string warning;

  /// Riemann sum of W dx dp.
  double integral() const;
};

/// rho in the Fock basis. Rows of the grid are split over `threads` workers.
WignerGrid wigner(const CMatrix& rho, const GridSpec& grid, unsigned threads = 1);
WignerGrid wigner(const CVector& psi, const GridSpec& grid, unsigned threads = 1);

/// x,p,w with one row per grid point, p outer.
void write_wigner_csv(std::ostream& os, const WignerGrid& w);

/// Heatmap on a blue-white-red map symmetric about 0, clipped at max |W|.
void write_wigner_svg(std::ostream& os, const WignerGrid& w, const std::string& title = {});

}  // namespace kerrcat
