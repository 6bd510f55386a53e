#include "kerrcat/viz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/kernels.hpp"
#include "kerrcat/parallel.hpp"

namespace kerrcat {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

// Laguerre recurrence over the matrix elements |m><n|, one grid row at a time.
void wigner_row(const CMatrix& rho, const std::vector<double>& xs, double p, double* out) {
  namespace kn = kernels;
  const std::size_t n = xs.size();
  const auto dim = static_cast<std::size_t>(rho.rows());
  std::vector<std::vector<cplx>> wl(dim, std::vector<cplx>(n));
  std::vector<cplx> a(n), ac(n), temp(n), temp2(n);
  std::vector<double> acc(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = {xs[j], p};
    ac[j] = std::conj(a[j]);
    wl[0][j] = std::exp(-2.0 * std::norm(a[j])) / std::numbers::pi;
  }
  auto r = [&](std::size_t m, std::size_t k) { return rho(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)); };
  kn::accumulate_real(r(0, 0), wl[0], 1.0, acc);
  for (std::size_t k = 1; k < dim; ++k) {
    kn::cmul_sub(a, wl[k - 1], wl[k - 1], 2.0 / std::sqrt(static_cast<double>(k)), 0.0, wl[k]);
    kn::accumulate_real(r(0, k), wl[k], 2.0, acc);
  }
  for (std::size_t m = 1; m < dim; ++m) {
    const double sm = std::sqrt(static_cast<double>(m));
    temp = wl[m];
    kn::cmul_sub(ac, temp, wl[m - 1], 2.0 / sm, 1.0, wl[m]);
    kn::accumulate_real(r(m, m), wl[m], 1.0, acc);
    for (std::size_t k = m + 1; k < dim; ++k) {
      const double sk = std::sqrt(static_cast<double>(k));
      kn::cmul_sub(a, wl[k - 1], temp, 2.0 / sk, sm / sk, temp2);
      std::swap(temp, wl[k]);
      std::swap(wl[k], temp2);
      kn::accumulate_real(r(m, k), wl[k], 2.0, acc);
    }
  }
  for (std::size_t j = 0; j < n; ++j) out[j] = 2.0 * acc[j];
}

}  // namespace

void GridSpec::validate() const {
  if (nx < 1 || np < 1) throw InvalidParameter("grid needs at least one point per axis");
  if (!(x_max >= x_min) || !(p_max >= p_min)) throw InvalidParameter("grid range is reversed");
  if (!std::isfinite(x_min + x_max + p_min + p_max)) throw InvalidParameter("grid range must be finite");
}

double WignerGrid::integral() const {
  const double dx = x.size() > 1 ? x[1] - x[0] : 0.0;
  const double dp = p.size() > 1 ? p[1] - p[0] : 0.0;
  return values.sum() * dx * dp;
}

WignerGrid wigner(const CMatrix& rho, const GridSpec& grid, unsigned threads) {
  grid.validate();
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidParameter("density matrix must be square");
  WignerGrid w;
  w.x = linspace(grid.x_min, grid.x_max, grid.nx);
  w.p = linspace(grid.p_min, grid.p_max, grid.np);
  const double reach = std::max({std::abs(grid.x_min), std::abs(grid.x_max)}) *
                           std::max({std::abs(grid.x_min), std::abs(grid.x_max)}) +
                       std::max({std::abs(grid.p_min), std::abs(grid.p_max)}) *
                           std::max({std::abs(grid.p_min), std::abs(grid.p_max)});
  if (reach > static_cast<double>(rho.rows()))
    w.warning = "grid extends beyond the Fock truncation support";
  RMatrix rowmajor(static_cast<Eigen::Index>(grid.nx), static_cast<Eigen::Index>(grid.np));
  parallel_for(grid.np, threads, [&](std::size_t i) { wigner_row(rho, w.x, w.p[i], rowmajor.col(static_cast<Eigen::Index>(i)).data()); });
  w.values = rowmajor.transpose();
  return w;
}

WignerGrid wigner(const CVector& psi, const GridSpec& grid, unsigned threads) {
  return wigner(CMatrix(psi * psi.adjoint()), grid, threads);
}

void write_wigner_csv(std::ostream& os, const WignerGrid& w) {
  os << "x,p,w\n";
  for (std::size_t i = 0; i < w.p.size(); ++i)
    for (std::size_t j = 0; j < w.x.size(); ++j)
      os << fmt(w.x[j]) << ',' << fmt(w.p[i]) << ','
         << fmt(w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
}

namespace {

std::string color(double t) {
  // blue (59,76,192) -> white -> red (180,4,38)
  t = std::clamp(t, -1.0, 1.0);
  const double lo[3] = {59, 76, 192};
  const double hi[3] = {180, 4, 38};
  const double* end = t < 0 ? lo : hi;
  const double s = std::abs(t);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(255 + (end[0] - 255) * s)),
                static_cast<int>(std::lround(255 + (end[1] - 255) * s)),
                static_cast<int>(std::lround(255 + (end[2] - 255) * s)));
  return buf;
}

}  // namespace

void write_wigner_svg(std::ostream& os, const WignerGrid& w, const std::string& title) {
  const std::size_t nx = w.x.size(), np = w.p.size();
  const int cell = static_cast<int>(std::max<std::size_t>(1, 600 / std::max(nx, np)));
  const int margin = 40;
  const int width = static_cast<int>(nx) * cell + 2 * margin;
  const int height = static_cast<int>(np) * cell + 2 * margin;
  const double vmax = w.values.size() ? std::max(w.values.cwiseAbs().maxCoeff(), 1e-300) : 1.0;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  if (!title.empty()) os << "<title>" << title << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < np; ++i) {
    const int yy = margin + static_cast<int>(np - 1 - i) * cell;  // p grows upward
    for (std::size_t j = 0; j < nx; ++j) {
      const double v = w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      os << "<rect x=\"" << margin + static_cast<int>(j) * cell << "\" y=\"" << yy << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << color(v / vmax) << "\"/>\n";
    }
  }
  if (!w.x.empty() && !w.p.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "x in [%.3g, %.3g], p in [%.3g, %.3g], |W| <= %.3g", w.x.front(), w.x.back(),
                  w.p.front(), w.p.back(), vmax);
    os << "<text x=\"" << margin << "\" y=\"" << height - 12 << "\" font-size=\"12\" font-family=\"sans-serif\">"
       << buf << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace kerrcat
