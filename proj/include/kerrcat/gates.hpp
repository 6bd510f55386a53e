#pragma once
// Bias-preserving gates: Zeno Z rotations, the feed-forward X gate, the
// conditional-rotation CNOT and adiabatic preparation. Time-dependent
// evolution uses an adaptive Dormand-Prince 5(4) integrator.

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kerrcat/filters.hpp"

namespace kerrcat {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 20'000'000;
};

enum class PulseShape { gaussian, constant, samples };

/// Real drive envelope eps_Z(t) on [0, T], scaled so 4 sqrt(nbar) int eps = angle.
struct Pulse {
  PulseShape shape = PulseShape::gaussian;
  double duration = 0.0;
  double target_angle = 0.0;
  double nbar = 0.0;
  double scale = 0.0;
  double sigma = 0.0;          // gaussian width
  std::vector<double> values;  // uniform samples over [0, T], linear interpolation

  double amplitude(double t) const;
  /// int_0^T eps(t) dt
  double area() const;
  /// Same envelope with the opposite sign.
  Pulse negated() const;
};

/// exp(-(t - T/2)^2 / 2 sigma^2) truncated to [0, T], sigma = sigma_fraction T.
Pulse gaussian_pulse(double duration, double angle, double nbar, double sigma_fraction = 0.125);
Pulse constant_pulse(double duration, double angle, double nbar);
Pulse sampled_pulse(double duration, double angle, double nbar, std::vector<double> shape);

enum class ThetaShape { smoothstep, linear };

/// theta(t) = final_angle s(t / T) with s linear or 3u^2 - 2u^3.
struct ThetaSchedule {
  double final_angle = 3.14159265358979323846;
  ThetaShape shape = ThetaShape::smoothstep;

  double theta(double t, double duration) const;
  double theta_dot(double t, double duration) const;
};

struct GateResult {
  CMatrix rho;                    // final cat (or two-mode) state
  double fidelity = 0.0;          // to the ideal target
  double p_z = 0.0;               // nbar kappa1 T
  double p_z_na = 0.0;            // 1 - fidelity
  double p_z_na_projected = 0.0;  // 1 - fidelity / (1 - leakage)
  double leakage = 0.0;
};

/// alpha~ = <0|_m (a + a+) |0>_m / 2 in the model basis.
double alpha_tilde(const CatModel& model);

struct ZenoOptions {
  std::size_t n_trunc = 14;
  std::size_t fock_dim = 0;
  std::size_t cap = kDefaultCompositeCap;
  IntegratorOptions integrator{};
};

/// Evolves |+>_m under H + eps_Z(t) X (plus noise and filter when given) and
/// compares with exp(-i angle Z_L / 2)|+>_m.
GateResult zeno_z_gate(const SystemParams& params, const std::optional<NoiseParams>& noise,
                       const std::optional<FilterParams>& filter, const Pulse& pulse,
                       const ZenoOptions& opts = {});

/// K a+^2 a^2 + eps2 e^{2i theta} a+^2 + eps2 e^{-2i theta} a^2 - Delta n + K alpha^4 - theta_dot (n - n_ref)
QuantumOperator x_gate_hamiltonian(const SystemParams& params, const FockBasis& basis, double theta,
                                   double theta_dot, double n_ref = 0.0);

struct XGateOptions {
  std::size_t fock_dim = 0;
  IntegratorOptions integrator{};
};

/// Evolves |0>_m; fidelity to exp(i theta(T) n)|0>_m, leakage outside the rotated code space.
GateResult x_gate(const SystemParams& params, const ThetaSchedule& schedule, double duration,
                  const XGateOptions& opts = {});

/// Two-mode model with index c * d_t + t. H(t) = h0 + e^{-2i theta} b + e^{2i theta} b+ + theta_dot c.
struct CnotModel {
  SystemParams control;
  SystemParams target;
  std::size_t dim_c = 0;
  std::size_t dim_t = 0;
  double alpha_tilde_c = 0.0;
  double nbar_t = 0.0;
  CodeStates code_c;
  CodeStates code_t;
  CMatrix h0;
  CMatrix b;
  CMatrix c;

  Basis descriptor() const { return {BasisKind::two_mode, dim_c * dim_t}; }
};

inline constexpr std::size_t kDefaultTwoModeCap = 1024;

CnotModel make_cnot_model(const SystemParams& control, const SystemParams& target, std::size_t dim_c,
                          std::size_t dim_t, std::size_t cap = kDefaultTwoModeCap);

QuantumOperator cnot_hamiltonian(const CnotModel& model, const ThetaSchedule& schedule, double t,
                                 double duration);

/// Target-mode generator with the control operators a_c, a_c+ replaced by the scalar value.
QuantumOperator cnot_target_reduction(const CnotModel& model, cplx control_value, double theta,
                                      double theta_dot);

struct CnotResult {
  std::array<double, 4> fidelities{};  // |00>, |01>, |10>, |11> inputs
  double min_fidelity = 0.0;
};

CnotResult cnot_gate(const CnotModel& model, const ThetaSchedule& schedule, double duration,
                     const IntegratorOptions& integ = {}, unsigned threads = 1);

/// Linear interpolation of alpha^2 (so eps2) and Delta between the endpoints.
struct AdiabaticRamp {
  double alpha_start = 0.0;
  double alpha_end = 2.0;
  double delta_start = 0.0;
  double delta_end = 0.0;
  bool smooth = false;  // smoothstep instead of linear
};

enum class PrepStart { vacuum, code_zero };

struct PrepOptions {
  std::size_t fock_dim = 0;
  IntegratorOptions integrator{};
};

/// vacuum start targets the even ground state |+> of the final Hamiltonian;
/// code_zero starts in |0>_m of the initial point and targets |0>_m of the final one.
GateResult adiabatic_prepare(const AdiabaticRamp& ramp, double duration, PrepStart start,
                             const std::optional<NoiseParams>& noise, const PrepOptions& opts = {});

struct ZenoRow {
  double duration;
  double p_z_na;
  double kappa_eng;
  int n_filters;
};

/// T_in_inv_K,p_Z_NA,kappa_eng_over_K,n_filters
void write_zeno_csv(std::ostream& os, const std::vector<ZenoRow>& rows);

}  // namespace kerrcat
