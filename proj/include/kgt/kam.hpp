#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgt/hamiltonian.hpp"
#include "kgt/nlkg.hpp"
#include "kgt/resonance.hpp"

namespace kgt {

inline const double kRho0 = (3.0 - 2.0 * 1.4142135623730951) / 100.0;

struct Schedule {
  int s = 0;
  double eps0 = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double d = 0.0;
};

Schedule schedule_params(int s, double eps0);
// gamma * eps_s^0.01
double divisor_floor(double gamma, const Schedule& sc);

struct HomologicalResult {
  Hamiltonian F;
  Hamiltonian r0_res;  // k = k' = 0 part of R0
  Hamiltonian r1_res;  // k = k' = 0 part of R1
  std::map<IntegerVector, double> divisors;  // ell = k - k' -> sum ell_n lambda_n
  double min_divisor = 0.0;                  // inf when nothing was solved
};

// Solves {N, F} + R0 + R1 - [R0] - [R1] = 0 term by term.
HomologicalResult solve_homological(const ModeVector<double>& lambda, const Hamiltonian& r0,
                                    const Hamiltonian& r1, double floor);
HomologicalResult solve_homological(const Hamiltonian& n, const Hamiltonian& r0, const Hamiltonian& r1,
                                    double floor);

// sum over terms with b = e_n of Re(coeff) I(0)^a
ModeVector<double> frequency_shift(const Hamiltonian& r1_res, const Amplitudes& i0);
// True when every contribution to the shift underflows to 0, so the shift and
// its parameter derivative vanish identically.
bool shift_vanishes(const Hamiltonian& r1_res, const Amplitudes& i0);
// Right side of |shift_n| <= (c/sqrt(c^2+n^2)) K_n ||R1||, with K_n read off
// the norm weights of the b = e_n terms.
ModeVector<double> shift_bound(const Hamiltonian& r1_res, const Amplitudes& i0, const NormContext& ctx);

using Matrix = std::vector<std::vector<double>>;
using VectorMap = std::function<ModeVector<double>(const ModeVector<double>&)>;

struct InversionResult {
  ModeVector<double> V;
  int iterations = 0;
  double residual = 0.0;
  double jacobian_defect = 0.0;  // ||J - I|| in the max row-sum norm
  bool range_exit = false;
};

Matrix finite_difference_jacobian(const VectorMap& f, const ModeVector<double>& at, double step);

// Solves vtilde(V) = target by V <- V - (vtilde(V) - target) from guess.
InversionResult invert_frequency_map(const VectorMap& vtilde, const ModeVector<double>& target,
                                     const ModeVector<double>& guess, double tol,
                                     const std::optional<Matrix>& jacobian = std::nullopt,
                                     double fd_step = 1e-7, int max_iterations = 100);

// Parameter-dependent state after s steps, evaluated at one V.
struct StepState {
  int s = 0;
  ModeVector<double> lambda;  // lambda~_s(V)
  ModeVector<double> vtilde;  // V~_s(V)
  Hamiltonian R;
};

StepState initial_state(const ModelParams& p, const ModeVector<double>& V);

using Observer = std::function<void(const std::string&, const Hamiltonian&)>;

struct StepConfig {
  double gamma = 1e-3;
  Amplitudes amplitudes;
  int max_brackets = 25;
  Observer observer;
};

struct StepOutput {
  StepState next;
  HomologicalResult hom;
  ModeVector<double> shift;
  bool shift_vanishes = true;
  int brackets = 0;
  double tail_bound = 0.0;
};

// R_+ = R2 + sum_{n>=1} R^(n)/n! - sum_{n>=1} Q^(n)/(n+1)!, Q the nonresonant
// part of R0 + R1; this is H o Phi_F - N_+ with the first-order cancellation
// done exactly.
Hamiltonian regrouped_remainder(const Hamiltonian& R, const HomologicalResult& hom, const LieOptions& opts,
                                int* brackets = nullptr, double* tail = nullptr);
// The same quantity straight from the Lie series of N + R.
Hamiltonian lie_remainder(const Hamiltonian& N, const Hamiltonian& R, const HomologicalResult& hom,
                          const LieOptions& opts);

StepOutput transform_step(const StepState& state, const Schedule& sc, const StepConfig& cfg);

// max_n |z_n(1) - z_n| e^{r ln^sigma floor(n)} over sampled points of D_s,
// z flowing under X_F for unit time.
double flow_displacement(const Hamiltonian& F, const Amplitudes& i0, double d_s, int samples,
                         std::uint64_t seed, int step);

struct KamOptions {
  std::optional<Amplitudes> amplitudes;  // defaults to initial_amplitudes
  double fd_step = 1e-7;
  double newton_tol = 1e-12;
  bool force_fd = false;
  int phi_samples = 32;
  int torus_points = 8;
  int max_brackets = 25;
  std::uint64_t seed = 0;
  Observer observer;
};

struct TraceEntry {
  int s = 0;
  double rho = 0.0;
  double eps = 0.0;
  double norm_r0 = 0.0;
  double norm_r1 = 0.0;
  double norm_r2 = 0.0;
  std::size_t terms = 0;
  // The rest describes the transition s -> s+1 and is empty on the last entry.
  bool has_step = false;
  double shift_inf = 0.0;        // ||V~_{s+1} - V~_s||
  double vstar_delta_inf = 0.0;  // ||V*_{s+1} - V*_s||
  double phi_size = 0.0;
  double min_divisor = 0.0;
  double lambda_shift_inf = 0.0;
  bool shift_bound_ok = true;
  bool fast_path = true;
  int newton_iterations = 0;
  int brackets = 0;
  double tail_bound = 0.0;
  // R0, R1, R2 size conditions evaluated on R_s at rho_s
  bool post_r0 = true;
  bool post_r1 = true;
  bool post_r2 = true;
};

struct KamReport {
  std::string status = "ok";
  double eps0 = 0.0;
  double gamma = 0.0;
  std::vector<TraceEntry> trace;
  // log||R0_{s+1}|| / log||R0_s||; +inf once R0 vanishes
  std::vector<double> decay_exponents;
  ModeVector<double> target;
  std::vector<ModeVector<double>> vstar;
  std::vector<ModeVector<double>> vtilde_steps;  // V~_{s+1}(V*_s) - V~_s(V*_s)
  double torus_residual = 0.0;
  std::set<IntegerVector> divisor_indices;
  std::vector<std::string> warnings;
};

// s_max steps of the iteration starting from build_hamiltonian(p), with target
// T = p.V, i.e. omega_n = c sqrt(c^2 + n^2 + V_n).
KamReport run_kam(const ModelParams& p, double gamma, int s_max, const KamOptions& opts = {});

// True for ell = e_n - e_{-n} or its negative.
bool is_mirror_pair(const IntegerVector& ell);

}  // namespace kgt
