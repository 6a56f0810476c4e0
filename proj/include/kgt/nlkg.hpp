#pragma once

#include <cstdint>
#include <vector>

#include "kgt/hamiltonian.hpp"
#include "kgt/indices.hpp"

namespace kgt {

// u_tt - u_xx + c^2 u + V*u + eps u^3 = 0 on [-pi, pi], truncated to |n| <= n_max.
struct ModelParams {
  double c = 1.0;
  ModeVector<double> V;
  double eps = 0.0;
  double sigma = 3.0;
  double r = 1.5;
  int n_max = 4;
  int d_max = 8;

  void validate() const;
  HamiltonianMeta meta() const { return HamiltonianMeta{sigma, r, c, n_max, d_max}; }
};

// V_n uniform on [0,1], one counter per mode.
ModeVector<double> draw_potential(int n_max, std::uint64_t seed);

ModeVector<double> frequencies(double c, const ModeVector<double>& V);
ModeVector<double> frequencies(const ModelParams& p);

// d_n = (c / sqrt(c^2 + n^2 + V_n))^(1/2)
double mode_scale(double c, int n, double v);

struct ModelHamiltonian {
  Hamiltonian N;
  Hamiltonian R;
};

// Unordered quartic z/zbar monomials with multinomial multiplicity, before
// the J/I(0) rewrite.
std::vector<Monomial> quartic_terms(const ModelParams& p);
ModelHamiltonian build_hamiltonian(const ModelParams& p);

// sum_n lambda_n |z_n|^2 in reduced form, i.e. lambda_n (J_n + I_n(0)).
Hamiltonian normal_form(const HamiltonianMeta& meta, const ModeVector<double>& lambda);
// Reads lambda_n back from the coefficients of the pure J_n terms.
ModeVector<double> normal_form_frequencies(const Hamiltonian& n);

// I_n(0) = (9/16) exp(-2 r ln^sigma floor(n)), kept as logarithms.
Amplitudes initial_amplitudes(const ModelParams& p);
Amplitudes initial_amplitudes(const HamiltonianMeta& meta);

// z_n(t) = sqrt(I_n(0)) exp(-i omega_n t)
ModeVector<cplx> torus_trajectory(const ModeVector<double>& omega, const Amplitudes& i0, double t);

// dH/dzbar_n at (z, conj z) for a fixed H and I(0), with the b = 0
// representation and the I(0)^a factors folded in once.
class GradientEvaluator {
 public:
  GradientEvaluator(const Hamiltonian& h, const Amplitudes& i0);
  ModeVector<cplx> operator()(const ModeVector<cplx>& z) const;
  std::size_t size() const { return terms_.size(); }

 private:
  struct Factor {
    int n, k, kp;
  };
  struct Entry {
    cplx coeff;
    std::vector<Factor> factors;
  };
  int n_max_;
  std::vector<Entry> terms_;
};

// dH/dzbar_n at (z, conj z), differentiated on the b = 0 representation.
ModeVector<cplx> gradient_zbar(const Hamiltonian& h, const ModeVector<cplx>& z, const Amplitudes& i0);

// max_n | -i dH/dzbar_n - (-i omega_n z_n) |
double motion_residual(const Hamiltonian& h, const ModeVector<cplx>& z, const Amplitudes& i0,
                       const ModeVector<double>& omega);

}  // namespace kgt
