#pragma once

// Static properties of a linear string of N ions in a harmonic trap with an
// axial magnetic-field gradient: geometry, axial normal modes, Lamb-Dicke
// parameters, hyperfine (Breit-Rabi) levels, addressing requirements and
// the mode-mediated spin-spin couplings J_ij.
//
// Dimensionless positions u are in units of the length scale
// zeta = (e^2 / 4 pi eps0 m nu1^2)^(1/3); the potential is
// V(u) = sum_j u_j^2 / 2 + sum_{i<j} 1 / |u_i - u_j|.

#include <Eigen/Dense>

#include "qmsim/constants.hpp"

namespace qmsim::ionchain {

struct Species {
  double mass = 0.0;          // kg
  double g_j = 2.0;           // electronic g-factor
  double g_i = 0.0;           // nuclear g-factor
  double e_hfs = 0.0;         // zero-field hyperfine splitting, J
  double nuclear_spin = 0.5;  // I

  void validate() const;

  static Species from_amu(double mass_amu, double g_j, double g_i, double hfs_hz,
                          double nuclear_spin, const PhysicalConstants& c = codata2018());
  /// 171Yb+ ground state: 170.936 u, g_J = 2, g_I = 0.98734, 12.642812118 GHz, I = 1/2.
  static Species yb171(const PhysicalConstants& c = codata2018());
};

struct TrapConfig {
  double nu1 = 0.0;   // COM angular frequency, rad/s
  int n_ions = 1;
  double b = 0.0;     // axial gradient, T/m
  double b0 = 0.0;    // offset field, T

  void validate() const;
};

struct ChainModes {
  Eigen::VectorXd u;   // dimensionless positions, ascending
  Eigen::VectorXd z0;  // positions, m
  Eigen::VectorXd nu;  // mode angular frequencies, ascending, rad/s
  Eigen::MatrixXd s;   // s(n, j): participation of ion j in mode n; rows orthonormal
  double zeta = 0.0;   // length scale, m
};

/// zeta = (e^2 / 4 pi eps0 m nu1^2)^(1/3).
double length_scale(const Species& species, double nu1, const PhysicalConstants& c = codata2018());

/// Fit for the inter-ion spacing, 2 zeta N^-0.56. Requires N >= 2.
double spacing_estimate(int n_ions, double zeta);

Eigen::VectorXd potential_gradient(const Eigen::VectorXd& u);
Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& u);

/// Equilibrium of V by damped Newton (coordinate descent if Newton stalls).
/// Max gradient component below 1e-12; throws NumericalError otherwise.
Eigen::VectorXd equilibrium_positions(int n_ions);

/// Axial modes at equilibrium u: nu_n = nu1 sqrt(lambda_n) with lambda_n the
/// Hessian eigenvalues. Each mode vector's first nonzero component is positive.
ChainModes normal_modes(const Eigen::VectorXd& u, double nu1, double zeta = 0.0);

ChainModes solve_chain(const Species& species, const TrapConfig& trap,
                       const PhysicalConstants& c = codata2018());

struct LambDicke {
  double eta = 0.0;      // 2 pi delta_z / wavelength
  double delta_z = 0.0;  // sqrt(hbar / 2 m nu), m
  double delta_p = 0.0;  // sqrt(hbar m nu / 2), kg m/s
};

LambDicke lamb_dicke(double wavelength, const Species& species, double nu,
                     const PhysicalConstants& c = codata2018());

/// chi = (g_J + g_I m_e/m_p) mu_B B / E_hfs.
double breit_rabi_chi(const Species& species, double b_field,
                      const PhysicalConstants& c = codata2018());

/// Hyperfine level energy for J = 1/2. `branch` is +1 for levels from
/// F = I + 1/2, -1 for F = I - 1/2. The stretched level m_q = -(I + 1/2)
/// uses the signed root (1 - chi) so its energy stays linear in B.
double breit_rabi_energy(const Species& species, double b_field, double m_q, int branch,
                         const PhysicalConstants& c = codata2018());

/// Analytic dE/dB of breit_rabi_energy.
double breit_rabi_derivative(const Species& species, double b_field, double m_q, int branch,
                             const PhysicalConstants& c = codata2018());

/// d omega_01 / dz = g_J mu_B b (1 + chi / sqrt(1 + chi^2)) / (2 hbar), nuclear term neglected.
double qubit_frequency_gradient(const Species& species, double b_at_ion, double b,
                                const PhysicalConstants& c = codata2018());

/// Weak-field gradient that separates neighbouring qubit resonances by 2 nu_N + nu_1:
/// (hbar / 2 mu_B) (4 pi eps0 m / e^2)^(1/3) nu1^(5/3) (4.7 N^0.56 + 0.5 N^1.56).
double required_gradient(const Species& species, double nu1, int n_ions,
                         const PhysicalConstants& c = codata2018());

struct EpsilonMatrix {
  Eigen::MatrixXd epsilon;  // epsilon(n, j) = s(n, j) delta_z_n grad_j / nu_n
  Eigen::MatrixXd d_z;      // d_z(n, j) = -hbar grad_j / (m nu_n^2), m
};

/// `gradients` holds d omega_01 / dz at each ion (rad s^-1 m^-1).
EpsilonMatrix epsilon_matrix(const ChainModes& modes, const Eigen::VectorXd& gradients,
                             const Species& species, const PhysicalConstants& c = codata2018());

/// |eta'_nj| = |eta_n s(n, j) + i epsilon(n, j)| for radiation of the given wavelength.
Eigen::MatrixXd effective_lamb_dicke(const ChainModes& modes, const Eigen::MatrixXd& epsilon,
                                     double wavelength, const Species& species,
                                     const PhysicalConstants& c = codata2018());

/// J_ij = sum_n nu_n epsilon(n, i) epsilon(n, j) in rad/s; symmetric, zero diagonal.
Eigen::MatrixXd coupling_matrix(const ChainModes& modes, const Eigen::MatrixXd& epsilon);

/// Per-ion gradients for `trap`. In weak-field mode chi is taken as 0;
/// otherwise it is evaluated at |b0 + b z_j|.
Eigen::VectorXd ion_gradients(const Species& species, const TrapConfig& trap,
                              const ChainModes& modes, bool weak_field,
                              const PhysicalConstants& c = codata2018());

}  // namespace qmsim::ionchain
