#include "qmsim/ionchain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qmsim/errors.hpp"

namespace qmsim::ionchain {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGradientTolerance = 1e-12;

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool strictly_ascending(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    if (!(u(i) > u(i - 1))) return false;
  }
  return true;
}

// Newton with backtracking on the gradient norm; keeps the ions ordered.
bool newton(Eigen::VectorXd& u) {
  double res = potential_gradient(u).norm();
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd g = potential_gradient(u);
    if (max_abs(g) < kGradientTolerance) return true;
    const Eigen::VectorXd step = potential_hessian(u).ldlt().solve(-g);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      const Eigen::VectorXd trial = u + t * step;
      if (!strictly_ascending(trial)) continue;
      const double r = potential_gradient(trial).norm();
      if (r < res || (r == res && ls == 0)) {
        u = trial;
        res = r;
        accepted = true;
        break;
      }
    }
    if (!accepted) return max_abs(potential_gradient(u)) < kGradientTolerance;
  }
  return max_abs(potential_gradient(u)) < kGradientTolerance;
}

// One-dimensional Newton sweeps, one ion at a time.
bool coordinate_descent(Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  for (int sweep = 0; sweep < 100000; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double g = u(i);
      double h = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = u(i) - u(j);
        g -= std::copysign(1.0, d) / (d * d);
        h += 2.0 / std::abs(d * d * d);
      }
      double step = -g / h;
      const double lo = i > 0 ? u(i - 1) : -1e300;
      const double hi = i + 1 < n ? u(i + 1) : 1e300;
      while (!(u(i) + step > lo && u(i) + step < hi)) step *= 0.5;
      u(i) += step;
    }
    if (max_abs(potential_gradient(u)) < kGradientTolerance) return true;
  }
  return false;
}

}  // namespace

void Species::validate() const {
  if (!(mass > 0.0)) throw DomainError("species mass must be positive");
  if (!(e_hfs >= 0.0)) throw DomainError("hyperfine splitting must be non-negative");
  if (!(nuclear_spin >= 0.0) || std::fmod(2.0 * nuclear_spin, 1.0) != 0.0) {
    throw DomainError("nuclear spin must be a non-negative multiple of 1/2");
  }
}

Species Species::from_amu(double mass_amu, double g_j, double g_i, double hfs_hz,
                          double nuclear_spin, const PhysicalConstants& c) {
  Species s{mass_amu * c.atomic_mass_unit, g_j, g_i, c.hbar * 2.0 * kPi * hfs_hz, nuclear_spin};
  s.validate();
  return s;
}

Species Species::yb171(const PhysicalConstants& c) {
  return from_amu(170.936, 2.0, 0.98734, 12.642812118e9, 0.5, c);
}

void TrapConfig::validate() const {
  if (!(nu1 > 0.0)) throw DomainError("COM frequency must be positive");
  if (n_ions < 1) throw DomainError("need at least one ion");
  if (!(b >= 0.0)) throw DomainError("field gradient must be non-negative");
  if (!std::isfinite(b0)) throw DomainError("offset field must be finite");
}

double length_scale(const Species& species, double nu1, const PhysicalConstants& c) {
  species.validate();
  if (!(nu1 > 0.0)) throw DomainError("COM frequency must be positive");
  const double e2 = c.elementary_charge * c.elementary_charge;
  return std::cbrt(e2 / (4.0 * kPi * c.epsilon0 * species.mass * nu1 * nu1));
}

double spacing_estimate(int n_ions, double zeta) {
  if (n_ions < 2) throw DomainError("spacing needs at least two ions");
  return 2.0 * zeta * std::pow(static_cast<double>(n_ions), -0.56);
}

Eigen::VectorXd potential_gradient(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd g = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u(i) - u(j);
      g(i) -= std::copysign(1.0, d) / (d * d);
    }
  }
  return g;
}

Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double k = 2.0 / std::pow(std::abs(u(i) - u(j)), 3);
      h(i, i) += k;
      h(i, j) = -k;
    }
  }
  return h;
}

Eigen::VectorXd equilibrium_positions(int n_ions) {
  if (n_ions < 1) throw DomainError("need at least one ion");
  Eigen::VectorXd u(n_ions);
  if (n_ions == 1) {
    u(0) = 0.0;
    return u;
  }
  const double spacing = 2.0 * std::pow(static_cast<double>(n_ions), -0.56);
  for (int j = 0; j < n_ions; ++j) u(j) = (j - 0.5 * (n_ions - 1)) * spacing;

  if (!newton(u) && !coordinate_descent(u)) {
    throw NumericalError("ion equilibrium solver did not converge", max_abs(potential_gradient(u)));
  }
  // Remove rounding asymmetry, then polish.
  const Eigen::VectorXd mirrored = -u.reverse();
  u = 0.5 * (u + mirrored);
  newton(u);
  const double residual = max_abs(potential_gradient(u));
  if (!(residual < kGradientTolerance)) {
    throw NumericalError("ion equilibrium residual too large", residual);
  }
  return u;
}

ChainModes normal_modes(const Eigen::VectorXd& u, double nu1, double zeta) {
  if (!(nu1 > 0.0)) throw DomainError("COM frequency must be positive");
  if (u.size() == 0) throw DomainError("empty ion configuration");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(potential_hessian(u));
  if (eig.info() != Eigen::Success) throw NumericalError("Hessian diagonalization failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  if (!(lambda(0) > 0.0)) {
    throw NumericalError("configuration is not a potential minimum", lambda(0));
  }

  ChainModes modes;
  modes.u = u;
  modes.zeta = zeta;
  modes.z0 = zeta * u;
  modes.nu = nu1 * lambda.cwiseSqrt();
  modes.s = eig.eigenvectors().transpose();
  for (Eigen::Index n = 0; n < modes.s.rows(); ++n) {
    for (Eigen::Index j = 0; j < modes.s.cols(); ++j) {
      if (std::abs(modes.s(n, j)) > 1e-12) {
        if (modes.s(n, j) < 0.0) modes.s.row(n) *= -1.0;
        break;
      }
    }
  }
  return modes;
}

ChainModes solve_chain(const Species& species, const TrapConfig& trap,
                       const PhysicalConstants& c) {
  trap.validate();
  const double zeta = length_scale(species, trap.nu1, c);
  return normal_modes(equilibrium_positions(trap.n_ions), trap.nu1, zeta);
}

LambDicke lamb_dicke(double wavelength, const Species& species, double nu,
                     const PhysicalConstants& c) {
  species.validate();
  if (!(wavelength > 0.0) || !(nu > 0.0)) {
    throw DomainError("wavelength and mode frequency must be positive");
  }
  LambDicke out;
  out.delta_z = std::sqrt(c.hbar / (2.0 * species.mass * nu));
  out.delta_p = std::sqrt(c.hbar * species.mass * nu / 2.0);
  out.eta = 2.0 * kPi * out.delta_z / wavelength;
  return out;
}

double breit_rabi_chi(const Species& species, double b_field, const PhysicalConstants& c) {
  species.validate();
  if (!(species.e_hfs > 0.0)) throw DomainError("chi needs a nonzero hyperfine splitting");
  const double g_eff = species.g_j + species.g_i * c.electron_mass / c.proton_mass;
  return g_eff * c.bohr_magneton * b_field / species.e_hfs;
}

namespace {

void check_quantum_numbers(const Species& s, double m_q, int branch) {
  if (branch != 1 && branch != -1) throw DomainError("branch must be +1 or -1");
  const double f = s.nuclear_spin + 0.5 * branch;
  if (f < 0.0 || std::abs(m_q) > f + 1e-12) {
    throw DomainError("|m_q| exceeds F for the requested branch");
  }
  const double offset = m_q + s.nuclear_spin + 0.5;
  if (std::abs(offset - std::round(offset)) > 1e-12) {
    throw DomainError("m_q must be m_I +- 1/2");
  }
}

bool is_lower_stretched(const Species& s, double m_q, int branch) {
  return branch == 1 && std::abs(m_q + s.nuclear_spin + 0.5) < 1e-12;
}

}  // namespace

double breit_rabi_energy(const Species& species, double b_field, double m_q, int branch,
                         const PhysicalConstants& c) {
  check_quantum_numbers(species, m_q, branch);
  const double two_i1 = 2.0 * species.nuclear_spin + 1.0;
  const double chi = breit_rabi_chi(species, b_field, c);
  const double root = is_lower_stretched(species, m_q, branch)
                          ? 1.0 - chi
                          : std::sqrt(1.0 + 4.0 * m_q * chi / two_i1 + chi * chi);
  return species.e_hfs / (2.0 * two_i1) - species.g_i * c.nuclear_magneton * b_field * m_q +
         branch * 0.5 * species.e_hfs * root;
}

double breit_rabi_derivative(const Species& species, double b_field, double m_q, int branch,
                             const PhysicalConstants& c) {
  check_quantum_numbers(species, m_q, branch);
  const double two_i1 = 2.0 * species.nuclear_spin + 1.0;
  const double chi = breit_rabi_chi(species, b_field, c);
  const double dchi = breit_rabi_chi(species, 1.0, c);
  double droot;
  if (is_lower_stretched(species, m_q, branch)) {
    droot = -dchi;
  } else {
    const double root = std::sqrt(1.0 + 4.0 * m_q * chi / two_i1 + chi * chi);
    droot = (2.0 * m_q / two_i1 + chi) * dchi / root;
  }
  return -species.g_i * c.nuclear_magneton * m_q + branch * 0.5 * species.e_hfs * droot;
}

double qubit_frequency_gradient(const Species& species, double b_at_ion, double b,
                                const PhysicalConstants& c) {
  if (!(b >= 0.0)) throw DomainError("field gradient must be non-negative");
  const double chi = breit_rabi_chi(species, b_at_ion, c);
  return species.g_j * c.bohr_magneton * b * (1.0 + chi / std::sqrt(1.0 + chi * chi)) /
         (2.0 * c.hbar);
}

double required_gradient(const Species& species, double nu1, int n_ions,
                         const PhysicalConstants& c) {
  species.validate();
  if (n_ions < 2) throw DomainError("required gradient needs at least two ions");
  if (!(nu1 > 0.0)) throw DomainError("COM frequency must be positive");
  const double n = n_ions;
  const double e2 = c.elementary_charge * c.elementary_charge;
  return c.hbar / (2.0 * c.bohr_magneton) *
         std::cbrt(4.0 * kPi * c.epsilon0 * species.mass / e2) * std::pow(nu1, 5.0 / 3.0) *
         (4.7 * std::pow(n, 0.56) + 0.5 * std::pow(n, 1.56));
}

EpsilonMatrix epsilon_matrix(const ChainModes& modes, const Eigen::VectorXd& gradients,
                             const Species& species, const PhysicalConstants& c) {
  species.validate();
  const Eigen::Index n = modes.nu.size();
  if (gradients.size() != n || modes.s.rows() != n || modes.s.cols() != n) {
    throw DomainError("gradient and mode dimensions disagree");
  }
  EpsilonMatrix out{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index mode = 0; mode < n; ++mode) {
    const double nu = modes.nu(mode);
    const double dz = std::sqrt(c.hbar / (2.0 * species.mass * nu));
    for (Eigen::Index j = 0; j < n; ++j) {
      out.d_z(mode, j) = -c.hbar * gradients(j) / (species.mass * nu * nu);
      out.epsilon(mode, j) = modes.s(mode, j) * dz * gradients(j) / nu;
    }
  }
  return out;
}

Eigen::MatrixXd effective_lamb_dicke(const ChainModes& modes, const Eigen::MatrixXd& epsilon,
                                     double wavelength, const Species& species,
                                     const PhysicalConstants& c) {
  const Eigen::Index n = modes.nu.size();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index mode = 0; mode < n; ++mode) {
    const double eta = lamb_dicke(wavelength, species, modes.nu(mode), c).eta;
    for (Eigen::Index j = 0; j < n; ++j) {
      out(mode, j) = std::hypot(eta * modes.s(mode, j), epsilon(mode, j));
    }
  }
  return out;
}

Eigen::MatrixXd coupling_matrix(const ChainModes& modes, const Eigen::MatrixXd& epsilon) {
  const Eigen::Index n = modes.nu.size();
  if (epsilon.rows() != n || epsilon.cols() != n) {
    throw DomainError("epsilon dimensions disagree with the modes");
  }
  Eigen::MatrixXd j = epsilon.transpose() * modes.nu.asDiagonal() * epsilon;
  j = 0.5 * (j + j.transpose()).eval();
  j.diagonal().setZero();
  return j;
}

Eigen::VectorXd ion_gradients(const Species& species, const TrapConfig& trap,
                              const ChainModes& modes, bool weak_field,
                              const PhysicalConstants& c) {
  trap.validate();
  Eigen::VectorXd g(modes.z0.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double b_at_ion = weak_field ? 0.0 : std::abs(trap.b0 + trap.b * modes.z0(j));
    g(j) = qubit_frequency_gradient(species, b_at_ion, trap.b, c);
  }
  return g;
}

}  // namespace qmsim::ionchain
