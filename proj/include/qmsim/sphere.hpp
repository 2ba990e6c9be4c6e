#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace qmsim {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// `n` nearly uniform points on the unit sphere (golden-angle spiral).
std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

// Product quadrature on the unit sphere: Gauss-Legendre in cos(theta) times
// the uniform rule in phi. Integrates spherical polynomials of degree below
// min(2 n_theta, n_phi) exactly. Nodes are ordered by (theta, phi)
// lexicographically, theta ascending.
class SphereGrid {
 public:
  explicit SphereGrid(int n_theta = 64, int n_phi = 128);

  std::size_t size() const { return nodes_.size(); }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  const Eigen::Vector3d& node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  double theta(std::size_t k) const { return thetas_[k / n_phi_]; }
  double phi(std::size_t k) const;
  const std::vector<Eigen::Vector3d>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int n_theta_;
  int n_phi_;
  std::vector<double> thetas_;
  std::vector<Eigen::Vector3d> nodes_;
  std::vector<double> weights_;  // sum to 4 pi
};

// Probability density per unit solid angle sampled on a SphereGrid.
// Snapshots are immutable; integral() == 1 within 1e-9.
class SphereDistribution {
 public:
  /// Normalizes `values`; throws if any is negative or the integral is not positive.
  static SphereDistribution from_unnormalized(std::shared_ptr<const SphereGrid> grid,
                                              std::vector<double> values);

  const SphereGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SphereGrid>& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }

  /// Quadrature of the density over the sphere.
  double integral() const;

 private:
  SphereDistribution(std::shared_ptr<const SphereGrid> grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {}

  std::shared_ptr<const SphereGrid> grid_;
  std::vector<double> values_;
};

}  // namespace qmsim
