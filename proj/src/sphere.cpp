#include "qmsim/sphere.hpp"

#include <cmath>
#include <numbers>

#include "qmsim/errors.hpp"

namespace qmsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence for P_n(x); p0 ends as P_{n-1}.
      double p0 = 0.0;
      double p1 = 1.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
  if (n < 1) throw DomainError("need at least one point");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  return pts;
}

SphereGrid::SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < 1 || n_phi < 1 || static_cast<long>(n_theta) * n_phi < 8) {
    throw DomainError("sphere grid needs at least 8 nodes");
  }
  const GaussLegendre gl = gauss_legendre(n_theta);
  const double dphi = 2.0 * kPi / n_phi;
  nodes_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  weights_.reserve(nodes_.capacity());
  // Ascending theta means descending cos(theta).
  for (int it = n_theta - 1; it >= 0; --it) {
    const double ct = gl.nodes[it];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    thetas_.push_back(std::acos(ct));
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = ip * dphi;
      nodes_.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      weights_.push_back(gl.weights[it] * dphi);
    }
  }
}

double SphereGrid::phi(std::size_t k) const {
  return static_cast<double>(k % n_phi_) * 2.0 * kPi / n_phi_;
}

SphereDistribution SphereDistribution::from_unnormalized(std::shared_ptr<const SphereGrid> grid,
                                                         std::vector<double> values) {
  if (!grid) throw DomainError("null sphere grid");
  if (values.size() != grid->size()) throw DomainError("density size does not match grid");
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 0.0) || !std::isfinite(values[k])) {
      throw InvariantViolation("density must be finite and non-negative");
    }
    total += grid->weight(k) * values[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("density integrates to zero", total);
  }
  for (double& v : values) v /= total;
  return SphereDistribution(std::move(grid), std::move(values));
}

double SphereDistribution::integral() const {
  double total = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) total += grid_->weight(k) * values_[k];
  return total;
}

}  // namespace qmsim
