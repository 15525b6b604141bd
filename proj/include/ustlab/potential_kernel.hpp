#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "ustlab/graph.hpp"

namespace ustlab {

namespace quadrature {

/// Adaptive Gauss-Kronrod 15(7) integration to an absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_intervals = 4000);

}  // namespace quadrature

/// Potential kernel a(u) of the simple random walk on a 2d lattice,
/// evaluated by adaptive quadrature of the Fourier integral
///   a(u) = (2pi)^-2 \int_{[-pi,pi]^2} (1 - cos<u,theta>) / (1 - phi(theta)) dtheta
/// with phi the walk symbol. Values are cached; reads are thread-safe.
///
/// The hexagonal kernel reduces to the triangular one through the
/// two-step (two-band) decomposition of the honeycomb walk: on a common
/// sublattice a_H = (3/2) a_T, and across sublattices a_H(u, b) equals
/// the average of a_H over the three same-sublattice neighbors of b.
class PotentialKernel {
 public:
  explicit PotentialKernel(LatticeSpec spec, double quad_tol = 1e-10);

  const LatticeSpec& lattice() const { return spec_; }
  double tolerance() const { return quad_tol_; }

  /// Kernel value at Bravais coordinates (hypercubic d=2 / triangular),
  /// or at honeycomb site (base (n,m), sublattice sub) seen from an
  /// A-sublattice origin.
  double at(int n, int m, int sub = 0) const;

  /// Discrete Laplacian of the kernel at a lattice point; equals the
  /// lattice degree at the origin and vanishes elsewhere.
  double discrete_laplacian(int n, int m, int sub = 0) const;

 private:
  double bravais(int n, int m) const;  // raw 2d Fourier integral, cached

  LatticeSpec spec_;
  double quad_tol_;
  std::shared_ptr<PotentialKernel> tri_;  // hexagonal backend
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, double> cache_;
};

/// Transfer-current kernel of the infinite lattice restricted to the
/// origin star: mbar(f,g), the double discrete gradient of
/// G_0 = -a/deg along the star directions. For the hexagonal lattice
/// `sublattice` selects which of the two point types hosts the star.
class OriginStarKernel {
 public:
  explicit OriginStarKernel(const PotentialKernel& kernel, int sublattice = 0);

  const LatticeSpec& lattice() const { return spec_; }
  int degree() const { return static_cast<int>(mat_.rows()); }
  double operator()(int i, int j) const { return mat_(i, j); }
  const Eigen::MatrixXd& matrix() const { return mat_; }

 private:
  LatticeSpec spec_;
  Eigen::MatrixXd mat_;
};

/// mbar(f,g) for star directions f,g given as indices into the lattice
/// star ordering (counterclockwise from e_1).
double mbar(const PotentialKernel& kernel, int f_index, int g_index);

}  // namespace ustlab
