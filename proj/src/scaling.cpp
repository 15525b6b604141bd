#include "ustlab/scaling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include "ustlab/cumulant.hpp"
#include "ustlab/green.hpp"
#include "ustlab/transfer_current.hpp"

namespace ustlab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  double b = 1;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return std::round(b);
}

}  // namespace

double lattice_constant(const LatticeSpec& spec, int k,
                        const PotentialKernel& kernel, int base_index,
                        int sublattice) {
  if (spec.dim != 2) throw ValidationError("lattice constants are 2d only");
  const int deg = spec.degree;
  const int p = spec.plane_edges;
  if (k < 1 || k > deg) throw ValidationError("degree out of range 1..deg");
  if (base_index < 0 || base_index >= deg)
    throw ValidationError("base direction out of range");

  OriginStarKernel mbar(kernel, sublattice);
  const Eigen::MatrixXd& m = mbar.matrix();

  double total = 0;
  std::vector<int> idx, rows;
  for (uint32_t mask = 0; mask < (uint32_t{1} << deg); ++mask) {
    if (!(mask >> base_index & 1)) continue;
    int size = std::popcount(mask);
    if (size < k) continue;
    idx.clear();
    for (int j = 0; j < deg; ++j)
      if ((mask >> j & 1) && j != base_index) idx.push_back(j);

    double bracket = det_principal(m, idx);
    for (int alpha = 1; alpha < p; ++alpha) {
      int exit = (base_index + alpha) % deg;
      if (!(mask >> exit & 1)) continue;
      rows = idx;  // row of the exit direction replaced by the base row
      for (auto& r : rows)
        if (r == exit) r = base_index;
      bracket -= spec.gamma(alpha) * det_submatrix(m, rows, idx);
    }
    total += (size % 2 == 0 ? 1.0 : -1.0) * binom(size, k) * bracket;
  }
  return (k % 2 == 0 ? -1.0 : 1.0) * spec.c_lattice * total;
}

std::vector<ReferenceConstant> reference_constants() {
  const double pi = kPi;
  const double p2 = pi * pi, p3 = p2 * pi, p4 = p3 * pi;
  const double r3 = std::sqrt(3.0);
  return {
      {"Z2", 1, 8 / pi - 16 / p2, 1e-3},
      {"Z2", 2, 18 - 72 / pi + 96 / p2, 1e-3},
      {"Z2", 3, 2 + 16 / pi, 1e-3},
      {"Z2", 4, -2.0, 1e-3},
      {"tri", 1, -25.0 / 6 - 5 * r3 / (2 * pi) + 297 / p2 - 594 * r3 / p3 + 972 / p4,
       1e-3},
      {"tri", 2,
       -35.0 / 8 + 611 * r3 / (4 * pi) - 4077 / (2 * p2) + 3159 * r3 / p3 -
           4860 / p4,
       1e-3},
      {"tri", 3,
       239.0 / 4 - 537 * r3 / pi + 5031 / p2 - 6696 * r3 / p3 + 9720 / p4, 1e-3},
      {"tri", 4,
       -599.0 / 6 + 1433 * r3 / (2 * pi) - 5832 / p2 + 7074 * r3 / p3 - 9720 / p4,
       1e-3},
      {"tri", 5,
       247.0 / 4 - 841 * r3 / (2 * pi) + 3240 / p2 - 3726 * r3 / p3 + 4860 / p4,
       1e-3},
      {"tri", 6,
       -105.0 / 8 + 363 * r3 / (4 * pi) - 1395 / (2 * p2) + 783 * r3 / p3 -
           972 / p4,
       1e-3},
      {"hex", 1, 0.75, 1e-6},
      {"hex", 2, 0.0, 1e-6},
      {"hex", 3, -0.75, 1e-6},
  };
}

double DiskDomain::green(Vec2 x, Vec2 y) const {
  double dx = x.x - y.x, dy = x.y - y.y;
  double dist = std::hypot(dx, dy);
  if (dist <= 0) throw ValidationError("Green's function needs distinct points");
  double ry = std::hypot(y.x, y.y);
  if (ry >= 1 || std::hypot(x.x, x.y) >= 1)
    throw ValidationError("points must lie inside the unit disk");
  if (ry < 1e-14) return -(std::log(dist)) / (2 * kPi);
  // image point y / |y|^2
  double sx = y.x / (ry * ry), sy = y.y / (ry * ry);
  double dimg = std::hypot(x.x - sx, x.y - sy);
  return -(std::log(dist) - std::log(ry * dimg)) / (2 * kPi);
}

double DiskDomain::mixed_derivative_step(Vec2 u, Vec2 w, Vec2 x, Vec2 y,
                                         double h) const {
  auto shift = [](Vec2 a, Vec2 d, double t) {
    return Vec2{a.x + t * d.x, a.y + t * d.y};
  };
  return (green(shift(x, u, h), shift(y, w, h)) -
          green(shift(x, u, h), shift(y, w, -h)) -
          green(shift(x, u, -h), shift(y, w, h)) +
          green(shift(x, u, -h), shift(y, w, -h))) /
         (4 * h * h);
}

double DiskDomain::mixed_derivative(Vec2 u, Vec2 w, Vec2 x, Vec2 y) const {
  double coarse = mixed_derivative_step(u, w, x, y, 2 * h_);
  double fine = mixed_derivative_step(u, w, x, y, h_);
  return (4 * fine - coarse) / 3;  // one Richardson step
}

std::pair<double, double> reflection_pairing_check(const LatticeSpec& spec,
                                                   int eta_index, int alpha,
                                                   int g_index,
                                                   const DiskDomain& domain,
                                                   Vec2 x, Vec2 y) {
  if (spec.dim != 2) throw ValidationError("reflection pairing is 2d only");
  const int deg = spec.degree;
  if (eta_index < 0 || eta_index >= deg || g_index < 0 || g_index >= deg)
    throw ValidationError("star direction out of range");
  alpha = ((alpha % spec.plane_edges) + spec.plane_edges) % spec.plane_edges;
  int exit_index = (eta_index + alpha) % deg;

  auto dir = [&](int i) { return Vec2{spec.star_real[i][0], spec.star_real[i][1]}; };
  Vec2 eta = dir(eta_index), exit = dir(exit_index), g = dir(g_index);
  // reflection of the exit direction across the entry axis
  double dot = exit.x * eta.x + exit.y * eta.y;
  Vec2 mirrored{2 * dot * eta.x - exit.x, 2 * dot * eta.y - exit.y};
  // the mirror must itself be a lattice direction for these lattices
  bool found = false;
  for (int i = 0; i < deg && !found; ++i)
    found = std::abs(mirrored.x - dir(i).x) < 1e-9 &&
            std::abs(mirrored.y - dir(i).y) < 1e-9;
  if (!found)
    throw std::logic_error("reflected exit edge is not a lattice direction");

  double lhs = domain.mixed_derivative(exit, g, x, y) +
               domain.mixed_derivative(mirrored, g, x, y);
  double rhs = 2 * spec.gamma(alpha) * domain.mixed_derivative(eta, g, x, y);
  return {lhs, rhs};
}

namespace {

void for_each_cyclic(int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::sort(rest.begin(), rest.end());
  do {
    std::vector<int> sigma(n);
    int prev = 0;
    for (int r : rest) {
      sigma[prev] = r;
      prev = r;
    }
    sigma[prev] = 0;
    fn(sigma);
  } while (std::next_permutation(rest.begin(), rest.end()));
}

}  // namespace

double continuum_cumulant(const DiskDomain& domain, std::span<const Vec2> points,
                          std::span<const int> degrees, const LatticeSpec& spec,
                          const PotentialKernel& kernel) {
  if (kernel.lattice().kind != spec.kind)
    throw ValidationError("kernel and lattice spec disagree");
  int n = static_cast<int>(points.size());
  if (n < 2) throw ValidationError("continuum cumulant needs at least two points");
  if (static_cast<int>(degrees.size()) != n)
    throw ValidationError("one degree per point required");
  for (auto& pt : points) {
    if (std::hypot(pt.x, pt.y) > 1 - 10 * domain.step())
      throw ValidationError("points must keep clear of the disk boundary");
  }
  double prod_c = 1;
  for (int k : degrees) prod_c *= lattice_constant(spec, k, kernel);

  const Vec2 axes[2] = {{1, 0}, {0, 1}};
  double sum = 0;
  for_each_cyclic(n, [&](const std::vector<int>& sigma) {
    // eta: V -> {x, y}
    for (uint32_t eta = 0; eta < (uint32_t{1} << n); ++eta) {
      double prod = 1;
      for (int v = 0; v < n; ++v) {
        Vec2 u = axes[eta >> v & 1];
        Vec2 w = axes[eta >> sigma[v] & 1];
        prod *= domain.mixed_derivative(u, w, points[v], points[sigma[v]]);
      }
      sum += prod;
    }
  });
  return -prod_c * sum;
}

ConvergenceReport convergence_study(std::span<const Vec2> points,
                                    std::span<const int> degrees,
                                    std::span<const double> eps_ladder,
                                    const PotentialKernel& kernel,
                                    int max_sum_edges) {
  int n = static_cast<int>(points.size());
  if (n < 1) throw ValidationError("no points given");
  if (kernel.lattice().kind != LatticeKind::hypercubic ||
      kernel.lattice().dim != 2)
    throw ValidationError("the disk discretization is built on Z2");
  ConvergenceReport report;
  DiskDomain domain;
  report.continuum =
      continuum_cumulant(domain, points, degrees, kernel.lattice(), kernel);

  double prev_eps = 2;
  for (double eps : eps_ladder) {
    if (eps <= 0 || eps >= 1) throw ValidationError("eps must lie in (0,1)");
    if (eps >= prev_eps) throw ValidationError("eps ladder must decrease");
    prev_eps = eps;

    FiniteGraph grid = build_disk_grid(1.0 / eps);
    CumulantQuery q;
    for (int i = 0; i < n; ++i) {
      int cx = static_cast<int>(std::floor(points[i].x / eps));
      int cy = static_cast<int>(std::floor(points[i].y / eps));
      auto v = grid.vertex_at(cx, cy, 0);
      if (!v || grid.is_boundary(*v))
        throw ValidationError("discretized point fell outside the grid interior");
      q.vertices.push_back(*v);
      q.degrees.push_back(degrees[i]);
    }
    TransferMatrix m(green_dirichlet(grid));
    double kappa = cumulant_direct(m, q, max_sum_edges);
    double rescaled = kappa * std::pow(eps, -2.0 * n);
    report.eps.push_back(eps);
    report.rescaled.push_back(rescaled);
    report.gaps.push_back(std::abs(rescaled - report.continuum));
  }
  return report;
}

}  // namespace ustlab
