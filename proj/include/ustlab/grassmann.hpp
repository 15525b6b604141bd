#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ustlab/graph.hpp"

namespace ustlab {

/// Grassmann algebra on m generator pairs psi_i, psibar_i (2m letters,
/// psi_i -> bit 2i, psibar_i -> bit 2i+1). The coefficient store is a
/// dense array for m <= 10 and a sorted map above (hard cap m = 14).
class GrassmannAlgebra {
 public:
  explicit GrassmannAlgebra(int pairs);
  int pairs() const { return pairs_; }
  int generators() const { return 2 * pairs_; }
  bool dense() const { return pairs_ <= 10; }
  uint32_t full_mask() const { return full_; }
  int psi(int i) const { return 2 * i; }
  int psibar(int i) const { return 2 * i + 1; }

 private:
  int pairs_;
  uint32_t full_;
};

/// An element of the algebra: coefficients over generator subsets stored
/// in canonical ascending order of the generator index.
class GrassmannElement {
 public:
  explicit GrassmannElement(std::shared_ptr<const GrassmannAlgebra> alg);
  static GrassmannElement unit(std::shared_ptr<const GrassmannAlgebra> alg);
  static GrassmannElement generator(std::shared_ptr<const GrassmannAlgebra> alg,
                                    int index);
  static GrassmannElement monomial(std::shared_ptr<const GrassmannAlgebra> alg,
                                   uint32_t mask, double coeff);

  const GrassmannAlgebra& algebra() const { return *alg_; }
  std::shared_ptr<const GrassmannAlgebra> algebra_ptr() const { return alg_; }

  double coeff(uint32_t mask) const;
  void add_term(uint32_t mask, double c);
  void for_each_term(const std::function<void(uint32_t, double)>& fn) const;
  int term_count() const;

  GrassmannElement& operator+=(const GrassmannElement& o);
  GrassmannElement& operator-=(const GrassmannElement& o);
  GrassmannElement& operator*=(double s);
  friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b);
  friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b);
  friend GrassmannElement operator*(double s, GrassmannElement a);

 private:
  friend GrassmannElement gmul(const GrassmannElement&, const GrassmannElement&);
  std::shared_ptr<const GrassmannAlgebra> alg_;
  std::vector<double> dense_;
  std::map<uint32_t, double> sparse_;
};

/// Product in the quotient algebra: overlapping monomials annihilate,
/// the interleaving parity supplies the sign.
GrassmannElement gmul(const GrassmannElement& a, const GrassmannElement& b);

/// Berezin integral: the coefficient of the full ascending monomial
/// under the derivative order d_{xi_M} ... d_{xi_1}.
double berezin(const GrassmannElement& f);

/// The fermionic Gaussian state of a graph: generators live on the
/// interior (Dirichlet boundary or grounded root carries none), the
/// weight is exp(<psi, -Lap psibar>) expanded exactly as a product of
/// (1 + quadratic) factors.
class FgffState {
 public:
  explicit FgffState(const FiniteGraph& g, VertexId ground = -1);

  const FiniteGraph& graph() const { return *graph_; }
  std::shared_ptr<const GrassmannAlgebra> algebra() const { return alg_; }
  int pair_index(VertexId v) const;  // -1 for boundary/root vertices
  double det_weight() const { return det_; }

  /// <F> = berezin(W F) / det(-Lap_interior).
  double expectation(const GrassmannElement& f) const;

  /// zeta(e) = grad_e psi(tail) * grad_e psibar(tail); boundary
  /// generators vanish. Orientation of e is immaterial.
  GrassmannElement zeta(const DirectedEdge& e) const;
  /// Sum over k-subsets S of the star of v of prod_{e in S} zeta(e).
  GrassmannElement x_field(VertexId v, int k) const;
  /// prod_{e in star(v)} (1 - zeta(e)).
  GrassmannElement y_field(VertexId v) const;
  GrassmannElement one() const;

 private:
  std::shared_ptr<const FiniteGraph> graph_;
  std::shared_ptr<const GrassmannAlgebra> alg_;
  std::vector<int> pair_of_;
  std::optional<GrassmannElement> weight_;
  double det_ = 0;
};

struct WickCheck {
  double lhs = 0;  // Berezin-expanded Gaussian integral
  double rhs = 0;  // determinant side
};

/// Part 1: integral of prod psi_{I_a} psibar_{J_a} against exp((psi,A psibar))
/// versus det(A) det(A^{-T})_{I,J} (index sequences kept in order).
WickCheck wick_check_part1(const Eigen::MatrixXd& a, const std::vector<int>& i_seq,
                           const std::vector<int>& j_seq);

/// Part 2: factors (psi^T C)_a (B psibar)_a versus det(A) det(B A^{-1} C).
WickCheck wick_check_part2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& c);

}  // namespace ustlab
