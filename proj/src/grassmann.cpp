#include "ustlab/grassmann.hpp"

#include <bit>
#include <cmath>

#include "ustlab/green.hpp"

namespace ustlab {

GrassmannAlgebra::GrassmannAlgebra(int pairs) : pairs_(pairs) {
  if (pairs < 1 || pairs > 14)
    throw ValidationError("Grassmann algebra supports 1..14 generator pairs");
  full_ = pairs < 16 ? (uint32_t{1} << (2 * pairs)) - 1 : 0;
}

GrassmannElement::GrassmannElement(std::shared_ptr<const GrassmannAlgebra> alg)
    : alg_(std::move(alg)) {
  if (alg_->dense()) dense_.assign(size_t{1} << alg_->generators(), 0.0);
}

GrassmannElement GrassmannElement::unit(std::shared_ptr<const GrassmannAlgebra> alg) {
  return monomial(std::move(alg), 0, 1.0);
}

GrassmannElement GrassmannElement::generator(
    std::shared_ptr<const GrassmannAlgebra> alg, int index) {
  if (index < 0 || index >= alg->generators())
    throw ValidationError("generator index out of range");
  return monomial(std::move(alg), uint32_t{1} << index, 1.0);
}

GrassmannElement GrassmannElement::monomial(
    std::shared_ptr<const GrassmannAlgebra> alg, uint32_t mask, double coeff) {
  GrassmannElement e(std::move(alg));
  e.add_term(mask, coeff);
  return e;
}

double GrassmannElement::coeff(uint32_t mask) const {
  if (alg_->dense()) return dense_[mask];
  auto it = sparse_.find(mask);
  return it == sparse_.end() ? 0.0 : it->second;
}

void GrassmannElement::add_term(uint32_t mask, double c) {
  if (c == 0.0) return;
  if (alg_->dense())
    dense_[mask] += c;
  else
    sparse_[mask] += c;
}

void GrassmannElement::for_each_term(
    const std::function<void(uint32_t, double)>& fn) const {
  if (alg_->dense()) {
    for (uint32_t m = 0; m < dense_.size(); ++m)
      if (dense_[m] != 0.0) fn(m, dense_[m]);
  } else {
    for (auto& [m, c] : sparse_)
      if (c != 0.0) fn(m, c);
  }
}

int GrassmannElement::term_count() const {
  int n = 0;
  for_each_term([&](uint32_t, double) { ++n; });
  return n;
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
  o.for_each_term([&](uint32_t m, double c) { add_term(m, c); });
  return *this;
}

GrassmannElement& GrassmannElement::operator-=(const GrassmannElement& o) {
  o.for_each_term([&](uint32_t m, double c) { add_term(m, -c); });
  return *this;
}

GrassmannElement& GrassmannElement::operator*=(double s) {
  if (alg_->dense()) {
    for (auto& c : dense_) c *= s;
  } else {
    for (auto& [m, c] : sparse_) c *= s;
  }
  return *this;
}

GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) {
  a += b;
  return a;
}

GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) {
  a -= b;
  return a;
}

GrassmannElement operator*(double s, GrassmannElement a) {
  a *= s;
  return a;
}

namespace {

// Parity of interleaving B past A (disjoint masks): for each generator j
// in B, count generators of A above j.
int interleave_sign(uint32_t a, uint32_t b) {
  int swaps = 0;
  while (b) {
    int j = std::countr_zero(b);
    swaps += std::popcount(a >> (j + 1));
    b &= b - 1;
  }
  return swaps % 2 == 0 ? 1 : -1;
}

}  // namespace

GrassmannElement gmul(const GrassmannElement& a, const GrassmannElement& b) {
  if (a.alg_.get() != b.alg_.get())
    throw ValidationError("Grassmann elements from different algebras");
  std::vector<std::pair<uint32_t, double>> ta, tb;
  a.for_each_term([&](uint32_t m, double c) { ta.emplace_back(m, c); });
  b.for_each_term([&](uint32_t m, double c) { tb.emplace_back(m, c); });
  GrassmannElement out(a.alg_);
  for (auto& [ma, ca] : ta)
    for (auto& [mb, cb] : tb) {
      if (ma & mb) continue;  // a repeated generator squares to zero
      out.add_term(ma | mb, interleave_sign(ma, mb) * ca * cb);
    }
  return out;
}

double berezin(const GrassmannElement& f) {
  // With ascending canonical storage the derivative string
  // d_{xi_M} ... d_{xi_1} picks the top coefficient with sign +1.
  return f.coeff(f.algebra().full_mask());
}

FgffState::FgffState(const FiniteGraph& g, VertexId ground)
    : graph_(std::make_shared<FiniteGraph>(g)) {
  std::vector<VertexId> block;
  if (graph_->has_boundary()) {
    if (ground >= 0)
      throw ValidationError("ground vertex only applies to boundaryless graphs");
    block = graph_->interior();
  } else {
    if (ground < 0) ground = 0;
    if (!graph_->has_vertex(ground)) throw ValidationError("ground vertex not in graph");
    for (int v = 0; v < graph_->vertex_count(); ++v)
      if (v != ground) block.push_back(v);
  }
  int m = static_cast<int>(block.size());
  alg_ = std::make_shared<GrassmannAlgebra>(m);
  pair_of_.assign(graph_->vertex_count(), -1);
  for (int i = 0; i < m; ++i) pair_of_[block[i]] = i;

  Eigen::MatrixXd lap = laplacian(*graph_);
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = -lap(block[i], block[j]);
  det_ = Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
  if (std::abs(det_) < 1e-300)
    throw ValidationError("singular -Laplacian: no boundary or ground available");

  // exp(<psi, A psibar>) = prod over nonzero entries of (1 + A_uv psi_u psibar_v);
  // the quadratic monomials commute and square to zero, so the product
  // is exact.
  weight_ = GrassmannElement::unit(alg_);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < m; ++v) {
      if (a(u, v) == 0.0) continue;
      uint32_t mask = (uint32_t{1} << alg_->psi(u)) | (uint32_t{1} << alg_->psibar(v));
      GrassmannElement factor = GrassmannElement::unit(alg_);
      int sign = interleave_sign(uint32_t{1} << alg_->psi(u),
                                 uint32_t{1} << alg_->psibar(v));
      factor.add_term(mask, sign * a(u, v));
      weight_ = gmul(*weight_, factor);
    }
}

int FgffState::pair_index(VertexId v) const {
  if (!graph_->has_vertex(v)) throw ValidationError("vertex not in graph");
  return pair_of_[v];
}

double FgffState::expectation(const GrassmannElement& f) const {
  if (f.algebra_ptr().get() != alg_.get())
    throw ValidationError("element does not belong to this state's algebra");
  return berezin(gmul(*weight_, f)) / det_;
}

GrassmannElement FgffState::one() const { return GrassmannElement::unit(alg_); }

GrassmannElement FgffState::zeta(const DirectedEdge& e) const {
  if (!graph_->adjacent(e.tail, e.tip)) throw ValidationError("edge not in graph");
  int pt = pair_of_[e.tail], ph = pair_of_[e.tip];
  GrassmannElement dpsi(alg_), dpsibar(alg_);
  if (ph >= 0) dpsi.add_term(uint32_t{1} << alg_->psi(ph), 1.0);
  if (pt >= 0) dpsi.add_term(uint32_t{1} << alg_->psi(pt), -1.0);
  if (ph >= 0) dpsibar.add_term(uint32_t{1} << alg_->psibar(ph), 1.0);
  if (pt >= 0) dpsibar.add_term(uint32_t{1} << alg_->psibar(pt), -1.0);
  return gmul(dpsi, dpsibar);
}

GrassmannElement FgffState::x_field(VertexId v, int k) const {
  auto star = graph_->star(v);
  int deg = static_cast<int>(star.edges.size());
  if (k < 0 || k > deg)
    throw ValidationError("degree target out of range for the star");
  // Elementary symmetric polynomial of the commuting zeta's.
  std::vector<GrassmannElement> elem(k + 1, GrassmannElement(alg_));
  elem[0] = one();
  for (auto& e : star.edges) {
    GrassmannElement z = zeta(e);
    for (int j = k; j >= 1; --j)
      elem[j] += gmul(z, elem[j - 1]);
  }
  return elem[k];
}

GrassmannElement FgffState::y_field(VertexId v) const {
  auto star = graph_->star(v);
  GrassmannElement prod = one();
  for (auto& e : star.edges) prod = gmul(prod, one() - zeta(e));
  return prod;
}

namespace {

GrassmannElement gaussian_weight(std::shared_ptr<const GrassmannAlgebra> alg,
                                 const Eigen::MatrixXd& a) {
  int m = alg->pairs();
  GrassmannElement w = GrassmannElement::unit(alg);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < m; ++v) {
      if (a(u, v) == 0.0) continue;
      uint32_t pu = uint32_t{1} << alg->psi(u);
      uint32_t pv = uint32_t{1} << alg->psibar(v);
      GrassmannElement factor = GrassmannElement::unit(alg);
      factor.add_term(pu | pv, interleave_sign(pu, pv) * a(u, v));
      w = gmul(w, factor);
    }
  return w;
}

}  // namespace

WickCheck wick_check_part1(const Eigen::MatrixXd& a, const std::vector<int>& i_seq,
                           const std::vector<int>& j_seq) {
  int m = static_cast<int>(a.rows());
  if (a.cols() != m) throw ValidationError("A must be square");
  auto alg = std::make_shared<GrassmannAlgebra>(m);

  GrassmannElement prefactor = GrassmannElement::unit(alg);
  for (size_t t = 0; t < std::max(i_seq.size(), j_seq.size()); ++t) {
    if (t < i_seq.size())
      prefactor = gmul(prefactor, GrassmannElement::generator(alg, alg->psi(i_seq[t])));
    if (t < j_seq.size())
      prefactor =
          gmul(prefactor, GrassmannElement::generator(alg, alg->psibar(j_seq[t])));
  }
  WickCheck out;
  out.lhs = berezin(gmul(prefactor, gaussian_weight(alg, a)));
  if (i_seq.size() != j_seq.size()) {
    out.rhs = 0.0;  // unequal index counts integrate to zero
    return out;
  }
  double det_a = Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
  Eigen::MatrixXd inv_t = a.inverse().transpose();
  int r = static_cast<int>(i_seq.size());
  Eigen::MatrixXd sub(r, r);
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q) sub(p, q) = inv_t(i_seq[p], j_seq[q]);
  out.rhs = det_a * (r == 0 ? 1.0
                            : Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant());
  return out;
}

WickCheck wick_check_part2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& c) {
  int m = static_cast<int>(a.rows());
  int r = static_cast<int>(b.rows());
  if (a.cols() != m || b.cols() != m || c.rows() != m || c.cols() != r)
    throw ValidationError("Wick part 2 needs A (m x m), B (r x m), C (m x r)");
  auto alg = std::make_shared<GrassmannAlgebra>(m);

  GrassmannElement prefactor = GrassmannElement::unit(alg);
  for (int t = 0; t < r; ++t) {
    GrassmannElement psi_c(alg), b_psibar(alg);
    for (int i = 0; i < m; ++i) {
      psi_c.add_term(uint32_t{1} << alg->psi(i), c(i, t));
      b_psibar.add_term(uint32_t{1} << alg->psibar(i), b(t, i));
    }
    prefactor = gmul(prefactor, gmul(psi_c, b_psibar));
  }
  WickCheck out;
  out.lhs = berezin(gmul(prefactor, gaussian_weight(alg, a)));
  double det_a = Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
  Eigen::MatrixXd inner = b * a.inverse() * c;
  out.rhs = det_a * (r == 0 ? 1.0
                            : Eigen::PartialPivLU<Eigen::MatrixXd>(inner).determinant());
  return out;
}

}  // namespace ustlab
