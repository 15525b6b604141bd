#include "ustlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ustlab {

double LatticeSpec::gamma(int alpha) const {
  alpha = ((alpha % plane_edges) + plane_edges) % plane_edges;
  switch (plane_edges) {
    case 4: {
      static constexpr double g[4] = {1.0, 0.0, -1.0, 0.0};
      return g[alpha];
    }
    case 6: {
      static constexpr double g[6] = {1.0, 0.5, -0.5, -1.0, -0.5, 0.5};
      return g[alpha];
    }
    case 3: {
      static constexpr double g[3] = {1.0, -0.5, -0.5};
      return g[alpha];
    }
    default:
      throw ValidationError("unsupported plane edge count");
  }
}

LatticeSpec LatticeSpec::z2() {
  LatticeSpec s;
  s.kind = LatticeKind::hypercubic;
  s.dim = 2;
  s.degree = 4;
  s.plane_edges = 4;
  s.c_lattice = 2.0;
  s.star_real = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  s.star_steps = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return s;
}

LatticeSpec LatticeSpec::triangular() {
  // Bravais basis a1 = (1,0), a2 = (1/2, sqrt(3)/2); star counterclockwise.
  LatticeSpec s;
  s.kind = LatticeKind::triangular;
  s.dim = 2;
  s.degree = 6;
  s.plane_edges = 6;
  s.c_lattice = 3.0;
  const double h = std::sqrt(3.0) / 2.0;
  s.star_real = {{1, 0}, {0.5, h}, {-0.5, h}, {-1, 0}, {-0.5, -h}, {0.5, -h}};
  s.star_steps = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  return s;
}

LatticeSpec LatticeSpec::hexagonal() {
  // Two sublattices. A-sites sit on the triangular Bravais lattice; the
  // B-site attached to base t is t + (a1+a2)/3. The A-star (listed here)
  // points to B-sites with bases t, t-a1, t-a2; the B-star is its negation.
  LatticeSpec s;
  s.kind = LatticeKind::hexagonal;
  s.dim = 2;
  s.degree = 3;
  s.plane_edges = 3;
  s.c_lattice = 1.5;
  const double c30 = std::sqrt(3.0) / 2.0;
  // Unit bond vectors at 30, 150, 270 degrees.
  s.star_real = {{c30, 0.5}, {-c30, 0.5}, {0, -1}};
  // Base offsets of the three B-neighbors of an A-site.
  s.star_steps = {{0, 0}, {-1, 0}, {0, -1}};
  return s;
}

LatticeSpec LatticeSpec::hypercubic(int d) {
  if (d < 1) throw ValidationError("dimension must be positive");
  if (d == 2) return z2();
  LatticeSpec s;
  s.kind = LatticeKind::hypercubic;
  s.dim = d;
  s.degree = 2 * d;
  s.plane_edges = 4;
  s.c_lattice = 2.0;
  return s;
}

LatticeSpec LatticeSpec::parse(const std::string& name) {
  if (name == "Z2" || name == "z2") return z2();
  if (name == "tri" || name == "T") return triangular();
  if (name == "hex" || name == "H") return hexagonal();
  throw ValidationError("unknown lattice '" + name + "' (expected Z2|tri|hex)");
}

std::string LatticeSpec::name() const {
  switch (kind) {
    case LatticeKind::hypercubic: return dim == 2 ? "Z2" : "Z" + std::to_string(dim);
    case LatticeKind::triangular: return "tri";
    case LatticeKind::hexagonal: return "hex";
  }
  return "?";
}

FiniteGraph::FiniteGraph(int n, std::vector<std::pair<int, int>> edges,
                         std::vector<int> boundary)
    : n_(n), boundary_flag_(n, false) {
  if (n <= 0) throw ValidationError("graph needs at least one vertex");
  adj_.resize(n);
  for (auto& [u, v] : edges) {
    if (u == v) throw ValidationError("self-loops are not allowed");
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw ValidationError("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw ValidationError("multi-edges are not allowed");
  edges_ = std::move(edges);
  for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
    auto [u, v] = edges_[i];
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    edge_index_[{u, v}] = i;
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());

  for (int b : boundary) {
    if (b < 0 || b >= n) throw ValidationError("boundary vertex out of range");
    boundary_flag_[b] = true;
  }
  for (int v = 0; v < n; ++v)
    (boundary_flag_[v] ? boundary_ : interior_).push_back(v);
  boundary_count_ = static_cast<int>(boundary_.size());
  if (interior_.empty()) throw ValidationError("graph has no interior vertices");

  // Connectivity of the whole undirected graph.
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj_[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  if (reached != n) throw ValidationError("graph is not connected");
}

FiniteGraph FiniteGraph::complete(int n) {
  if (n < 2) throw ValidationError("complete graph needs n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return FiniteGraph(n, std::move(e));
}

FiniteGraph FiniteGraph::cycle(int n) {
  if (n < 3) throw ValidationError("cycle needs n >= 3");
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
  return FiniteGraph(n, std::move(e));
}

FiniteGraph FiniteGraph::path(int n) {
  if (n < 2) throw ValidationError("path needs n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return FiniteGraph(n, std::move(e));
}

bool FiniteGraph::adjacent(VertexId u, VertexId v) const {
  check(u);
  check(v);
  if (u == v) return false;
  auto key = u < v ? std::pair{u, v} : std::pair{v, u};
  return edge_index_.count(key) > 0;
}

int FiniteGraph::edge_index(VertexId u, VertexId v) const {
  auto key = u < v ? std::pair{u, v} : std::pair{v, u};
  auto it = edge_index_.find(key);
  return it == edge_index_.end() ? -1 : it->second;
}

EdgeStar FiniteGraph::star(VertexId v) const {
  check(v);
  if (is_boundary(v))
    throw ValidationError(
        "vertex " + std::to_string(v) +
        " lies on the Dirichlet boundary; its edge star is truncated");
  EdgeStar s;
  s.center = v;
  if (lattice_ && coords_[v][2] >= 0) {
    // Natural lattice orientation: follow the star step order.
    const auto& spec = *lattice_;
    auto [cn, cm, sub] = coords_[v];
    for (int i = 0; i < spec.degree; ++i) {
      std::optional<VertexId> w;
      if (spec.kind == LatticeKind::hexagonal) {
        auto st = spec.star_steps[i];
        w = sub == 0 ? vertex_at(cn + st[0], cm + st[1], 1)
                     : vertex_at(cn - st[0], cm - st[1], 0);
      } else {
        auto st = spec.star_steps[i];
        w = vertex_at(cn + st[0], cm + st[1], 0);
      }
      if (!w) throw ValidationError("interior vertex with truncated lattice star");
      s.edges.push_back({v, *w});
    }
  } else {
    for (VertexId w : adj_[v]) s.edges.push_back({v, w});
  }
  return s;
}

const LatticeSpec& FiniteGraph::lattice() const {
  if (!lattice_) throw ValidationError("graph has no lattice metadata");
  return *lattice_;
}

std::array<int, 3> FiniteGraph::coords(VertexId v) const {
  check(v);
  if (!lattice_) throw ValidationError("graph has no lattice metadata");
  return coords_[v];
}

std::optional<VertexId> FiniteGraph::vertex_at(int n, int m, int sub) const {
  auto it = coord_index_.find({n, m, sub});
  if (it == coord_index_.end()) return std::nullopt;
  return it->second;
}

void FiniteGraph::attach_lattice(LatticeSpec spec,
                                 std::vector<std::array<int, 3>> coords) {
  if (static_cast<int>(coords.size()) != n_)
    throw ValidationError("coordinate table size mismatch");
  lattice_ = std::move(spec);
  coords_ = std::move(coords);
  coord_index_.clear();
  for (int v = 0; v < n_; ++v) coord_index_[coords_[v]] = v;
}

bool is_good_set(const FiniteGraph& g, std::span<const VertexId> vs) {
  for (size_t i = 0; i < vs.size(); ++i) {
    if (!g.has_vertex(vs[i])) throw ValidationError("vertex not in graph");
    for (size_t j = i + 1; j < vs.size(); ++j)
      if (g.adjacent(vs[i], vs[j])) return false;
  }
  return true;
}

namespace {

// Shared grid assembly: `inside` marks interior sites; neighbors of an
// interior site that fall outside become boundary vertices.
template <typename InsideFn, typename NeighborsFn>
FiniteGraph assemble_grid(const LatticeSpec& spec, InsideFn inside,
                          NeighborsFn neighbors_of,
                          const std::vector<std::array<int, 3>>& sites) {
  std::map<std::array<int, 3>, int> index;
  std::vector<std::array<int, 3>> coords;
  auto intern = [&](std::array<int, 3> c) {
    auto it = index.find(c);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(coords.size());
    index.emplace(c, id);
    coords.push_back(c);
    return id;
  };

  for (auto& c : sites)
    if (inside(c)) intern(c);
  if (coords.empty()) throw ValidationError("empty grid region");

  std::vector<std::pair<int, int>> edges;
  size_t interior_n = coords.size();
  for (size_t i = 0; i < interior_n; ++i) {
    auto c = coords[i];
    for (auto nb : neighbors_of(c)) {
      int j = intern(nb);  // creates boundary vertices on demand
      if (static_cast<size_t>(j) > i || static_cast<size_t>(j) >= interior_n)
        edges.emplace_back(static_cast<int>(i), j);
    }
  }
  std::vector<int> boundary;
  for (size_t v = interior_n; v < coords.size(); ++v)
    boundary.push_back(static_cast<int>(v));

  FiniteGraph g(static_cast<int>(coords.size()), std::move(edges), boundary);
  g.attach_lattice(spec, coords);
  return g;
}

}  // namespace

FiniteGraph build_grid(const LatticeSpec& lattice, int width, int height) {
  if (width <= 0 || height <= 0) throw ValidationError("empty grid region");
  std::vector<std::array<int, 3>> sites;
  auto in_box = [&](std::array<int, 3> c) {
    return c[0] >= 0 && c[0] < width && c[1] >= 0 && c[1] < height;
  };

  switch (lattice.kind) {
    case LatticeKind::hypercubic:
    case LatticeKind::triangular: {
      for (int n = 0; n < width; ++n)
        for (int m = 0; m < height; ++m) sites.push_back({n, m, 0});
      auto nbrs = [&](std::array<int, 3> c) {
        std::vector<std::array<int, 3>> out;
        for (auto st : lattice.star_steps)
          out.push_back({c[0] + st[0], c[1] + st[1], 0});
        return out;
      };
      return assemble_grid(lattice, in_box, nbrs, sites);
    }
    case LatticeKind::hexagonal: {
      for (int n = 0; n < width; ++n)
        for (int m = 0; m < height; ++m) {
          sites.push_back({n, m, 0});
          sites.push_back({n, m, 1});
        }
      auto in_box_any = [&](std::array<int, 3> c) { return in_box(c); };
      auto nbrs = [&](std::array<int, 3> c) {
        std::vector<std::array<int, 3>> out;
        for (auto st : lattice.star_steps) {
          if (c[2] == 0)
            out.push_back({c[0] + st[0], c[1] + st[1], 1});
          else
            out.push_back({c[0] - st[0], c[1] - st[1], 0});
        }
        return out;
      };
      return assemble_grid(lattice, in_box_any, nbrs, sites);
    }
  }
  throw ValidationError("unsupported lattice kind");
}

FiniteGraph build_box(const std::vector<int>& dims) {
  if (dims.empty()) throw ValidationError("empty grid region");
  for (int d : dims)
    if (d <= 0) throw ValidationError("empty grid region");
  int d = static_cast<int>(dims.size());
  if (d == 2) return build_grid(LatticeSpec::z2(), dims[0], dims[1]);

  // General d: flat index bookkeeping, no lattice metadata beyond d = 2.
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> coords;
  auto intern = [&](const std::vector<int>& c) {
    auto it = index.find(c);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(coords.size());
    index.emplace(c, id);
    coords.push_back(c);
    return id;
  };
  std::vector<int> c(d, 0);
  auto inside = [&](const std::vector<int>& x) {
    for (int i = 0; i < d; ++i)
      if (x[i] < 0 || x[i] >= dims[i]) return false;
    return true;
  };
  // enumerate the box
  while (true) {
    intern(c);
    int i = 0;
    while (i < d && ++c[i] == dims[i]) c[i++] = 0;
    if (i == d) break;
  }
  size_t interior_n = coords.size();
  std::vector<std::pair<int, int>> edges;
  for (size_t v = 0; v < interior_n; ++v) {
    auto base = coords[v];
    for (int i = 0; i < d; ++i)
      for (int s : {-1, 1}) {
        auto nb = base;
        nb[i] += s;
        if (inside(nb)) {
          int w = intern(nb);
          if (static_cast<size_t>(w) > v) edges.emplace_back((int)v, w);
        } else {
          int w = intern(nb);
          edges.emplace_back((int)v, w);
        }
      }
  }
  std::vector<int> boundary;
  for (size_t v = interior_n; v < coords.size(); ++v)
    boundary.push_back(static_cast<int>(v));
  return FiniteGraph(static_cast<int>(coords.size()), std::move(edges), boundary);
}

FiniteGraph build_disk_grid(double radius) {
  if (radius < 1.0) throw ValidationError("disk radius too small");
  int r = static_cast<int>(std::ceil(radius)) + 1;
  std::vector<std::array<int, 3>> sites;
  auto inside = [&](std::array<int, 3> c) {
    return std::hypot(double(c[0]), double(c[1])) < radius;
  };
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y)
      if (inside({x, y, 0})) sites.push_back({x, y, 0});
  auto spec = LatticeSpec::z2();
  auto nbrs = [&](std::array<int, 3> c) {
    std::vector<std::array<int, 3>> out;
    for (auto st : spec.star_steps) out.push_back({c[0] + st[0], c[1] + st[1], 0});
    return out;
  };
  return assemble_grid(spec, inside, nbrs, sites);
}

FiniteGraph graph_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.contains("lattice")) {
    auto spec = LatticeSpec::parse(j.at("lattice").get<std::string>());
    return build_grid(spec, j.at("width").get<int>(), j.at("height").get<int>());
  }
  std::vector<int> vertices = j.at("vertices").get<std::vector<int>>();
  std::vector<std::pair<int, int>> edges;
  for (auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  std::vector<int> boundary;
  if (j.contains("boundary")) boundary = j.at("boundary").get<std::vector<int>>();

  // Vertex ids may be arbitrary integers in the file; densify.
  std::map<int, int> remap;
  for (int v : vertices) remap.emplace(v, static_cast<int>(remap.size()));
  if (remap.size() != vertices.size())
    throw ValidationError("duplicate vertex ids in graph file");
  for (auto& [u, v] : edges) {
    if (!remap.count(u) || !remap.count(v))
      throw ValidationError("edge endpoint not listed in vertices");
    u = remap[u];
    v = remap[v];
  }
  for (auto& b : boundary) {
    if (!remap.count(b)) throw ValidationError("boundary vertex not listed");
    b = remap[b];
  }
  return FiniteGraph(static_cast<int>(vertices.size()), std::move(edges), boundary);
}

std::string graph_to_json(const FiniteGraph& g) {
  nlohmann::json j;
  std::vector<int> vs(g.vertex_count());
  std::iota(vs.begin(), vs.end(), 0);
  j["vertices"] = vs;
  auto& je = j["edges"] = nlohmann::json::array();
  for (auto& [u, v] : g.edges()) je.push_back({u, v});
  j["boundary"] = g.boundary();
  return j.dump();
}

FiniteGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace ustlab
