#include "ustlab/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "ustlab/transfer_current.hpp"

namespace ustlab {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * kGolden + 0x6A09E667F3BCC909ull))) {}

uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int CounterRng::next_below(int n) {
  return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                           static_cast<unsigned __int128>(n)) >> 64);
}

bool SpanningTree::contains(int edge_id) const {
  return std::binary_search(edge_ids.begin(), edge_ids.end(), edge_id);
}

int SpanningTree::degree_at(const FiniteGraph& g, VertexId v) const {
  int d = 0;
  for (int id : edge_ids) {
    auto [a, b] = g.edges()[id];
    if (a == v || b == v) ++d;
  }
  return d;
}

namespace {

// The wired view: all boundary vertices identified into one root node.
// Parallel edges are kept (they matter for both walks and tree counts).
struct WiredView {
  int nodes = 0;
  int root = 0;
  std::vector<int> node_of;                            // vertex -> node
  std::vector<std::vector<std::pair<int, int>>> adj;   // node -> (node, edge id)
  std::vector<std::array<int, 2>> edge_nodes;          // edge id -> node pair
};

WiredView make_wired(const FiniteGraph& g) {
  WiredView w;
  w.node_of.assign(g.vertex_count(), -1);
  if (g.has_boundary()) {
    int next = 0;
    for (VertexId v : g.interior()) w.node_of[v] = next++;
    w.nodes = next + 1;
    w.root = next;
    for (VertexId v : g.boundary()) w.node_of[v] = w.root;
  } else {
    w.nodes = g.vertex_count();
    w.root = 0;
    for (int v = 0; v < g.vertex_count(); ++v) w.node_of[v] = v;
  }
  w.adj.resize(w.nodes);
  w.edge_nodes.resize(g.edge_count());
  for (int id = 0; id < g.edge_count(); ++id) {
    auto [u, v] = g.edges()[id];
    int a = w.node_of[u], b = w.node_of[v];
    if (a == b)
      throw ValidationError("edge joining two boundary vertices is not supported");
    w.adj[a].push_back({b, id});
    w.adj[b].push_back({a, id});
    w.edge_nodes[id] = {a, b};
  }
  return w;
}

double matrix_tree_count(int nodes, int root,
                         const std::vector<std::array<int, 2>>& edges) {
  if (nodes <= 1) return 1.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(nodes, nodes);
  for (auto [a, b] : edges) {
    lap(a, a) += 1;
    lap(b, b) += 1;
    lap(a, b) -= 1;
    lap(b, a) -= 1;
  }
  int m = nodes - 1;
  Eigen::MatrixXd minor(m, m);
  for (int i = 0, r = 0; i < nodes; ++i) {
    if (i == root) continue;
    for (int j = 0, c = 0; j < nodes; ++j) {
      if (j == root) continue;
      minor(r, c++) = lap(i, j);
    }
    ++r;
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(minor).determinant();
}

struct MultiEdge {
  int a, b, id;
};

// Contraction-deletion enumeration; prunes branches whose tree count
// vanishes and terminates early when a single node remains.
void enumerate_rec(std::vector<MultiEdge> edges, int nodes,
                   std::vector<int>& chosen, std::vector<SpanningTree>& out) {
  if (nodes == 1) {
    SpanningTree t;
    t.edge_ids = chosen;
    std::sort(t.edge_ids.begin(), t.edge_ids.end());
    out.push_back(std::move(t));
    return;
  }
  if (edges.empty()) return;

  std::vector<std::array<int, 2>> plain;
  plain.reserve(edges.size());
  for (auto& e : edges) plain.push_back({e.a, e.b});
  double count = matrix_tree_count(nodes, 0, plain);
  if (count < 0.5) return;

  MultiEdge e = edges.front();

  // Contract e: merge b into a, compact labels, drop the resulting loops.
  {
    std::vector<MultiEdge> contracted;
    contracted.reserve(edges.size());
    auto relabel = [&](int x) {
      if (x == e.b) x = e.a;
      return x > e.b ? x - 1 : x;
    };
    for (size_t i = 1; i < edges.size(); ++i) {
      int a = relabel(edges[i].a), b = relabel(edges[i].b);
      if (a != b) contracted.push_back({a, b, edges[i].id});
    }
    chosen.push_back(e.id);
    enumerate_rec(std::move(contracted), nodes - 1, chosen, out);
    chosen.pop_back();
  }

  // Delete e.
  edges.erase(edges.begin());
  enumerate_rec(std::move(edges), nodes, chosen, out);
}

}  // namespace

double spanning_tree_count(const FiniteGraph& g) {
  WiredView w = make_wired(g);
  return matrix_tree_count(w.nodes, w.root, w.edge_nodes);
}

std::vector<SpanningTree> enumerate_trees(const FiniteGraph& g, double limit) {
  double count = spanning_tree_count(g);
  if (count > limit)
    throw GuardError("spanning tree count " + std::to_string(count) +
                     " exceeds the enumeration guard");
  WiredView w = make_wired(g);
  std::vector<MultiEdge> edges;
  for (int id = 0; id < g.edge_count(); ++id)
    edges.push_back({w.edge_nodes[id][0], w.edge_nodes[id][1], id});
  std::vector<SpanningTree> out;
  out.reserve(static_cast<size_t>(count) + 1);
  std::vector<int> chosen;
  enumerate_rec(std::move(edges), w.nodes, chosen, out);
  if (std::llround(count) != static_cast<long long>(out.size()))
    throw std::logic_error("tree enumeration disagrees with the matrix-tree count");
  return out;
}

SpanningTree wilson_sample(const FiniteGraph& g, uint64_t seed, uint64_t stream) {
  WiredView w = make_wired(g);
  CounterRng rng(seed, stream);

  std::vector<char> in_tree(w.nodes, 0);
  std::vector<int> next_edge(w.nodes, -1);
  std::vector<int> next_node(w.nodes, -1);
  in_tree[w.root] = 1;

  SpanningTree tree;
  for (int start = 0; start < w.nodes; ++start) {
    if (in_tree[start]) continue;
    // Random walk with loop erasure via the successor arrays.
    int u = start;
    while (!in_tree[u]) {
      auto [v, id] = w.adj[u][rng.next_below(static_cast<int>(w.adj[u].size()))];
      next_node[u] = v;
      next_edge[u] = id;
      u = v;
    }
    for (int x = start; !in_tree[x]; x = next_node[x]) {
      in_tree[x] = 1;
      tree.edge_ids.push_back(next_edge[x]);
    }
  }
  std::sort(tree.edge_ids.begin(), tree.edge_ids.end());
  return tree;
}

SampleStats mc_estimate(const FiniteGraph& g,
                        const std::function<bool(const SpanningTree&)>& event,
                        long long samples, uint64_t seed, int threads) {
  if (samples < 1) throw ValidationError("sample count must be positive");
  threads = std::max(1, threads);
  std::atomic<long long> hits{0};
  auto worker = [&](long long lo, long long hi) {
    long long h = 0;
    for (long long i = lo; i < hi; ++i)
      if (event(wilson_sample(g, seed, static_cast<uint64_t>(i)))) ++h;
    hits += h;
  };
  if (threads == 1) {
    worker(0, samples);
  } else {
    std::vector<std::thread> pool;
    long long chunk = (samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      long long lo = t * chunk, hi = std::min<long long>(samples, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  SampleStats s;
  s.samples = samples;
  s.hits = hits.load();
  s.estimate = static_cast<double>(s.hits) / static_cast<double>(samples);
  s.std_error = std::sqrt(s.estimate * (1 - s.estimate) / static_cast<double>(samples));
  return s;
}

namespace {

std::vector<int> edge_ids_of(const FiniteGraph& g,
                             const std::vector<DirectedEdge>& es) {
  std::vector<int> ids;
  for (auto& e : es) {
    int id = g.edge_index(e.tail, e.tip);
    if (id < 0) throw ValidationError("query edge not in graph");
    ids.push_back(id);
  }
  return ids;
}

std::function<bool(const SpanningTree&)> degree_event(const FiniteGraph& g,
                                                      const DegreeQuery& q) {
  if (q.vertices.size() != q.degrees.size())
    throw ValidationError("degree query needs one target per vertex");
  return [&g, q](const SpanningTree& t) {
    for (size_t i = 0; i < q.vertices.size(); ++i)
      if (t.degree_at(g, q.vertices[i]) != q.degrees[i]) return false;
    return true;
  };
}

}  // namespace

SampleStats mc_edge_probability(const FiniteGraph& g,
                                const std::vector<DirectedEdge>& required,
                                const std::vector<DirectedEdge>& forbidden,
                                long long samples, uint64_t seed, int threads) {
  auto req = edge_ids_of(g, required);
  auto forb = edge_ids_of(g, forbidden);
  auto event = [req, forb](const SpanningTree& t) {
    for (int id : req)
      if (!t.contains(id)) return false;
    for (int id : forb)
      if (t.contains(id)) return false;
    return true;
  };
  return mc_estimate(g, event, samples, seed, threads);
}

SampleStats mc_degree_probability(const FiniteGraph& g, const DegreeQuery& q,
                                  long long samples, uint64_t seed, int threads) {
  return mc_estimate(g, degree_event(g, q), samples, seed, threads);
}

double brute_edge_probability(const FiniteGraph& g,
                              const std::vector<DirectedEdge>& required,
                              const std::vector<DirectedEdge>& forbidden) {
  auto req = edge_ids_of(g, required);
  auto forb = edge_ids_of(g, forbidden);
  auto trees = enumerate_trees(g);
  long long hits = 0;
  for (auto& t : trees) {
    bool ok = true;
    for (int id : req) ok = ok && t.contains(id);
    for (int id : forb) ok = ok && !t.contains(id);
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(trees.size());
}

double brute_degree_probability(const FiniteGraph& g, const DegreeQuery& q) {
  auto trees = enumerate_trees(g);
  auto event = degree_event(g, q);
  long long hits = 0;
  for (auto& t : trees) hits += event(t);
  return static_cast<double>(hits) / static_cast<double>(trees.size());
}

double brute_degree_probability_with_edge(const FiniteGraph& g,
                                          const DegreeQuery& q, VertexId v,
                                          VertexId w, bool edge_in_tree) {
  int id = g.edge_index(v, w);
  if (id < 0) throw ValidationError("vertices are not adjacent");
  auto trees = enumerate_trees(g);
  auto event = degree_event(g, q);
  long long hits = 0;
  for (auto& t : trees)
    if (t.contains(id) == edge_in_tree && event(t)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(trees.size());
}

}  // namespace ustlab
