#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ustlab/graph.hpp"

namespace ustlab {

/// Counter-based generator: output i of a stream is mix(key + i) with a
/// key derived from (seed, stream). Streams are independent and the
/// sequence is reproducible regardless of thread count.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream = 0);
  uint64_t next_u64();
  double next_unit();              // in [0,1)
  int next_below(int n);           // uniform in {0,...,n-1}

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

/// A spanning tree of the (possibly wired) graph, stored as sorted
/// indices into FiniteGraph::edges(). On graphs with a Dirichlet
/// boundary the tree spans the wired graph in which all boundary
/// vertices are identified; edges between two boundary vertices never
/// occur (the graph builders do not create them).
struct SpanningTree {
  std::vector<int> edge_ids;
  bool contains(int edge_id) const;
  /// Tree degree at a vertex: incident tree edges.
  int degree_at(const FiniteGraph& g, VertexId v) const;
};

/// Number of spanning trees of the wired graph (matrix-tree determinant).
double spanning_tree_count(const FiniteGraph& g);

/// Every spanning tree exactly once, by contraction-deletion with
/// matrix-tree pruning. Guarded: refuses when the count exceeds `limit`.
std::vector<SpanningTree> enumerate_trees(const FiniteGraph& g,
                                          double limit = 1e6);

/// Wilson's algorithm: loop-erased random walks onto the growing tree.
/// Root: the wired boundary when present, else the lowest vertex id.
SpanningTree wilson_sample(const FiniteGraph& g, uint64_t seed,
                           uint64_t stream = 0);

struct DegreeQuery {
  std::vector<VertexId> vertices;
  std::vector<int> degrees;
};

struct SampleStats {
  long long samples = 0;
  long long hits = 0;
  double estimate = 0;
  double std_error = 0;  // sqrt(p(1-p)/N) with p the estimate
};

struct EdgeProbQuery;  // from transfer_current.hpp

/// Empirical frequency of a tree event under `samples` Wilson draws.
SampleStats mc_estimate(const FiniteGraph& g,
                        const std::function<bool(const SpanningTree&)>& event,
                        long long samples, uint64_t seed, int threads = 1);

SampleStats mc_edge_probability(const FiniteGraph& g,
                                const std::vector<DirectedEdge>& required,
                                const std::vector<DirectedEdge>& forbidden,
                                long long samples, uint64_t seed,
                                int threads = 1);

SampleStats mc_degree_probability(const FiniteGraph& g, const DegreeQuery& q,
                                  long long samples, uint64_t seed,
                                  int threads = 1);

// Brute-force oracles over the enumerated tree list.
double brute_edge_probability(const FiniteGraph& g,
                              const std::vector<DirectedEdge>& required,
                              const std::vector<DirectedEdge>& forbidden);
double brute_degree_probability(const FiniteGraph& g, const DegreeQuery& q);
/// Joint degree event with the shared edge {v,w} forced in or out.
double brute_degree_probability_with_edge(const FiniteGraph& g,
                                          const DegreeQuery& q, VertexId v,
                                          VertexId w, bool edge_in_tree);

}  // namespace ustlab
