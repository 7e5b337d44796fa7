#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qwalk/common.hpp"

namespace qwalk {

/// Undirected graph whose directed edges (plus padding self-loops) are
/// decomposed into d label permutations, enabling a unitary shift operator.
struct LabeledGraph {
  int n = 0;  ///< vertex count
  int d = 0;  ///< label count (= regular degree of the padded graph)
  /// sigma[a][v] is the vertex reached from v along label a; each sigma[a]
  /// is a permutation of {0..n-1}.
  std::vector<std::vector<int>> sigma;
  /// True-neighbor lists (sorted, no self-loops); symmetric.
  std::vector<std::vector<int>> adj;
  /// Set by the symmetric constructors (cycle, cayley_abelian); allows
  /// initial-state sweeps to restrict to one vertex orbit.
  bool vertex_transitive = false;

  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  bool adjacent(int u, int v) const;
  long edge_count() const;  ///< number of undirected true edges |E|
  bool connected() const;

  /// Throws std::invalid_argument if any structural invariant fails:
  /// each sigma[a] a bijection, sigma respects adjacency-or-self-loop,
  /// adjacency symmetric, and every directed edge covered by some label.
  void validate() const;
};

/// Vertex subset together with its outer boundary and cut edge count.
struct Cut {
  std::vector<int> X;         ///< sorted vertex subset
  std::vector<int> boundary;  ///< B_X: vertices of the complement adjacent to X
  long cut_edges = 0;         ///< |E(X : complement)|
};

Cut make_cut(const LabeledGraph& g, const std::vector<int>& X);

/// Collection of candidate cuts for the conductance/boundary minimizations.
struct CutFamily {
  std::vector<std::vector<int>> sets;  ///< each sorted, nonempty, proper
  bool exhaustive = false;
  std::string description;
};

/// Largest n for which all 2^n - 2 proper nonempty subsets are enumerated.
inline constexpr int kExhaustiveCutLimit = 14;

/// All proper nonempty subsets of {0..n-1}; requires n <= kExhaustiveCutLimit.
CutFamily exhaustive_cuts(int n);

/// Exhaustive for n <= kExhaustiveCutLimit, otherwise singletons + contiguous
/// arcs (under the vertex ordering) + the supplied extra cuts.
CutFamily default_cut_family(const LabeledGraph& g,
                             const std::vector<std::vector<int>>& extra = {});

// ---- Constructors ----------------------------------------------------------

/// n-cycle with label 0 the forward rotation v -> v+1 (mod n) and label 1
/// the backward rotation v -> v-1 (mod n). Requires n >= 3.
LabeledGraph cycle(int n);

/// Cayley graph of Z_{orders[0]} x ... x Z_{orders[m-1]} with one label per
/// generator (label a maps v to v + generators[a]). The generator multiset
/// must be inverse-closed so that the graph is undirected; generators must
/// be nonzero.
LabeledGraph cayley_abelian(const std::vector<int>& orders,
                            const std::vector<std::vector<int>>& generators);

/// Pads an arbitrary connected undirected graph (given as neighbor lists)
/// with self-loops up to d = max degree and decomposes the directed edge
/// multiset into d permutations via repeated bipartite matching
/// (deterministic: augmenting paths scan vertices in increasing order).
LabeledGraph pad_regular(const std::vector<std::vector<int>>& adjacency);

/// Adjacency lists of two complete graphs K_m joined by a single edge
/// between vertex 0 (of the first clique) and vertex m (of the second).
std::vector<std::vector<int>> bridged_cliques_adjacency(int m);

// ---- Conductance and boundary ----------------------------------------------

struct ConductanceResult {
  double value = 0.0;
  Cut argmin;  ///< lexicographically smallest minimizing subset
};

/// Phi = min over cuts with capacity C_X <= 1/2 of F_X / C_X for the simple
/// classical walk (self-loops excluded). Throws if g is disconnected or the
/// family contains no admissible cut.
ConductanceResult conductance(const LabeledGraph& g, const CutFamily& family);

/// Phi' = min over cuts with 0 < |X| <= n/2 of |B_X| / |X|.
ConductanceResult boundary_phi_prime(const LabeledGraph& g,
                                     const CutFamily& family);

struct PhiComparisonReport {
  double phi = 0.0;
  double phi_prime = 0.0;
  int d = 0;
  double slack = 0.0;  ///< d*phi - phi_prime
  bool holds = false;  ///< phi_prime <= d*phi (+ slack tolerance)
};

/// Checks phi_prime <= d * phi over the exhaustive cut family.
PhiComparisonReport phi_prime_vs_phi_check(const LabeledGraph& g);

// ---- Text format -------------------------------------------------------------

/// Text format: line 1 "n d"; next d lines: sigma_a as n space-separated
/// integers; any remaining lines must be blank or start with '#'.
LabeledGraph read_graph(std::istream& in);
LabeledGraph read_graph_file(const std::string& path);
void write_graph(const LabeledGraph& g, std::ostream& out);
std::string graph_to_string(const LabeledGraph& g);

}  // namespace qwalk
