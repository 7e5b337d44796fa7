#include "qwalk/graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace qwalk {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Builds sorted true-neighbor lists from the label permutations.
std::vector<std::vector<int>> adjacency_from_sigma(
    int n, const std::vector<std::vector<int>>& sigma) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& perm : sigma) {
    for (int v = 0; v < n; ++v) {
      int u = perm[v];
      if (u == v) continue;  // padding self-loop
      adj[v].push_back(u);
      adj[u].push_back(v);
    }
  }
  for (auto& nb : adj) nb = sorted_unique(std::move(nb));
  return adj;
}

}  // namespace

bool LabeledGraph::adjacent(int u, int v) const {
  const auto& nb = adj[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

long LabeledGraph::edge_count() const {
  long twice = 0;
  for (const auto& nb : adj) twice += static_cast<long>(nb.size());
  return twice / 2;
}

bool LabeledGraph::connected() const {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int u : adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == n;
}

void LabeledGraph::validate() const {
  require(n >= 1, "graph: n must be positive");
  require(d >= 1, "graph: d must be positive");
  require(static_cast<int>(sigma.size()) == d, "graph: sigma size != d");
  for (const auto& perm : sigma) {
    require(static_cast<int>(perm.size()) == n, "graph: permutation size != n");
    std::vector<char> hit(n, 0);
    for (int v = 0; v < n; ++v) {
      require(perm[v] >= 0 && perm[v] < n, "graph: permutation out of range");
      require(!hit[perm[v]], "graph: label map is not a bijection");
      hit[perm[v]] = 1;
      require(perm[v] == v || adjacent(v, perm[v]),
              "graph: label map leaves the edge set");
    }
  }
  // Adjacency symmetry.
  for (int v = 0; v < n; ++v) {
    for (int u : adj[v]) {
      require(u >= 0 && u < n && u != v, "graph: bad neighbor entry");
      require(adjacent(u, v), "graph: adjacency not symmetric");
    }
  }
  // Every directed edge must be covered by at least one label.
  for (int v = 0; v < n; ++v) {
    for (int u : adj[v]) {
      bool covered = false;
      for (const auto& perm : sigma) {
        if (perm[v] == u) {
          covered = true;
          break;
        }
      }
      require(covered, "graph: directed edge not covered by any label");
    }
  }
}

Cut make_cut(const LabeledGraph& g, const std::vector<int>& X) {
  Cut cut;
  cut.X = sorted_unique(X);
  require(!cut.X.empty() && static_cast<int>(cut.X.size()) < g.n,
          "cut: X must be a proper nonempty subset");
  std::vector<char> in_x(g.n, 0);
  for (int v : cut.X) {
    require(v >= 0 && v < g.n, "cut: vertex out of range");
    in_x[v] = 1;
  }
  for (int v = 0; v < g.n; ++v) {
    if (in_x[v]) continue;
    bool touches = false;
    for (int u : g.adj[v]) {
      if (in_x[u]) {
        touches = true;
        ++cut.cut_edges;
      }
    }
    if (touches) cut.boundary.push_back(v);
  }
  return cut;
}

CutFamily exhaustive_cuts(int n) {
  require(n >= 2 && n <= kExhaustiveCutLimit,
          "exhaustive_cuts: n out of range for exhaustive enumeration");
  CutFamily family;
  family.exhaustive = true;
  family.description = "exhaustive";
  family.sets.reserve((1u << n) - 2);
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> set;
    for (int v = 0; v < n; ++v) {
      if (mask & (1u << v)) set.push_back(v);
    }
    family.sets.push_back(std::move(set));
  }
  return family;
}

CutFamily default_cut_family(const LabeledGraph& g,
                             const std::vector<std::vector<int>>& extra) {
  if (g.n <= kExhaustiveCutLimit) {
    CutFamily family = exhaustive_cuts(g.n);
    for (const auto& set : extra) family.sets.push_back(sorted_unique(set));
    return family;
  }
  CutFamily family;
  family.exhaustive = false;
  family.description = "singletons+arcs+user";
  for (int v = 0; v < g.n; ++v) family.sets.push_back({v});
  for (int len = 2; len < g.n; ++len) {
    for (int first = 0; first < g.n; ++first) {
      std::vector<int> arc(len);
      for (int i = 0; i < len; ++i) arc[i] = (first + i) % g.n;
      family.sets.push_back(sorted_unique(std::move(arc)));
    }
  }
  for (const auto& set : extra) family.sets.push_back(sorted_unique(set));
  return family;
}

LabeledGraph cycle(int n) {
  require(n >= 3, "cycle: n must be >= 3");
  LabeledGraph g;
  g.n = n;
  g.d = 2;
  g.sigma.assign(2, std::vector<int>(n));
  for (int v = 0; v < n; ++v) {
    g.sigma[0][v] = (v + 1) % n;      // forward
    g.sigma[1][v] = (v + n - 1) % n;  // backward
  }
  g.adj = adjacency_from_sigma(n, g.sigma);
  g.vertex_transitive = true;
  g.validate();
  return g;
}

LabeledGraph cayley_abelian(const std::vector<int>& orders,
                            const std::vector<std::vector<int>>& generators) {
  require(!orders.empty(), "cayley: no group orders");
  for (int m : orders) require(m >= 2, "cayley: each order must be >= 2");
  require(!generators.empty(), "cayley: no generators");
  const int rank = static_cast<int>(orders.size());

  auto normalize = [&](const std::vector<int>& gvec) {
    require(static_cast<int>(gvec.size()) == rank,
            "cayley: generator rank mismatch");
    std::vector<int> out(rank);
    for (int i = 0; i < rank; ++i) {
      out[i] = ((gvec[i] % orders[i]) + orders[i]) % orders[i];
    }
    return out;
  };
  auto negate = [&](const std::vector<int>& gvec) {
    std::vector<int> out(rank);
    for (int i = 0; i < rank; ++i) out[i] = (orders[i] - gvec[i]) % orders[i];
    return out;
  };

  std::vector<std::vector<int>> gens;
  gens.reserve(generators.size());
  for (const auto& gvec : generators) {
    auto norm = normalize(gvec);
    require(std::any_of(norm.begin(), norm.end(), [](int x) { return x != 0; }),
            "cayley: zero generator");
    gens.push_back(std::move(norm));
  }
  // Inverse closure as a multiset property.
  {
    auto sorted = gens;
    std::sort(sorted.begin(), sorted.end());
    auto inverses = gens;
    for (auto& gvec : inverses) gvec = negate(gvec);
    std::sort(inverses.begin(), inverses.end());
    require(sorted == inverses, "cayley: generator set is not inverse-closed");
  }

  long n_long = 1;
  for (int m : orders) n_long *= m;
  require(n_long <= 1 << 20, "cayley: group too large");
  const int n = static_cast<int>(n_long);

  // Row-major mixed-radix encoding of group elements.
  auto encode = [&](const std::vector<int>& coords) {
    int idx = 0;
    for (int i = 0; i < rank; ++i) idx = idx * orders[i] + coords[i];
    return idx;
  };
  auto decode = [&](int idx) {
    std::vector<int> coords(rank);
    for (int i = rank - 1; i >= 0; --i) {
      coords[i] = idx % orders[i];
      idx /= orders[i];
    }
    return coords;
  };

  LabeledGraph g;
  g.n = n;
  g.d = static_cast<int>(gens.size());
  g.sigma.assign(g.d, std::vector<int>(n));
  for (int a = 0; a < g.d; ++a) {
    for (int v = 0; v < n; ++v) {
      auto coords = decode(v);
      for (int i = 0; i < rank; ++i) {
        coords[i] = (coords[i] + gens[a][i]) % orders[i];
      }
      g.sigma[a][v] = encode(coords);
    }
  }
  g.adj = adjacency_from_sigma(n, g.sigma);
  g.vertex_transitive = true;
  g.validate();
  return g;
}

LabeledGraph pad_regular(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  require(n >= 2, "pad_regular: need at least 2 vertices");
  std::vector<std::vector<int>> adj(n);
  for (int v = 0; v < n; ++v) {
    adj[v] = sorted_unique(adjacency[v]);
    for (int u : adj[v]) {
      require(u >= 0 && u < n && u != v, "pad_regular: bad neighbor entry");
    }
  }
  for (int v = 0; v < n; ++v) {
    for (int u : adj[v]) {
      require(std::binary_search(adj[u].begin(), adj[u].end(), v),
              "pad_regular: adjacency not symmetric");
    }
  }

  int d = 0;
  for (const auto& nb : adj) d = std::max(d, static_cast<int>(nb.size()));
  require(d >= 1, "pad_regular: empty graph");

  // Remaining multiplicity of each directed edge: every true edge once each
  // way, plus d - deg(v) self-loops at v. Row sums and column sums all equal
  // d, so a perfect matching exists in every round (Hall's condition for
  // regular bipartite multigraphs).
  std::vector<std::vector<int>> avail(n, std::vector<int>(n, 0));
  for (int v = 0; v < n; ++v) {
    for (int u : adj[v]) avail[v][u] = 1;
    avail[v][v] = d - static_cast<int>(adj[v].size());
  }

  std::vector<std::vector<int>> perms;
  for (int round = 0; round < d; ++round) {
    std::vector<int> match_l(n, -1), match_r(n, -1);
    std::function<bool(int, std::vector<char>&)> try_kuhn =
        [&](int u, std::vector<char>& seen) {
          for (int v = 0; v < n; ++v) {
            if (avail[u][v] > 0 && !seen[v]) {
              seen[v] = 1;
              if (match_r[v] == -1 || try_kuhn(match_r[v], seen)) {
                match_l[u] = v;
                match_r[v] = u;
                return true;
              }
            }
          }
          return false;
        };
    for (int u = 0; u < n; ++u) {
      std::vector<char> seen(n, 0);
      if (!try_kuhn(u, seen)) {
        throw std::runtime_error("pad_regular: permutation decomposition failed");
      }
    }
    for (int u = 0; u < n; ++u) avail[u][match_l[u]] -= 1;
    perms.push_back(std::move(match_l));
  }

  LabeledGraph g;
  g.n = n;
  g.d = d;
  g.sigma = std::move(perms);
  g.adj = std::move(adj);
  g.vertex_transitive = false;
  g.validate();
  require(g.connected(), "pad_regular: graph must be connected");
  return g;
}

std::vector<std::vector<int>> bridged_cliques_adjacency(int m) {
  require(m >= 2, "bridged_cliques: m must be >= 2");
  const int n = 2 * m;
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      adj[i].push_back(j);
      adj[m + i].push_back(m + j);
    }
  }
  adj[0].push_back(m);
  adj[m].push_back(0);
  return adj;
}

namespace {

struct CutObjective {
  double value;
  std::vector<int> set;
};

// Shared minimization over a family: `score` returns the objective or a
// negative value when the cut is inadmissible. Ties resolve to the
// lexicographically smallest subset.
ConductanceResult minimize_over_family(
    const LabeledGraph& g, const CutFamily& family,
    const std::function<double(const std::vector<int>&)>& score,
    const char* label) {
  require(!family.sets.empty(), std::string(label) + ": empty cut family");
  bool found = false;
  double best = 0.0;
  std::vector<int> best_set;
  for (const auto& set : family.sets) {
    double val = score(set);
    if (val < 0) continue;  // inadmissible under this objective's constraint
    if (!found || val < best - 1e-15 ||
        (std::abs(val - best) <= 1e-15 && set < best_set)) {
      found = true;
      best = val;
      best_set = set;
    }
  }
  require(found, std::string(label) + ": no admissible cut in the family");
  ConductanceResult result;
  result.value = best;
  result.argmin = make_cut(g, best_set);
  return result;
}

}  // namespace

ConductanceResult conductance(const LabeledGraph& g, const CutFamily& family) {
  require(g.connected(), "conductance: graph must be connected");
  const double two_e = 2.0 * static_cast<double>(g.edge_count());
  auto score = [&](const std::vector<int>& set) -> double {
    std::vector<char> in_x(g.n, 0);
    long deg_sum = 0;
    for (int v : set) {
      in_x[v] = 1;
      deg_sum += g.degree(v);
    }
    double capacity = static_cast<double>(deg_sum) / two_e;
    if (capacity > 0.5 + 1e-15) return -1.0;
    // F_X = sum over cut edges of pi_u * p_{u,v} = |E(X:X^c)| / 2|E|.
    long cut_edges = 0;
    for (int v : set) {
      for (int u : g.adj[v]) {
        if (!in_x[u]) ++cut_edges;
      }
    }
    double flow = static_cast<double>(cut_edges) / two_e;
    return flow / capacity;
  };
  return minimize_over_family(g, family, score, "conductance");
}

ConductanceResult boundary_phi_prime(const LabeledGraph& g,
                                     const CutFamily& family) {
  require(g.connected(), "boundary_phi_prime: graph must be connected");
  auto score = [&](const std::vector<int>& set) -> double {
    if (2 * static_cast<int>(set.size()) > g.n) return -1.0;
    std::vector<char> in_x(g.n, 0);
    for (int v : set) in_x[v] = 1;
    long boundary = 0;
    for (int v = 0; v < g.n; ++v) {
      if (in_x[v]) continue;
      for (int u : g.adj[v]) {
        if (in_x[u]) {
          ++boundary;
          break;
        }
      }
    }
    return static_cast<double>(boundary) / static_cast<double>(set.size());
  };
  return minimize_over_family(g, family, score, "boundary_phi_prime");
}

PhiComparisonReport phi_prime_vs_phi_check(const LabeledGraph& g) {
  CutFamily family = default_cut_family(g);
  PhiComparisonReport report;
  report.phi = conductance(g, family).value;
  report.phi_prime = boundary_phi_prime(g, family).value;
  report.d = g.d;
  report.slack = report.d * report.phi - report.phi_prime;
  report.holds = report.phi_prime <= report.d * report.phi + kIneqSlack;
  return report;
}

// ---- Text format ---------------------------------------------------------------

LabeledGraph read_graph(std::istream& in) {
  std::string line;
  long line_no = 0;
  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return;
    }
    throw std::invalid_argument(std::string("graph file: unexpected end of file, expected ") +
                                what + " after line " + std::to_string(line_no));
  };

  next_line("header 'n d'");
  int n = 0, d = 0;
  {
    std::istringstream header(line);
    if (!(header >> n >> d) || n < 1 || d < 1) {
      throw std::invalid_argument("graph file: malformed header at line " +
                                  std::to_string(line_no));
    }
    std::string tail;
    if (header >> tail) {
      throw std::invalid_argument("graph file: trailing tokens in header at line " +
                                  std::to_string(line_no));
    }
  }

  LabeledGraph g;
  g.n = n;
  g.d = d;
  g.sigma.assign(d, std::vector<int>(n));
  for (int a = 0; a < d; ++a) {
    next_line("permutation row");
    std::istringstream row(line);
    for (int v = 0; v < n; ++v) {
      if (!(row >> g.sigma[a][v])) {
        throw std::invalid_argument("graph file: malformed permutation at line " +
                                    std::to_string(line_no));
      }
      if (g.sigma[a][v] < 0 || g.sigma[a][v] >= n) {
        throw std::invalid_argument("graph file: vertex index out of range at line " +
                                    std::to_string(line_no));
      }
    }
    std::string tail;
    if (row >> tail) {
      throw std::invalid_argument("graph file: trailing tokens at line " +
                                  std::to_string(line_no));
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    throw std::invalid_argument("graph file: unexpected content at line " +
                                std::to_string(line_no) + " (comments must start with '#')");
  }

  g.adj = adjacency_from_sigma(n, g.sigma);
  g.validate();
  return g;
}

LabeledGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  return read_graph(in);
}

void write_graph(const LabeledGraph& g, std::ostream& out) {
  out << g.n << ' ' << g.d << '\n';
  for (const auto& perm : g.sigma) {
    for (int v = 0; v < g.n; ++v) {
      if (v) out << ' ';
      out << perm[v];
    }
    out << '\n';
  }
}

std::string graph_to_string(const LabeledGraph& g) {
  std::ostringstream out;
  write_graph(g, out);
  return out.str();
}

}  // namespace qwalk
