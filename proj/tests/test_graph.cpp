#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "qwalk/graph.hpp"

using namespace qwalk;

TEST_CASE("cycle structure and labeling") {
  LabeledGraph g = cycle(5);
  CHECK(g.n == 5);
  CHECK(g.d == 2);
  CHECK(g.vertex_transitive);
  CHECK(g.connected());
  CHECK(g.edge_count() == 5);
  for (int v = 0; v < 5; ++v) {
    CHECK(g.degree(v) == 2);
    CHECK(g.sigma[0][v] == (v + 1) % 5);
    CHECK(g.sigma[1][v] == (v + 4) % 5);
    CHECK(g.adjacent(v, (v + 1) % 5));
    CHECK(!g.adjacent(v, (v + 2) % 5));
  }
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS_AS(cycle(2), std::invalid_argument);
}

TEST_CASE("abelian Cayley constructor reproduces the cycle") {
  LabeledGraph c = cycle(7);
  LabeledGraph k = cayley_abelian({7}, {{1}, {6}});
  REQUIRE(k.n == 7);
  REQUIRE(k.d == 2);
  CHECK(k.vertex_transitive);
  CHECK(k.sigma == c.sigma);
  CHECK(k.adj == c.adj);
}

TEST_CASE("complete graph as a Cayley graph") {
  LabeledGraph k5 = cayley_abelian({5}, {{1}, {2}, {3}, {4}});
  CHECK(k5.n == 5);
  CHECK(k5.d == 4);
  CHECK(k5.edge_count() == 10);
  for (int a = 0; a < 4; ++a) {
    for (int v = 0; v < 5; ++v) CHECK(k5.sigma[a][v] == (v + a + 1) % 5);
  }
  // Generators must close under inverse for the labeling to be unitary.
  CHECK_THROWS_AS(cayley_abelian({5}, {{1}}), std::invalid_argument);
}

TEST_CASE("two-bit hypercube is a four-cycle in disguise") {
  LabeledGraph h = cayley_abelian({2, 2}, {{1, 0}, {0, 1}});
  CHECK(h.n == 4);
  CHECK(h.d == 2);
  CHECK(h.edge_count() == 4);
  for (int v = 0; v < 4; ++v) CHECK(h.degree(v) == 2);
}

TEST_CASE("padding an irregular graph with self-loops") {
  // Path 0-1-2: degrees 1, 2, 1 pad up to d = 2.
  LabeledGraph g = pad_regular({{1}, {0, 2}, {1}});
  CHECK(g.n == 3);
  CHECK(g.d == 2);
  CHECK(g.edge_count() == 2);  // true edges only
  CHECK(g.degree(0) == 1);     // true degree, loops excluded
  CHECK_NOTHROW(g.validate());
  int loops = 0;
  for (int a = 0; a < g.d; ++a) {
    for (int v = 0; v < g.n; ++v) {
      if (g.sigma[a][v] == v) ++loops;
    }
  }
  CHECK(loops > 0);
}

TEST_CASE("bridged-clique graphs have the frozen labelings") {
  LabeledGraph g3 = pad_regular(bridged_cliques_adjacency(3));
  REQUIRE(g3.n == 6);
  REQUIRE(g3.d == 3);
  CHECK(!g3.vertex_transitive);
  CHECK(g3.sigma == std::vector<std::vector<int>>{
                        {1, 2, 0, 5, 4, 3}, {3, 1, 2, 0, 5, 4}, {2, 0, 1, 4, 3, 5}});

  LabeledGraph g4 = pad_regular(bridged_cliques_adjacency(4));
  REQUIRE(g4.n == 8);
  REQUIRE(g4.d == 4);
  CHECK(g4.sigma == std::vector<std::vector<int>>{{1, 3, 2, 0, 7, 6, 5, 4},
                                                  {2, 0, 3, 1, 6, 4, 7, 5},
                                                  {3, 1, 0, 2, 5, 7, 4, 6},
                                                  {4, 2, 1, 3, 0, 5, 6, 7}});
  CHECK(g4.edge_count() == 13);  // two K4s plus one bridge
}

TEST_CASE("cut construction") {
  LabeledGraph g = cycle(9);
  Cut cut = make_cut(g, {0, 1, 2, 3});
  CHECK(cut.X == std::vector<int>{0, 1, 2, 3});
  CHECK(cut.boundary == std::vector<int>{4, 8});
  CHECK(cut.cut_edges == 2);
  CHECK_THROWS_AS(make_cut(g, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_cut(g, {0, 9}), std::invalid_argument);
}

TEST_CASE("exhaustive cut family enumerates every proper nonempty subset") {
  CutFamily fam = exhaustive_cuts(3);
  CHECK(fam.sets.size() == 6);  // 2^3 - 2 proper nonempty subsets
  LabeledGraph g = cycle(15);
  CutFamily big = default_cut_family(g);
  CHECK(big.sets.size() < (1u << 15));
  bool has_full_arc_half = false;
  for (const auto& X : big.sets) {
    if (X.size() == 7) has_full_arc_half = true;
  }
  CHECK(has_full_arc_half);
}

TEST_CASE("conductance and boundary ratio frozen values") {
  struct Row {
    LabeledGraph g;
    double phi, phi_prime;
  };
  std::vector<Row> rows;
  rows.push_back({cycle(5), 0.5, 1.0});
  rows.push_back({cycle(9), 0.25, 0.5});
  rows.push_back({cayley_abelian({3}, {{1}, {2}}), 1.0, 2.0});
  rows.push_back({cayley_abelian({4}, {{1}, {2}, {3}}), 2.0 / 3.0, 1.0});
  rows.push_back({cayley_abelian({2, 2}, {{1, 0}, {0, 1}}), 0.5, 1.0});
  rows.push_back({pad_regular(bridged_cliques_adjacency(3)), 1.0 / 7.0, 1.0 / 3.0});
  rows.push_back({pad_regular(bridged_cliques_adjacency(4)), 1.0 / 13.0, 0.25});
  for (const auto& row : rows) {
    CutFamily fam = default_cut_family(row.g);
    CHECK(conductance(row.g, fam).value == doctest::Approx(row.phi).epsilon(1e-12));
    CHECK(boundary_phi_prime(row.g, fam).value ==
          doctest::Approx(row.phi_prime).epsilon(1e-12));
  }
  // Lexicographically smallest minimizing subsets.
  CHECK(conductance(cycle(9), default_cut_family(cycle(9))).argmin.X ==
        std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("boundary ratio dominated by degree times conductance") {
  for (const LabeledGraph& g :
       {cycle(5), cycle(9), cycle(13), cayley_abelian({3}, {{1}, {2}}),
        cayley_abelian({4}, {{1}, {2}, {3}}),
        pad_regular(bridged_cliques_adjacency(3)),
        pad_regular(bridged_cliques_adjacency(4))}) {
    PhiComparisonReport rep = phi_prime_vs_phi_check(g);
    CHECK(rep.holds);
    CHECK(rep.phi_prime <= rep.d * rep.phi + 1e-12);
  }
}

TEST_CASE("restricted families can only overestimate the minima") {
  LabeledGraph g = cycle(9);
  CutFamily exhaustive = default_cut_family(g);
  CutFamily arcs_only;
  arcs_only.description = "arcs of length 1..2";
  arcs_only.sets = {{0}, {3}, {0, 1}, {4, 5}};
  CHECK(conductance(g, arcs_only).value >=
        conductance(g, exhaustive).value - 1e-15);
  CHECK(boundary_phi_prime(g, arcs_only).value >=
        boundary_phi_prime(g, exhaustive).value - 1e-15);
}

TEST_CASE("graph text format round-trips") {
  for (const LabeledGraph& g :
       {cycle(6), pad_regular(bridged_cliques_adjacency(3)),
        cayley_abelian({4}, {{1}, {2}, {3}})}) {
    std::string text = graph_to_string(g);
    std::istringstream in(text);
    LabeledGraph h = read_graph(in);
    CHECK(h.n == g.n);
    CHECK(h.d == g.d);
    CHECK(h.sigma == g.sigma);
    CHECK(h.adj == g.adj);
    CHECK(graph_to_string(h) == text);
  }
}

TEST_CASE("graph text format accepts comments and blank lines anywhere") {
  std::istringstream in(
      "# leading comment\n3 2\n\n# between rows\n1 2 0\n2 0 1\n# trailing\n");
  LabeledGraph g = read_graph(in);
  CHECK(g.n == 3);
  CHECK(g.d == 2);
  CHECK(g.sigma[0] == std::vector<int>{1, 2, 0});
}

TEST_CASE("graph text format rejects malformed input with line numbers") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_graph(in);
      FAIL_CHECK("expected parse failure for: " << text);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("x 2\n", "line 1");
  expect_error("3 2\n1 2\n", "line 2");
  expect_error("3 2\n1 2 0\n0 0 1\n", "bijection");
  expect_error("3 2\n1 2 9\n2 0 1\n", "out of range at line 2");
}
