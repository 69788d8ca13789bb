#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcg/chord.hpp"
#include "mcg/rational.hpp"
#include "mcg/tensor.hpp"

namespace mcg {

// Trivalent multigraph on vertices 1..n, loops and parallel edges allowed.
// A loop counts 2 toward its vertex degree, so n is forced to be even.
// Stored canonically: the lexicographically least sorted edge list over all
// vertex relabelings, which makes equality of canonical forms the same thing
// as isomorphism. Canonicalization is exhaustive and capped at 8 vertices.
struct TrivalentGraph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based, a <= b, sorted

  static TrivalentGraph canonical(int vertices, std::vector<std::pair<int, int>> raw);

  int n_edges() const { return static_cast<int>(edges.size()); }
  bool has_loop() const;
  bool connected() const;

  std::string str() const;  // "1-2,1-2,1-2"
  static TrivalentGraph parse(const std::string& s);

  bool operator==(const TrivalentGraph& o) const {
    return vertices == o.vertices && edges == o.edges;
  }
  bool operator<(const TrivalentGraph& o) const {
    if (vertices != o.vertices) return vertices < o.vertices;
    return edges < o.edges;
  }
};

TrivalentGraph theta_graph();     // two vertices joined by three parallel edges
TrivalentGraph dumbbell_graph();  // one edge with a loop at each end

// One representative per isomorphism class, sorted. vertices <= 8; the
// two-vertex list is {theta, dumbbell} and theta alone survives loopless.
std::vector<TrivalentGraph> enumerate_graphs(int vertices, bool connected_only = false,
                                             bool loopless_only = false);

// Collapse slots 3v-2, 3v-1, 3v of a diagram on 6k points to vertex v; each
// chord becomes an edge. Throws unless the diagram size is divisible by 6.
TrivalentGraph graph_of_diagram(const ChordDiagram& c);

// A diagram with graph_of_diagram(lift) isomorphic to gamma. Every graph has
// one: the three slots of a vertex give its three half-edges.
ChordDiagram lift_of_graph(const TrivalentGraph& gamma);

// Quotient of a_tensor into Lambda^{2k}(Lambda^3 H). The result depends only
// on graph_of_diagram(c), which is why a_graph can pick any lift.
SparseTensor a_graph_from(const ChordDiagram& c, int g);
SparseTensor a_graph(const TrivalentGraph& gamma, int g);

// alpha_gamma(t) = alpha_C(i(t)) / (2k)! for any lift C, where i expands the
// wedge words over all signed block and in-block permutations.
Rational alpha_graph(const TrivalentGraph& gamma, const SparseTensor& t);

// Factorwise projection Lambda^{2k}(Lambda^3 H) -> Lambda^{2k} U.
SparseTensor project_u_blocks(const SparseTensor& t);

// Functional on Lambda^{2k} U for loopless gamma: lift each U block through
// the q-section back into wedge^3 H, then alpha_graph. Kills every projected
// a_graph of a graph with a loop.
Rational beta_graph(const TrivalentGraph& gamma, const SparseTensor& t);

// Unordered multiset of connected graphs. Disconnected graphs split into
// their components, each relabeled 1..m and canonicalized.
struct GraphMonomial {
  std::vector<TrivalentGraph> components;  // sorted

  static GraphMonomial of_graph(const TrivalentGraph& gamma);
  int vertices() const;
  std::string str() const;  // components joined by ';'

  bool operator==(const GraphMonomial& o) const { return components == o.components; }
  bool operator<(const GraphMonomial& o) const { return components < o.components; }
};

// The sum of all (6k-1)!! diagram classes a_C, grouped by underlying graph
// monomial. The sum vanishes at genus 3k-1 and not at genus 3k; both facts
// are certified through the pairing functionals (and for k = 1 the vanishing
// is additionally checked on the literal tensor sum).
struct GraphRelation {
  int k = 0;
  int genus = 0;          // 3k - 1, where the combination vanishes
  bool vanishes = false;  // all functionals kill the sum at `genus`
  bool nonzero_next = false;   // some functional sees it at genus 3k
  bool tensor_checked = false; // k = 1: literal sum materialized and zero
  std::vector<std::pair<GraphMonomial, Rational>> expansion;  // multiplicities

  std::string json() const;
};

GraphRelation extract_relation(int k);  // k <= 2

// Degree-two cocycle functional on Lambda^2(Lambda^3 H) at genus g >= 2:
// (-3 alpha_dumbbell(t) + (2g-2) alpha_theta(t)) / (2g+1).
Rational e1_cocycle_functional(const SparseTensor& t, int g);

}  // namespace mcg
