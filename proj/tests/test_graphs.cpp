#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "mcg/chord.hpp"
#include "mcg/errors.hpp"
#include "mcg/graphs.hpp"
#include "mcg/spaction.hpp"
#include "mcg/sparse.hpp"

using namespace mcg;

namespace {

using Edge = std::pair<int, int>;
using EdgeList = std::vector<Edge>;

EdgeList apply_perm(const EdgeList& edges, const std::vector<int>& newlab) {
  EdgeList out;
  for (auto [a, b] : edges) {
    int x = newlab[a - 1], y = newlab[b - 1];
    if (x > y) std::swap(x, y);
    out.emplace_back(x, y);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t family_rank(const std::vector<SparseTensor>& fam) {
  SparseMatrix m;
  m.rows = fam.empty() ? 0 : fam.front().space.dim();
  for (const auto& t : fam) m.add_col(t.to_sparse_vector());
  return rank_modular_certified(m);
}

SparseTensor random_wedge_tensor(const TensorSpace& s, std::mt19937& rng, int nterms = 5) {
  SparseTensor t(s);
  std::uniform_int_distribution<std::size_t> word(0, s.dim() - 1);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int i = 0; i < nterms; ++i) {
    int c = coeff(rng);
    if (c) t.add_canonical(s.word_at(word(rng)), Rational(c));
  }
  return t;
}

// Tensor-level pullback of a Lambda^2(Lambda^3 H) element to H^{(x)6}: expand
// both blocks through embed_wedge3 and antisymmetrize the block pair. Used as
// an independent route for alpha_graph (which never builds this tensor).
SparseTensor embed_two_blocks(const SparseTensor& t) {
  const int g = t.space.g();
  const TensorSpace w3 = TensorSpace::wedge3(g);
  SparseTensor out(TensorSpace::h_pow(g, 6));
  for (const auto& [w, c] : t.terms) {
    SparseTensor b1(w3), b2(w3);
    b1.add_canonical(w.substr(0, 3), Rational(1));
    b2.add_canonical(w.substr(3, 3), Rational(1));
    SparseTensor prod = tensor_product(embed_wedge3(b1), embed_wedge3(b2));
    out += st_scale(prod, c);
    out -= st_scale(permute(prod, {3, 4, 5, 0, 1, 2}), c);
  }
  return out;
}

}  // namespace

TEST_CASE("canonical forms of trivalent graphs") {
  TrivalentGraph th = theta_graph();
  TrivalentGraph db = dumbbell_graph();
  CHECK(th.str() == "1-2,1-2,1-2");
  CHECK(db.str() == "1-1,1-2,2-2");
  CHECK_FALSE(th.has_loop());
  CHECK(db.has_loop());
  CHECK(th.connected());
  CHECK(db.connected());
  CHECK(TrivalentGraph::parse("1-2,1-2,1-2") == th);
  CHECK(TrivalentGraph::parse("2-2,1-2,1-1") == db);
  CHECK(TrivalentGraph::parse(th.str()) == th);

  // labels are arbitrary: the loop vertex can come in either position
  CHECK(TrivalentGraph::canonical(2, {{2, 2}, {2, 1}, {1, 1}}) == db);
  CHECK(TrivalentGraph::canonical(4, {{1, 2}, {1, 2}, {1, 2}, {3, 4}, {3, 4}, {3, 4}}).str() ==
        "1-2,1-2,1-2,3-4,3-4,3-4");

  CHECK_THROWS_AS(TrivalentGraph::canonical(3, {{1, 2}, {1, 3}, {2, 3}, {1, 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TrivalentGraph::canonical(2, {{1, 2}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(TrivalentGraph::canonical(2, {{1, 3}, {1, 2}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(TrivalentGraph::canonical(10, EdgeList(15, {1, 2})), ResourceLimitError);

  // random relabelings of every graph on up to 6 vertices land on the same
  // canonical form, and distinct canonical forms stay distinct
  std::mt19937 rng(77);
  for (int n : {2, 4, 6}) {
    auto all = enumerate_graphs(n);
    std::set<std::string> forms;
    for (const auto& gg : all) forms.insert(gg.str());
    CHECK(forms.size() == all.size());
    for (const auto& gg : all)
      for (int trial = 0; trial < 6; ++trial) {
        std::vector<int> lab(n);
        std::iota(lab.begin(), lab.end(), 1);
        std::shuffle(lab.begin(), lab.end(), rng);
        CHECK(TrivalentGraph::canonical(n, apply_perm(gg.edges, lab)) == gg);
      }
  }
}

TEST_CASE("graph enumeration counts") {
  auto two = enumerate_graphs(2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == dumbbell_graph());
  CHECK(two[1] == theta_graph());
  CHECK(enumerate_graphs(2, true).size() == 2);
  auto loopless = enumerate_graphs(2, true, true);
  REQUIRE(loopless.size() == 1);
  CHECK(loopless[0] == theta_graph());

  CHECK(enumerate_graphs(4).size() == 8);
  CHECK(enumerate_graphs(4, true).size() == 5);
  CHECK(enumerate_graphs(4, false, true).size() == 3);
  CHECK(enumerate_graphs(4, true, true).size() == 2);
  CHECK(enumerate_graphs(6).size() == 31);
  CHECK(enumerate_graphs(6, true).size() == 17);

  CHECK_THROWS_AS(enumerate_graphs(3), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_graphs(10), ResourceLimitError);

  // independent oracle for the 4-vertex counts: brute-force over all labeled
  // degree-3 edge multisets, then count orbits under the 24 relabelings
  std::vector<Edge> slots;
  for (int a = 1; a <= 4; ++a)
    for (int b = a; b <= 4; ++b) slots.emplace_back(a, b);
  std::set<EdgeList> labeled;
  EdgeList cur;
  std::function<void(std::size_t, std::array<int, 4>)> rec = [&](std::size_t s,
                                                                 std::array<int, 4> deg) {
    if (deg == std::array<int, 4>{3, 3, 3, 3}) {
      labeled.insert(cur);
      return;
    }
    if (s == slots.size()) return;
    rec(s + 1, deg);
    auto [a, b] = slots[s];
    while (true) {
      deg[a - 1] += a == b ? 2 : 1;
      if (a != b) ++deg[b - 1];
      if (deg[a - 1] > 3 || deg[b - 1] > 3) break;
      cur.emplace_back(a, b);
      rec(s + 1, deg);
    }
    cur.resize(cur.size() - std::count(cur.begin(), cur.end(), slots[s]));
  };
  rec(0, {0, 0, 0, 0});

  std::vector<int> lab{1, 2, 3, 4};
  std::set<EdgeList> visited;
  int orbits = 0, connected_orbits = 0;
  for (const EdgeList& es : labeled) {
    if (visited.count(es)) continue;
    ++orbits;
    if (TrivalentGraph::canonical(4, es).connected()) ++connected_orbits;
    std::sort(lab.begin(), lab.end());
    do visited.insert(apply_perm(es, lab));
    while (std::next_permutation(lab.begin(), lab.end()));
  }
  CHECK(orbits == 8);
  CHECK(connected_orbits == 5);
}

TEST_CASE("diagrams collapse to graphs and lift back") {
  CHECK(graph_of_diagram(ChordDiagram::parse("(1,4)(2,5)(3,6)")) == theta_graph());
  CHECK(graph_of_diagram(ChordDiagram::parse("(1,2)(3,4)(5,6)")) == dumbbell_graph());
  CHECK_THROWS_AS(graph_of_diagram(ChordDiagram::parse("(1,3)(2,4)")), std::invalid_argument);

  for (int n : {2, 4})
    for (const auto& gg : enumerate_graphs(n))
      CHECK(graph_of_diagram(lift_of_graph(gg)) == gg);

  // the 15 diagrams on 6 slots split 6 theta-type to 9 dumbbell-type
  std::map<TrivalentGraph, int> mult;
  for (const auto& c : enumerate_diagrams(3)) ++mult[graph_of_diagram(c)];
  REQUIRE(mult.size() == 2);
  CHECK(mult[theta_graph()] == 6);
  CHECK(mult[dumbbell_graph()] == 9);

  GraphMonomial m = GraphMonomial::of_graph(
      TrivalentGraph::canonical(4, {{1, 2}, {1, 2}, {1, 2}, {3, 3}, {3, 4}, {4, 4}}));
  REQUIRE(m.components.size() == 2);
  CHECK(m.components[0] == dumbbell_graph());
  CHECK(m.components[1] == theta_graph());
  CHECK(m.vertices() == 4);
  CHECK(m.str() == "1-1,1-2,2-2;1-2,1-2,1-2");
  CHECK(GraphMonomial::of_graph(theta_graph()).str() == "1-2,1-2,1-2");
}

TEST_CASE("a_graph does not depend on the lift") {
  for (int g : {2, 3}) {
    std::map<TrivalentGraph, SparseTensor> rep;
    for (const auto& c : enumerate_diagrams(3)) {
      SparseTensor t = a_graph_from(c, g);
      TrivalentGraph key = graph_of_diagram(c);
      auto it = rep.find(key);
      if (it == rep.end())
        rep.emplace(key, std::move(t));
      else
        CHECK(st_equal(it->second, t));
    }
    REQUIRE(rep.size() == 2);
    CHECK(st_equal(rep.at(theta_graph()), a_graph(theta_graph(), g)));
    CHECK(st_equal(rep.at(dumbbell_graph()), a_graph(dumbbell_graph(), g)));
  }
  CHECK(a_graph(theta_graph(), 3).nnz() == 10);
  CHECK(a_graph(dumbbell_graph(), 3).nnz() == 12);

  // random lifts of 4-vertex graphs: shuffle the three slots of each vertex
  std::mt19937 rng(4091);
  for (const auto& gg : enumerate_graphs(4)) {
    ChordDiagram base = lift_of_graph(gg);
    SparseTensor expect = a_graph_from(base, 2);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<int> slot(12);
      std::iota(slot.begin(), slot.end(), 1);
      for (int v = 0; v < 4; ++v) std::shuffle(slot.begin() + 3 * v, slot.begin() + 3 * v + 3, rng);
      std::vector<std::pair<int, int>> pairs;
      for (auto [i, j] : base.pairs) pairs.emplace_back(slot[i - 1], slot[j - 1]);
      ChordDiagram other = ChordDiagram::canonical(std::move(pairs));
      CHECK(graph_of_diagram(other) == gg);
      CHECK(st_equal(a_graph_from(other, 2), expect));
    }
  }

  CHECK_THROWS_AS(a_graph(theta_graph(), 5), ResourceLimitError);
  CHECK_THROWS_AS(a_graph_from(lift_of_graph(enumerate_graphs(6)[0]), 2), ResourceLimitError);
}

TEST_CASE("alpha_graph agrees with the tensor-level pullback") {
  std::mt19937 rng(515);
  for (int g : {2, 3}) {
    std::vector<SparseTensor> probes{a_graph(theta_graph(), g), a_graph(dumbbell_graph(), g),
                                     random_wedge_tensor(a_graph(theta_graph(), g).space, rng)};
    for (const SparseTensor& t : probes) {
      SparseTensor emb = embed_two_blocks(t);
      for (const auto& c : enumerate_diagrams(3)) {
        Rational via_tensor = alpha_eval(c, emb) / 2;
        CHECK(alpha_graph(graph_of_diagram(c), t) == via_tensor);
      }
    }
  }

  SparseTensor zero(TensorSpace::wedge_pow(3, {Primitive::W3}, 2));
  CHECK(alpha_graph(theta_graph(), zero) == 0);
  SparseTensor wrong(TensorSpace::h_pow(3, 6));
  CHECK_THROWS_AS(alpha_graph(theta_graph(), wrong), std::invalid_argument);
}

TEST_CASE("pairing matrix and stable-range ranks") {
  TrivalentGraph th = theta_graph(), db = dumbbell_graph();
  SparseTensor ath = a_graph(th, 3), adb = a_graph(db, 3);
  CHECK(alpha_graph(th, ath) == 720);
  CHECK(alpha_graph(th, adb) == -288);
  CHECK(alpha_graph(db, ath) == -288);
  CHECK(alpha_graph(db, adb) == 384);
  // 720 * 384 != 288^2, so the two functionals separate the two classes
  CHECK(Rational(720) * 384 - Rational(288) * 288 != 0);

  CHECK(family_rank({ath, adb}) == 2);
  CHECK(family_rank({a_graph(th, 4), a_graph(db, 4)}) == 2);

  // below the stable range the classes collapse: 6 a_theta + 9 a_dumbbell
  // is the genus-2 relation, visible to both functionals
  SparseTensor ath2 = a_graph(th, 2), adb2 = a_graph(db, 2);
  CHECK(family_rank({ath2, adb2}) == 1);
  SparseTensor comb = st_scale(ath2, Rational(6));
  comb += st_scale(adb2, Rational(9));
  CHECK(comb.is_zero());
  CHECK(alpha_graph(th, ath2) == 144);
  CHECK(alpha_graph(th, adb2) == -96);
  CHECK(alpha_graph(db, ath2) == -96);
  CHECK(alpha_graph(db, adb2) == 64);
}

TEST_CASE("projection to the U carrier kills exactly the loop graphs") {
  for (const auto& gg : enumerate_graphs(2)) {
    for (int g : {3, 4}) {
      SparseTensor u = project_u_blocks(a_graph(gg, g));
      CHECK(u.is_zero() == gg.has_loop());
    }
  }
  for (const auto& gg : enumerate_graphs(4)) {
    SparseTensor u = project_u_blocks(a_graph(gg, 3));
    CHECK(u.is_zero() == gg.has_loop());
  }
  SparseTensor wrong(TensorSpace::h_pow(3, 6));
  CHECK_THROWS_AS(project_u_blocks(wrong), std::invalid_argument);
}

TEST_CASE("beta functional on the U carrier") {
  TrivalentGraph th = theta_graph();
  SparseTensor uth = project_u_blocks(a_graph(th, 3));
  SparseTensor udb = project_u_blocks(a_graph(dumbbell_graph(), 3));
  CHECK(beta_graph(th, uth) == 504);
  CHECK(beta_graph(th, udb) == 0);

  CHECK_THROWS_AS(beta_graph(dumbbell_graph(), uth), std::invalid_argument);
  SparseTensor wrong(TensorSpace::wedge_pow(3, {Primitive::W3}, 2));
  CHECK_THROWS_AS(beta_graph(th, wrong), std::invalid_argument);

  std::mt19937 rng(2718);
  const TensorSpace uu = TensorSpace::wedge_pow(3, {Primitive::U}, 2);
  SparseTensor r1 = random_wedge_tensor(uu, rng), r2 = random_wedge_tensor(uu, rng);
  SparseTensor lin = st_scale(r1, Rational(3));
  lin += st_scale(r2, Rational(-7, 2));
  CHECK(beta_graph(th, lin) ==
        Rational(3) * beta_graph(th, r1) + Rational(-7, 2) * beta_graph(th, r2));

  // beta_theta is equivariantly built and nonzero; the invariant functionals
  // on Lambda^2 U at genus 3 form a line, so it spans them
  SparseMatrix stacked;
  const std::size_t dim = uu.dim();
  REQUIRE(dim == 91);
  auto gens = sp_basis(3);
  stacked.rows = dim * gens.size();
  for (std::size_t j = 0; j < dim; ++j) {
    SparseTensor e(uu);
    e.add_canonical(uu.word_at(j), Rational(1));
    SparseVector col;
    col.dim = stacked.rows;
    for (std::size_t s = 0; s < gens.size(); ++s)
      for (const auto& [idx, val] : act(gens[s], e).to_sparse_vector().entries)
        col.entries.emplace_back(s * dim + idx, val);
    stacked.add_col(std::move(col));
  }
  CHECK(dim - rank_modular_certified(stacked) == 1);
  for (int s = 0; s < 4; ++s) CHECK(beta_graph(th, act(gens[s], r1)) == 0);
}

TEST_CASE("cycle-form pairing matches the evaluated sign") {
  for (int k = 1; k <= 4; ++k) {
    auto diags = enumerate_diagrams(k);
    for (const auto& c : diags)
      for (const auto& d : diags) {
        CHECK(pairing_cycle_form(c, d, 2) == pairing_formula(c, d, 2));
        if (k <= 3) CHECK(pairing_cycle_form(c, d, 3) == pairing_formula(c, d, 3));
      }
  }
}

TEST_CASE("diagram sum relation grouped by graphs") {
  GraphRelation r1 = extract_relation(1);
  CHECK(r1.k == 1);
  CHECK(r1.genus == 2);
  CHECK(r1.vanishes);
  CHECK(r1.nonzero_next);
  CHECK(r1.tensor_checked);
  REQUIRE(r1.expansion.size() == 2);
  CHECK(r1.expansion[0].first.str() == "1-1,1-2,2-2");
  CHECK(r1.expansion[0].second == 9);
  CHECK(r1.expansion[1].first.str() == "1-2,1-2,1-2");
  CHECK(r1.expansion[1].second == 6);
  CHECK(r1.json().find("\"genus\":2") != std::string::npos);
  CHECK(r1.json().find("\"vanishes\":true") != std::string::npos);
  CHECK(r1.json().find("\"multiplicity\":9") != std::string::npos);

  GraphRelation r2 = extract_relation(2);
  CHECK(r2.genus == 5);
  CHECK(r2.vanishes);
  CHECK(r2.nonzero_next);
  REQUIRE(r2.expansion.size() == 8);
  Rational total;
  int disconnected = 0;
  for (const auto& [mono, c] : r2.expansion) {
    total += c;
    CHECK(mono.vertices() == 4);
    if (mono.components.size() == 2) ++disconnected;
  }
  CHECK(total == 10395);
  CHECK(disconnected == 3);
  std::map<std::string, Rational> coeff;
  for (const auto& [mono, c] : r2.expansion) coeff[mono.str()] = c;
  CHECK(coeff["1-1,1-2,2-2;1-1,1-2,2-2"] == 243);
  CHECK(coeff["1-1,1-2,2-2;1-2,1-2,1-2"] == 324);
  CHECK(coeff["1-2,1-2,1-2;1-2,1-2,1-2"] == 108);
  CHECK(coeff["1-2,1-3,1-4,2-3,2-4,3-4"] == 1296);

  CHECK_THROWS_AS(extract_relation(0), std::invalid_argument);
  CHECK_THROWS_AS(extract_relation(3), ResourceLimitError);
}

TEST_CASE("degree-two cocycle functional") {
  TrivalentGraph th = theta_graph(), db = dumbbell_graph();
  SparseTensor ath2 = a_graph(th, 2), adb2 = a_graph(db, 2);
  CHECK(e1_cocycle_functional(ath2, 2) == Rational(576, 5));
  CHECK(e1_cocycle_functional(adb2, 2) == Rational(-384, 5));
  CHECK(e1_cocycle_functional(a_graph(th, 3), 3) == Rational(3744, 7));
  CHECK(e1_cocycle_functional(a_graph(db, 3), 3) == Rational(-2304, 7));

  // the genus-2 relation 6 a_theta + 9 a_dumbbell dies under any functional
  CHECK(Rational(6) * e1_cocycle_functional(ath2, 2) +
            Rational(9) * e1_cocycle_functional(adb2, 2) ==
        0);

  std::mt19937 rng(99);
  for (int g : {2, 3}) {
    SparseTensor t = random_wedge_tensor(TensorSpace::wedge_pow(g, {Primitive::W3}, 2), rng);
    CHECK(e1_cocycle_functional(t, g) ==
          (Rational(-3) * alpha_graph(db, t) + Rational(2 * g - 2) * alpha_graph(th, t)) /
              Rational(2 * g + 1));
    SparseTensor s = random_wedge_tensor(t.space, rng);
    SparseTensor lin = st_scale(t, Rational(2));
    lin += s;
    CHECK(e1_cocycle_functional(lin, g) ==
          Rational(2) * e1_cocycle_functional(t, g) + e1_cocycle_functional(s, g));
  }
  CHECK_THROWS_AS(e1_cocycle_functional(a_graph(th, 1), 1), std::invalid_argument);
  CHECK_THROWS_AS(e1_cocycle_functional(ath2, 3), std::invalid_argument);
}
