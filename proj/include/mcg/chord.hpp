#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcg/sparse.hpp"
#include "mcg/tensor.hpp"

namespace mcg {

// Linear chord diagram on vertices 1..2k: a perfect matching stored with
// i < j inside each pair and pairs sorted by first vertex.
struct ChordDiagram {
  std::vector<std::pair<int, int>> pairs;

  int k() const { return static_cast<int>(pairs.size()); }
  int n() const { return 2 * k(); }

  static ChordDiagram canonical(std::vector<std::pair<int, int>> raw);
  int partner(int v) const;  // 1-based

  std::string str() const;  // "(1,3)(2,4)"
  static ChordDiagram parse(const std::string& s);

  bool operator==(const ChordDiagram& o) const { return pairs == o.pairs; }
  bool operator<(const ChordDiagram& o) const { return pairs < o.pairs; }
};

// All (2k-1)!! diagrams in lexicographic order of their canonical form.
std::vector<ChordDiagram> enumerate_diagrams(int k);

// Sign of the permutation sending 1..2k to i1 j1 i2 j2 ... ik jk.
int diagram_sign(const ChordDiagram& c);

// sgn C times omega_0 placed across every chord: (2g)^k terms, coefficients
// all +-1, living in H^{(x)2k}.
SparseTensor a_tensor(const ChordDiagram& c, int g);

// alpha_C(u_1 (x) ... (x) u_2k) = sgn C times the product of mu over chords.
Rational alpha_eval(const ChordDiagram& c, const SparseTensor& t);

// Connected components of the union of the two matchings on 1..2k.
int union_components(const ChordDiagram& c, const ChordDiagram& d);

// alpha_C(a_D) = sign * (2g)^r with r the component count of C u D. The sign
// does not depend on g; it is read off from the genus-1 evaluation.
Rational pairing_formula(const ChordDiagram& c, const ChordDiagram& d, int g);

// Same value with the sign in closed form: every union cycle through m chords
// of C contributes (-1)^{m+1} (2g), so the total is (-1)^{k+r} (2g)^r. The
// diagram signs cancel against the slot shuffles. Kept separate from
// pairing_formula so the two routes stay independent cross-checks.
Rational pairing_cycle_form(const ChordDiagram& c, const ChordDiagram& d, int g);

// Gram matrix (alpha_i(a_j))_{ij} over enumerate_diagrams(k).
SparseMatrix gram_matrix(int k, int g);

// dim (H^{(x)2k})^Sp = rank of the Gram matrix.
std::size_t invariant_dimension(int k, int g);

struct SumRelationReport {
  bool is_zero = false;     // whether the sum of all a_C vanishes
  Rational row_sum;         // common value of sum_C alpha_D(a_C)
};
// Checks sum_C a_C against every functional; throws logic_error if the row
// sums fail to be constant across D.
SumRelationReport verify_sum_relation(int k, int g);

// Matching on a circle: the lexicographically least rotation of the pairs.
struct CircularDiagram {
  std::vector<std::pair<int, int>> pairs;
  std::string str() const;
  bool operator==(const CircularDiagram& o) const { return pairs == o.pairs; }
  bool operator<(const CircularDiagram& o) const { return pairs < o.pairs; }
};

CircularDiagram circularize(const ChordDiagram& c);

// ---- the calculus on invariant-tensor coordinates ----
//
// Every operator below rewrites a single a_C as a multiple of another a_C',
// so linear maps between invariant subspaces stay (2k-1)!!-dimensional no
// matter the genus. The three rules are oracle-tested against the explicit
// tensor operations at small sizes.

// Indexed diagram list for one vertex count, with O(1) lookup.
class DiagramBasis {
 public:
  explicit DiagramBasis(int k);
  int k() const { return k_; }
  std::size_t size() const { return list_.size(); }
  const ChordDiagram& at(std::size_t i) const { return list_[i]; }
  const std::vector<ChordDiagram>& list() const { return list_; }
  std::size_t index_of(const ChordDiagram& c) const;

 private:
  int k_;
  std::vector<ChordDiagram> list_;
  std::unordered_map<std::string, std::size_t> index_;  // partner-array key
};

// mu-contraction of slots i < j (1-based): a_C -> coeff * a_C'. The chord
// case picks up 2g; the two-chord case reconnects the free legs.
std::pair<ChordDiagram, Rational> contract_diagram(const ChordDiagram& c, int i, int j,
                                                   int g);

// Slot permutation (1-based, slot v moves to perm[v-1]): a_C -> +- a_C'.
std::pair<ChordDiagram, int> permute_diagram(const ChordDiagram& c,
                                             const std::vector<int>& perm);

// Insert a fresh omega_0 chord at positions i < j of the enlarged diagram,
// old slots shifted around them order-preservingly: a_C -> +- a_C'.
std::pair<ChordDiagram, int> insert_omega(const ChordDiagram& c, int i, int j);

}  // namespace mcg
