#pragma once
// Free graded Lie algebra layers: the degree-k piece L(k) of the free Lie
// algebra on H sits inside H^{tensor k} as the image of the place-permutation
// projector p_k = (1-s_k)...(1-s_2). On top of that: Lyndon bracket bases,
// the ideal generated by the symplectic class, the surface quotient, and the
// chord-diagram route to the dimensions of invariant parts.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcg/chord.hpp"
#include "mcg/sparse.hpp"
#include "mcg/tensor.hpp"

namespace mcg {

// Signed place permutations realizing p_k. Exactly 2^{k-1} terms and the
// identity carries coefficient +1; both checked on construction.
struct LieProjector {
  int k = 0;
  // (perm, sign) with perm a move-to map: the factor in slot i lands in
  // slot perm[i], matching permute().
  std::vector<std::pair<std::vector<int>, int>> terms;
};

const LieProjector& lie_projector(int k);

// p_k applied to t in H^{tensor k}; satisfies p_k(p_k(t)) = k p_k(t).
SparseTensor apply_projector(int k, const SparseTensor& t);

// t lies in L(k) iff p_k(t) = k t.
bool is_lie_element(const SparseTensor& t);

// a tensor b - b tensor a inside H^{tensor (m+n)}.
SparseTensor bracket_tensors(const SparseTensor& a, const SparseTensor& b);

// Dimension of the degree-k piece of the free Lie algebra on n generators:
// (1/k) sum_{d|k} mu(d) n^{k/d}.
long long witt_dimension(int k, int n);

// Same count for the quotient by the ideal generated by the symplectic
// class, via the Lucas-style sequence s_0 = 2, s_1 = 2g,
// s_m = 2g s_{m-1} - s_{m-2}: (1/k) sum_{d|k} mu(d) s_{k/d}.
long long labute_dimension(int k, int g);

int mobius(int n);

// Lyndon words of length exactly k over letters 0..alphabet-1, lex order.
std::vector<Word> lyndon_words(int k, int alphabet);

// Iterated bracketing along the standard factorization w = uv (v the lex
// least proper suffix). The expansion is certified triangular on return: its
// lex-least word is w itself with coefficient +1.
SparseTensor lyndon_bracket_tensor(const Word& w, int g);

enum class SubspaceLabel { L, I, Lg, h, j, imtau, custom };
std::string label_str(SubspaceLabel l);

// A graded piece of a named subspace held as explicit tensors. Construction
// certifies linear independence (distinct leading words when available,
// otherwise a certified rank computation) unless the caller already carries
// a certificate; failure throws VerificationError.
struct GradedSubspace {
  TensorSpace ambient;
  int degree;
  SubspaceLabel label;
  std::vector<SparseTensor> basis;

  GradedSubspace(TensorSpace amb, int deg, SubspaceLabel lab,
                 std::vector<SparseTensor> vecs, bool precertified = false);
  std::size_t dim() const { return basis.size(); }
};

// Lyndon bracket basis of L(k); cardinality equals the Witt number (checked).
// Materialization is budgeted by total term count; oversized requests throw
// ResourceLimitError while the counting routes stay available at every size.
GradedSubspace lie_basis(int k, int g);

// I(2) = span{omega_0}, I(k+1) = [H, I(k)], returned as a basis whose
// independence and spanning are certified during extraction.
GradedSubspace ideal_basis(int k, int g);

// dim I(k) without materializing a reduced basis (certified rank of the
// right-normed spanning family); larger reach than ideal_basis.
std::size_t ideal_dimension(int k, int g);

// Fixed complement of I(k) inside L(k) with the projection exposed. The
// complement is the deterministic Lyndon-basis completion of the ideal's
// echelon, so coordinates are reproducible across runs.
class LgQuotient {
 public:
  LgQuotient(int k, int g);

  int k() const { return k_; }
  int g() const { return g_; }
  const GradedSubspace& subspace() const { return comp_; }
  std::size_t dim() const { return comp_.dim(); }

  // Image of t under L(k) ->> L(k)/I(k), written in the fixed complement.
  // Requires t in L(k) (as a span member; checked exactly).
  SparseTensor project(const SparseTensor& t) const;
  std::vector<Rational> coordinates(const SparseTensor& t) const;

 private:
  struct Parts {
    std::size_t ideal_dim;
    std::vector<SparseTensor> comp;
    Echelon ech;
  };
  static Parts make_parts(int k, int g);
  LgQuotient(Parts p, int k, int g);

  int k_, g_;
  TensorSpace ambient_;
  std::size_t ideal_dim_;
  GradedSubspace comp_;
  Echelon ech_;  // ideal columns first, then complement, identity tails
};

LgQuotient quotient_Lg(int k, int g);

// ---- invariant parts in chord-diagram coordinates ----
// All dimensions are certified ranks of small diagram-coordinate matrices;
// the tensor spaces themselves are never materialized.

// dim L(m)^Sp (0 for odd m).
std::size_t lie_invariant_dimension(int m, int g);
// dim (H tensor L(m))^Sp (0 for even m).
std::size_t h_times_lie_invariant_dimension(int m, int g);
// dim I(k)^Sp (0 for odd k).
std::size_t ideal_invariant_dimension(int k, int g);
// dim (H tensor I(k))^Sp (0 for even k).
std::size_t h_times_ideal_invariant_dimension(int k, int g);
// dim (L(k)/I(k))^Sp = dim L(k)^Sp - dim I(k)^Sp.
std::size_t quotient_invariant_dimension(int k, int g);

// ---- cache ----
// Text format: header {format_version, g, degree, label, basis_count}, then
// one tensor per record. Readers reject any header mismatch.
void save_subspace(const std::string& path, const GradedSubspace& s);
std::optional<GradedSubspace> load_subspace(const std::string& path, int g, int degree,
                                            SubspaceLabel label);

}  // namespace mcg
