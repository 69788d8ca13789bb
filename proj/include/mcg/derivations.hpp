#pragma once

#include <cstddef>
#include <vector>

#include "mcg/chord.hpp"
#include "mcg/freelie.hpp"

namespace mcg {

// Which tower an element belongs to. The tensor realization is always the
// one inside H^{(x)(k+2)}; gstar and gplain tag representatives modulo the
// ideal j (resp. modulo inner derivations on top of that).
enum class Flavor { g1, gstar, gplain };

// Degree-k derivation of the free Lie algebra killing the symplectic class.
// The tensor lives in H (x) L(k+1) inside H^{(x)(k+2)}; the constructor
// verifies both membership conditions exactly and refuses bad input.
struct DerivationElement {
  int g = 0;
  int k = 0;
  Flavor flavor = Flavor::g1;
  SparseTensor tensor;

  DerivationElement(int genus, int degree, SparseTensor t, Flavor f = Flavor::g1);
};

// Exact test of the two conditions cutting out h(k) inside H^{(x)(k+2)}:
// (i) the last k+1 slots form a Lie element, checked through the projector
//     eigenvalue equation, and
// (ii) the tensor is invariant under the full cyclic rotation of its slots,
//      which is the same as lying in the kernel of the bracket map.
bool derivation_membership(const SparseTensor& t);

// dim h(k) = 2g dim L(k+1) - dim L(k+2): the bracket map onto L(k+2) is
// surjective, so the kernel dimension follows by subtraction. Within budget
// the claim is re-certified against the explicit bracket matrix.
std::size_t h_dimension(int k, int g);

// The dual route: kernel rank of the explicit bracket matrix built on the
// standard basis of H (x) L(k+1).
std::size_t h_bracket_kernel_rank(int k, int g);

// Invariant generators from linear chord diagrams with k chords. ell adds a
// fresh chord over two new leading slots and projects the tail into the free
// Lie algebra; xi is the sum of all cyclic rotations of ell.
SparseTensor ell_C(const ChordDiagram& c, int g);
DerivationElement xi_C(const ChordDiagram& c, int g);

// Hom(H, V) and H (x) V are identified through u -> mu(u, .) on the first
// slot, so f corresponds to sum_i x_i (x) f(y_i) - y_i (x) f(x_i).
SparseTensor derivation_value(const DerivationElement& d, int code);  // f(e_code)
SparseTensor hom_encode(int g, int degree, const std::vector<SparseTensor>& values);

// Leibniz extension of d over a plain H tensor power.
SparseTensor derivation_apply(const DerivationElement& d, const SparseTensor& t);

// Commutator of derivations, evaluated on generators and re-encoded. Degrees
// add; genus and flavor must match.
DerivationElement derivation_bracket(const DerivationElement& a, const DerivationElement& b);

// Certified kernel bases of the bracket maps.
GradedSubspace h_basis(int k, int g);   // label h, inside H (x) L(k+1)
GradedSubspace j_ideal(int k, int g);   // label j, inside H (x) I(k+1)

// dim j(k)^Sp by exactness of the invariant functor on
// 0 -> j(k) -> H (x) I(k+1) -> I(k+2) -> 0.
std::size_t j_invariant_dimension(int k, int g);

// Bracket-generated tower over a degree-one seed: degree d is spanned by all
// brackets of lower generated pieces. Models the Johnson image.
std::vector<GradedSubspace> generate_subalgebra(const GradedSubspace& seed, int up_to, int g,
                                                std::size_t budget_cols = 12000);

struct TraceValue {
  int degree = 0;        // odd
  SparseTensor value;    // in S^degree H
};

// Tr(2k+1): contract the Hom slot against the first value slot by mu, then
// symmetrize the remaining 2k+1 factors.
TraceValue trace_map(const DerivationElement& d);

}  // namespace mcg
