#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcg/rational.hpp"
#include "mcg/sparse.hpp"

namespace mcg {

// Symplectic basis of H at genus g, ordered x1 < y1 < x2 < y2 < ... Codes are
// 0..2g-1: even code 2i-2 is x_i, odd code 2i-1 is y_i. mu(x_i, y_i) = 1.
int mu_code(int a, int b);
int partner_code(int a);
std::string h_code_name(int code);
int h_code_parse(const std::string& name);

// Basis words are byte strings: one byte per H code, factor blocks
// concatenated in order.
using Word = std::string;

struct Primitive {
  enum Kind : std::uint8_t { H, W3, U, Sym } kind = H;
  int m = 1;  // Sym power; 1 otherwise

  int sub_len() const { return kind == H ? 1 : kind == Sym ? m : 3; }
  bool operator==(const Primitive& o) const { return kind == o.kind && m == o.m; }
};

struct Factor {
  Primitive base;
  int wedge = 1;  // 1: the primitive itself; else exterior power of base

  int sub_len() const { return base.sub_len() * wedge; }
  bool operator==(const Factor& o) const { return base == o.base && wedge == o.wedge; }
};

// Tensor product of factors at a fixed genus. Immutable value type.
class TensorSpace {
 public:
  TensorSpace() = default;
  TensorSpace(int g, std::vector<Factor> factors);

  static TensorSpace h_pow(int g, int n);
  static TensorSpace wedge3(int g) { return TensorSpace(g, {Factor{{Primitive::W3}, 1}}); }
  static TensorSpace u_space(int g) { return TensorSpace(g, {Factor{{Primitive::U}, 1}}); }
  static TensorSpace sym(int g, int m) {
    return TensorSpace(g, {Factor{{Primitive::Sym, m}, 1}});
  }
  static TensorSpace wedge_pow(int g, Primitive base, int m) {
    return TensorSpace(g, {Factor{base, m}});
  }

  int g() const { return g_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t word_len() const { return word_len_; }
  std::size_t dim() const { return dim_; }
  std::size_t factor_dim(std::size_t f) const { return fdims_[f]; }

  std::size_t word_index(const Word& w) const;
  Word word_at(std::size_t idx) const;
  std::string word_str(const Word& w) const;
  Word word_parse(const std::string& s) const;

  // Canonical form of raw bytes: sorts wedge/sym blocks, tracks the sign.
  // Returns sign 0 for words that die in the quotient (repeated wedge entry).
  std::pair<Word, int> canonicalize(Word raw) const;

  bool operator==(const TensorSpace& o) const {
    return g_ == o.g_ && factors_ == o.factors_;
  }
  bool operator!=(const TensorSpace& o) const { return !(*this == o); }

 private:
  int g_ = 0;
  std::vector<Factor> factors_;
  std::size_t word_len_ = 0;
  std::size_t dim_ = 1;
  std::vector<std::size_t> fdims_;     // per-factor dimension
  std::vector<std::size_t> strides_;   // mixed-radix strides

  std::size_t factor_index(std::size_t f, const char* bytes) const;
  void factor_unrank(std::size_t f, std::size_t idx, char* out) const;
};

struct SparseTensor {
  TensorSpace space;
  std::map<Word, Rational> terms;  // canonical words only, no zeros

  SparseTensor() = default;
  explicit SparseTensor(TensorSpace s) : space(std::move(s)) {}

  bool is_zero() const { return terms.empty(); }
  std::size_t nnz() const { return terms.size(); }

  void add_canonical(const Word& w, const Rational& c);
  void add_raw(Word raw, const Rational& c);  // canonicalize first

  SparseTensor& operator+=(const SparseTensor& o);
  SparseTensor& operator-=(const SparseTensor& o);

  SparseVector to_sparse_vector() const;
  static SparseTensor from_sparse_vector(const TensorSpace& s, const SparseVector& v);

  std::string str() const;  // deterministic "coeff*word" listing
};

SparseTensor st_scale(const SparseTensor& t, const Rational& c);
bool st_equal(const SparseTensor& a, const SparseTensor& b);

// Unordered accumulator for hot loops; drains into a SparseTensor.
class TensorAccum {
 public:
  explicit TensorAccum(TensorSpace s) : space_(std::move(s)) {}
  void add_raw(Word raw, const Rational& c);
  void add_canonical(const Word& w, const Rational& c);
  void add_scaled(const SparseTensor& t, const Rational& c);
  SparseTensor take();
  const TensorSpace& space() const { return space_; }

 private:
  TensorSpace space_;
  std::unordered_map<Word, Rational> terms_;
};

// ---- operations on plain H tensor powers ----

Rational mu_pair(const SparseTensor& u, const SparseTensor& v);  // H x H -> Q
SparseTensor basis_tensor(const TensorSpace& s, const Word& w);
SparseTensor h_basis_vector(int g, int code);

// Sum over i of x_i (x) y_i - y_i (x) x_i, in H^{(x)2}.
SparseTensor omega0_tensor(int g);
// Sum over i of x_i ^ y_i, in wedge^2 H.
SparseTensor omega0_wedge(int g);

// Place permutation: the factor at position i moves to position perm[i].
SparseTensor permute(const SparseTensor& t, const std::vector<int>& perm);
// mu-contraction of slots i < j of an H tensor power (0-based).
SparseTensor contract(const SparseTensor& t, int i, int j);
SparseTensor tensor_product(const SparseTensor& a, const SparseTensor& b);

// ---- wedge^3 H and the quotient U ----

// u ^ v ^ w -> sum over S3 of sgn(s) u_{s(1)} (x) u_{s(2)} (x) u_{s(3)}.
SparseTensor embed_wedge3(const SparseTensor& t);
// Quotient map H^{(x)3} -> wedge^3 H.
SparseTensor project_wedge3(const SparseTensor& t);
// u -> u ^ omega0 in wedge^3 H. Genus 1 gives the zero space.
SparseTensor embed_H_wedge3(const SparseTensor& u);
bool wedge3_trivial(int g);  // true at genus 1

// Contraction wedge^3 H -> H: mu applied to the first two slots of the
// embedding, i.e. C(u^v^w) = 2[mu(u,v)w - mu(u,w)v + mu(v,w)u]. Normalized so
// that C(u ^ omega0) = (2g-2) u, which is what makes q kill the image of H.
SparseTensor wedge3_contract(const SparseTensor& t);

// q(t) = t - (1/(2g-2)) C(t) ^ omega0. Idempotent, kernel exactly H^omega0.
SparseTensor q_map(const SparseTensor& t);

// Basis of im(H -> wedge^3 H) and the chosen complement (the U basis words:
// lexicographically smallest set completing the image).
const std::vector<Word>& u_basis_words(int g);
SparseTensor project_U(const SparseTensor& t);            // wedge^3 H -> U
SparseTensor u_section(int g, const Word& u_word);        // U basis word -> q-image in wedge^3 H

// ---- symmetric powers ----

// Quotient map H^{(x)m} -> S^m H (sort the word).
SparseTensor sym_from_tensor(const SparseTensor& t);
// Invariant pairing on S^m H: sum over all slot matchings of mu products.
// Alternating for odd m.
Rational sym_pairing(const SparseTensor& f, const SparseTensor& h);

// ---- generic Leibniz action ----

// Replaces one H code at a time by L(code), summed over every position
// (U blocks transform through their wedge^3 representatives and project back).
using HLinearMap = std::function<std::vector<std::pair<int, Rational>>(int)>;
SparseTensor apply_h_linear(const SparseTensor& t, const HLinearMap& L);

}  // namespace mcg
