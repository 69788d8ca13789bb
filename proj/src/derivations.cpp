#include "mcg/derivations.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

#include "mcg/errors.hpp"

namespace mcg {

namespace {

long long pow_ll(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

bool plain_h_power(const TensorSpace& s) {
  return s == TensorSpace::h_pow(s.g(), (int)s.word_len());
}

// slot m -> m+1, last slot -> 0
std::vector<int> full_cycle(int n) {
  std::vector<int> p(n);
  for (int m = 0; m < n; ++m) p[m] = (m + 1) % n;
  return p;
}

// 1 (x) p_{n-1} as signed place permutations of all n slots.
std::vector<std::pair<std::vector<int>, int>> shifted_projector(int n) {
  const LieProjector& p = lie_projector(n - 1);
  std::vector<std::pair<std::vector<int>, int>> out;
  out.reserve(p.terms.size());
  for (const auto& [perm, s] : p.terms) {
    std::vector<int> q(n);
    q[0] = 0;
    for (int m = 0; m + 1 < n; ++m) q[m + 1] = perm[m] + 1;
    out.emplace_back(std::move(q), s);
  }
  return out;
}

SparseTensor apply_signed_perms(const SparseTensor& t,
                                const std::vector<std::pair<std::vector<int>, int>>& terms) {
  SparseTensor acc(t.space);
  for (const auto& [perm, s] : terms) {
    if (s > 0)
      acc += permute(t, perm);
    else
      acc -= permute(t, perm);
  }
  return acc;
}

// Values on the generators, sliced by generator code: f(e_c) collects the
// terms whose first letter pairs with e_c under mu, signed accordingly.
using ValueSlices = std::vector<std::vector<std::pair<Word, Rational>>>;

ValueSlices value_slices(int g, const SparseTensor& tensor) {
  ValueSlices out(2 * g);
  for (const auto& [w, c] : tensor.terms) {
    int lead = (unsigned char)w[0];
    int code = partner_code(lead);
    int s = mu_code(lead, code);
    out[code].emplace_back(w.substr(1), s > 0 ? c : Rational(-c));
  }
  return out;
}

// Leibniz extension over a plain H tensor power, f(w_s) spliced into slot s.
SparseTensor apply_slices(int g, int k, const ValueSlices& slices, const SparseTensor& t) {
  std::size_t m = t.space.word_len();
  TensorAccum acc(TensorSpace::h_pow(g, (int)m + k));
  for (const auto& [w, c] : t.terms)
    for (std::size_t s = 0; s < m; ++s) {
      const auto& vals = slices[(unsigned char)w[s]];
      for (const auto& [rw, rc] : vals) {
        Word nw;
        nw.reserve(m - 1 + rw.size());
        nw.append(w, 0, s);
        nw.append(rw);
        nw.append(w, s + 1, Word::npos);
        acc.add_raw(std::move(nw), c * rc);
      }
    }
  return acc.take();
}

// Commutator on raw tensors: evaluate both ways on every generator, then
// re-encode. Kept separate from the checked element type so bulk bracket
// sweeps pay for membership verification only on the vectors they keep.
SparseTensor bracket_raw(int g, int ka, const SparseTensor& ta, int kb, const SparseTensor& tb) {
  ValueSlices sa = value_slices(g, ta);
  ValueSlices sb = value_slices(g, tb);
  std::vector<SparseTensor> vals;
  vals.reserve(2 * g);
  for (int c = 0; c < 2 * g; ++c) {
    SparseTensor fb(TensorSpace::h_pow(g, kb + 1));
    for (const auto& [rw, rc] : sb[c]) fb.add_canonical(rw, rc);
    SparseTensor fa(TensorSpace::h_pow(g, ka + 1));
    for (const auto& [rw, rc] : sa[c]) fa.add_canonical(rw, rc);
    SparseTensor v = apply_slices(g, ka, sa, fb);
    v -= apply_slices(g, kb, sb, fa);
    vals.push_back(std::move(v));
  }
  return hom_encode(g, ka + kb, vals);
}

// Columns [e_c, b] over all generators e_c and all b in the basis; the
// kernel coordinates of this matrix are exactly the membership condition on
// sum e_c (x) b.
SparseMatrix bracket_matrix(int g, const GradedSubspace& basis) {
  TensorSpace h1 = TensorSpace::h_pow(g, 1);
  SparseMatrix m;
  m.rows = TensorSpace::h_pow(g, basis.degree + 1).dim();
  for (int c = 0; c < 2 * g; ++c) {
    SparseTensor e = basis_tensor(h1, Word(1, char(c)));
    for (const auto& b : basis.basis) m.add_col(bracket_tensors(e, b).to_sparse_vector());
  }
  return m;
}

std::vector<SparseTensor> kernel_to_tensors(int g, const GradedSubspace& basis,
                                            const std::vector<SparseVector>& kernel) {
  TensorSpace amb = TensorSpace::h_pow(g, basis.degree + 1);
  std::size_t nb = basis.dim();
  std::vector<SparseTensor> out;
  out.reserve(kernel.size());
  for (const auto& v : kernel) {
    TensorAccum acc(amb);
    for (const auto& [idx, coef] : v.entries) {
      std::size_t c = idx / nb, wi = idx % nb;
      for (const auto& [bw, bc] : basis.basis[wi].terms)
        acc.add_raw(Word(1, char(c)) + bw, coef * bc);
    }
    out.push_back(acc.take());
  }
  return out;
}

}  // namespace

bool derivation_membership(const SparseTensor& t) {
  if (!plain_h_power(t.space))
    throw std::invalid_argument("derivation_membership: not a plain H tensor power");
  int n = (int)t.space.word_len();
  if (n < 3) throw std::invalid_argument("derivation_membership: need at least three slots");
  if (t.is_zero()) return true;
  if (!st_equal(permute(t, full_cycle(n)), t)) return false;
  SparseTensor proj = apply_signed_perms(t, shifted_projector(n));
  return st_equal(proj, st_scale(t, Rational(n - 1)));
}

DerivationElement::DerivationElement(int genus, int degree, SparseTensor t, Flavor f)
    : g(genus), k(degree), flavor(f), tensor(std::move(t)) {
  if (g < 1 || k < 1) throw std::invalid_argument("DerivationElement: bad genus or degree");
  if (tensor.space != TensorSpace::h_pow(g, k + 2))
    throw std::invalid_argument("DerivationElement: tensor must live in H^(k+2)");
  if (!derivation_membership(tensor))
    throw VerificationError("DerivationElement: membership conditions fail");
}

std::size_t h_bracket_kernel_rank(int k, int g) {
  if (k < 1 || g < 1)
    throw std::invalid_argument("h_bracket_kernel_rank: bad degree or genus");
  long long cols = 2LL * g * witt_dimension(k + 1, 2 * g);
  if (cols > 12000 || pow_ll(2 * g, k + 2) > 70000)
    throw ResourceLimitError("h_bracket_kernel_rank: bracket matrix over budget");
  GradedSubspace L = lie_basis(k + 1, g);
  SparseMatrix m = bracket_matrix(g, L);
  // the columns span inside L(k+2), which caps the rank at the Witt number;
  // spot-check that containment on the ends of the column list
  for (std::size_t j : {std::size_t{0}, m.cols.size() - 1}) {
    SparseTensor col = SparseTensor::from_sparse_vector(TensorSpace::h_pow(g, k + 2), m.cols[j]);
    if (!is_lie_element(col))
      throw VerificationError("h_bracket_kernel_rank: bracket column escapes the Lie layer");
  }
  std::size_t target = (std::size_t)witt_dimension(k + 2, 2 * g);
  std::size_t r = rank_lower_bound_modp(m, target);
  if (r < target) r = rank_modular_certified(m);
  if (r > target)
    throw VerificationError("h_bracket_kernel_rank: rank exceeds the Lie layer dimension");
  return (std::size_t)cols - r;
}

std::size_t h_dimension(int k, int g) {
  if (k < 1 || g < 1) throw std::invalid_argument("h_dimension: bad degree or genus");
  long long pairs = 2LL * g * witt_dimension(k + 1, 2 * g);
  long long next = witt_dimension(k + 2, 2 * g);
  if (pairs < next) throw VerificationError("h_dimension: bracket count below its image");
  auto dim = (std::size_t)(pairs - next);
  if (pairs <= 12000 && pow_ll(2 * g, k + 2) <= 70000) {
    static std::set<std::pair<int, int>> certified;
    if (!certified.count({k, g})) {
      if (h_bracket_kernel_rank(k, g) != dim)
        throw VerificationError("h_dimension: kernel rank disagrees with the count");
      certified.insert({k, g});
    }
  }
  return dim;
}

SparseTensor ell_C(const ChordDiagram& c, int g) {
  if (g < 1) throw std::invalid_argument("ell_C: bad genus");
  int k = c.k();
  if ((1LL << (2 * k)) * pow_ll(2 * g, k + 1) > 4000000)
    throw ResourceLimitError("ell_C: projection over budget");
  std::vector<std::pair<int, int>> pairs{{1, 2}};
  for (auto [i, j] : c.pairs) pairs.emplace_back(i + 2, j + 2);
  ChordDiagram ct = ChordDiagram::canonical(std::move(pairs));
  SparseTensor a = a_tensor(ct, g);
  return apply_signed_perms(a, shifted_projector(2 * k + 2));
}

DerivationElement xi_C(const ChordDiagram& c, int g) {
  SparseTensor ell = ell_C(c, g);
  int n = 2 * c.k() + 2;
  SparseTensor acc(ell.space);
  for (int i = 1; i <= n; ++i) {
    std::vector<int> p(n);
    for (int m = 0; m < n; ++m) p[m] = (m + i) % n;
    acc += permute(ell, p);
  }
  return DerivationElement(g, n - 2, std::move(acc));
}

SparseTensor derivation_value(const DerivationElement& d, int code) {
  if (code < 0 || code >= 2 * d.g) throw std::invalid_argument("derivation_value: bad code");
  SparseTensor out(TensorSpace::h_pow(d.g, d.k + 1));
  for (const auto& [w, c] : d.tensor.terms) {
    int s = mu_code((unsigned char)w[0], code);
    if (!s) continue;
    out.add_canonical(w.substr(1), s > 0 ? c : Rational(-c));
  }
  return out;
}

SparseTensor hom_encode(int g, int degree, const std::vector<SparseTensor>& values) {
  if (g < 1 || degree < 0) throw std::invalid_argument("hom_encode: bad genus or degree");
  if ((int)values.size() != 2 * g)
    throw std::invalid_argument("hom_encode: need one value per generator");
  TensorSpace vs = TensorSpace::h_pow(g, degree + 1);
  for (const auto& v : values)
    if (v.space != vs) throw std::invalid_argument("hom_encode: value in the wrong space");
  SparseTensor out(TensorSpace::h_pow(g, degree + 2));
  for (int i = 0; i < g; ++i) {
    out += tensor_product(h_basis_vector(g, 2 * i), values[2 * i + 1]);
    out -= tensor_product(h_basis_vector(g, 2 * i + 1), values[2 * i]);
  }
  return out;
}

SparseTensor derivation_apply(const DerivationElement& d, const SparseTensor& t) {
  if (!plain_h_power(t.space) || t.space.g() != d.g)
    throw std::invalid_argument("derivation_apply: tensor must be an H power at the same genus");
  return apply_slices(d.g, d.k, value_slices(d.g, d.tensor), t);
}

DerivationElement derivation_bracket(const DerivationElement& a, const DerivationElement& b) {
  if (a.g != b.g) throw std::invalid_argument("derivation_bracket: genus mismatch");
  if (a.flavor != b.flavor) throw std::invalid_argument("derivation_bracket: flavor mismatch");
  return DerivationElement(a.g, a.k + b.k, bracket_raw(a.g, a.k, a.tensor, b.k, b.tensor),
                           a.flavor);
}

GradedSubspace h_basis(int k, int g) {
  if (k < 1 || g < 1) throw std::invalid_argument("h_basis: bad degree or genus");
  long long cols = 2LL * g * witt_dimension(k + 1, 2 * g);
  if (cols > 2500 || pow_ll(2 * g, k + 2) > 60000)
    throw ResourceLimitError("h_basis: bracket matrix over budget");
  GradedSubspace L = lie_basis(k + 1, g);
  std::vector<SparseVector> ker = nullspace_certified(bracket_matrix(g, L));
  if (ker.size() != h_dimension(k, g))
    throw VerificationError("h_basis: kernel dimension disagrees with the count");
  return GradedSubspace(TensorSpace::h_pow(g, k + 2), k, SubspaceLabel::h,
                        kernel_to_tensors(g, L, ker), /*precertified=*/true);
}

GradedSubspace j_ideal(int k, int g) {
  if (k < 2 || g < 1) throw std::invalid_argument("j_ideal: bad degree or genus");
  long long next = witt_dimension(k + 2, 2 * g) - labute_dimension(k + 2, g);
  long long cols = 2LL * g * (witt_dimension(k + 1, 2 * g) - labute_dimension(k + 1, g));
  if (cols > 1500 || pow_ll(2 * g, k + 2) > 60000)
    throw ResourceLimitError("j_ideal: bracket matrix over budget");
  GradedSubspace I = ideal_basis(k + 1, g);
  if ((long long)(2 * g * I.dim()) != cols)
    throw VerificationError("j_ideal: ideal dimension disagrees with the count");
  std::vector<SparseVector> ker = nullspace_certified(bracket_matrix(g, I));
  if ((long long)ker.size() != cols - next)
    throw VerificationError("j_ideal: kernel dimension disagrees with the count");
  return GradedSubspace(TensorSpace::h_pow(g, k + 2), k, SubspaceLabel::j,
                        kernel_to_tensors(g, I, ker), /*precertified=*/true);
}

std::size_t j_invariant_dimension(int k, int g) {
  if (k < 2 || g < 1) throw std::invalid_argument("j_invariant_dimension: bad degree or genus");
  std::size_t big = h_times_ideal_invariant_dimension(k + 1, g);
  std::size_t img = ideal_invariant_dimension(k + 2, g);
  if (big < img)
    throw VerificationError("j_invariant_dimension: image larger than its source");
  return big - img;
}

std::vector<GradedSubspace> generate_subalgebra(const GradedSubspace& seed, int up_to, int g,
                                                std::size_t budget_cols) {
  if (g < 1 || up_to < 1) throw std::invalid_argument("generate_subalgebra: bad arguments");
  if (seed.degree != 1 || seed.ambient != TensorSpace::h_pow(g, 3))
    throw std::invalid_argument("generate_subalgebra: seed must be a degree-one piece");
  std::vector<std::vector<DerivationElement>> layers(1);
  for (const auto& t : seed.basis) layers[0].emplace_back(g, 1, t);
  std::vector<GradedSubspace> out;
  out.emplace_back(seed.ambient, 1, SubspaceLabel::imtau, seed.basis, /*precertified=*/true);
  for (int d = 2; d <= up_to; ++d) {
    std::size_t cand_count = 0;
    for (int i = 1; 2 * i <= d; ++i) {
      std::size_t a = layers[i - 1].size(), b = layers[d - i - 1].size();
      cand_count += (2 * i == d) ? a * (a - 1) / 2 : a * b;
    }
    if (pow_ll(2 * g, d + 2) > 50000 || cand_count > budget_cols)
      throw ResourceLimitError("generate_subalgebra: bracket layer over budget");
    std::vector<SparseTensor> cands;
    cands.reserve(cand_count);
    for (int i = 1; 2 * i <= d; ++i) {
      const auto& A = layers[i - 1];
      const auto& B = layers[d - i - 1];
      if (2 * i == d) {
        for (std::size_t a = 0; a < A.size(); ++a)
          for (std::size_t b = a + 1; b < A.size(); ++b)
            cands.push_back(bracket_raw(g, i, A[a].tensor, i, A[b].tensor));
      } else {
        for (const auto& ea : A)
          for (const auto& eb : B)
            cands.push_back(bracket_raw(g, i, ea.tensor, d - i, eb.tensor));
      }
    }
    TensorSpace amb = TensorSpace::h_pow(g, d + 2);
    SparseMatrix m;
    m.rows = amb.dim();
    for (const auto& t : cands) m.add_col(t.to_sparse_vector());
    std::vector<std::size_t> keep = independent_columns_certified(m);
    std::vector<DerivationElement> next;
    std::vector<SparseTensor> basis;
    next.reserve(keep.size());
    basis.reserve(keep.size());
    for (std::size_t idx : keep) {
      next.emplace_back(g, d, cands[idx]);  // verifies membership of what we keep
      basis.push_back(std::move(cands[idx]));
    }
    out.emplace_back(amb, d, SubspaceLabel::imtau, std::move(basis), /*precertified=*/true);
    layers.push_back(std::move(next));
  }
  return out;
}

TraceValue trace_map(const DerivationElement& d) {
  if (d.k % 2 == 0) throw std::invalid_argument("trace_map: degree must be odd");
  SparseTensor out(TensorSpace::sym(d.g, d.k));
  for (const auto& [w, c] : d.tensor.terms) {
    int s = mu_code((unsigned char)w[0], (unsigned char)w[1]);
    if (!s) continue;
    out.add_raw(w.substr(2), s > 0 ? c : Rational(-c));
  }
  return {d.k, std::move(out)};
}

}  // namespace mcg
