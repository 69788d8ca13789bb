#include "mcg/freelie.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mcg/errors.hpp"

namespace mcg {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// rotate the first i slots one step: slot m -> m+1, slot i-1 wraps to 0
std::vector<int> sigma_rot(int i, int k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  for (int m = 0; m + 1 < i; ++m) p[m] = m + 1;
  p[i - 1] = 0;
  return p;
}

// cycle the last m+1 slots: slot k-m-1 jumps to the end, the tail shifts left
std::vector<int> rho_cycle(int m, int k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  p[k - m - 1] = k - 1;
  for (int s = k - m; s < k; ++s) p[s] = s - 1;
  return p;
}

using SignedPerms = std::vector<std::pair<std::vector<int>, int>>;

// Expansion of the product (1 - r_n)...(1 - r_1) where rhos lists r_1..r_n in
// application order (r_1 acts first). Move-to maps compose left to right.
SignedPerms expand_one_minus(const std::vector<std::vector<int>>& rhos, int k) {
  SignedPerms out;
  out.reserve(std::size_t(1) << rhos.size());
  for (std::uint32_t mask = 0; mask < (1u << rhos.size()); ++mask) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    int sign = 1;
    for (std::size_t i = 0; i < rhos.size(); ++i)
      if (mask & (1u << i)) {
        sign = -sign;
        for (int m = 0; m < k; ++m) perm[m] = rhos[i][perm[m]];
      }
    out.emplace_back(std::move(perm), sign);
  }
  return out;
}

bool is_h_power(const TensorSpace& s) {
  for (const auto& f : s.factors())
    if (!(f.base.kind == Primitive::H && f.wedge == 1)) return false;
  return true;
}

void require_h_power(const SparseTensor& t, const char* who) {
  if (!is_h_power(t.space))
    throw std::invalid_argument(std::string(who) + ": expected a plain H tensor power");
}

}  // namespace

const LieProjector& lie_projector(int k) {
  static std::map<int, LieProjector> cache;
  static std::mutex mu;
  if (k < 1 || k > 16) throw std::invalid_argument("lie_projector: degree out of range");
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
  }
  std::vector<std::vector<int>> sigmas;
  for (int i = 2; i <= k; ++i) sigmas.push_back(sigma_rot(i, k));
  LieProjector p;
  p.k = k;
  p.terms = expand_one_minus(sigmas, k);
  if (p.terms.size() != (std::size_t(1) << (k - 1)))
    throw VerificationError("lie projector: wrong term count");
  std::vector<int> id(k);
  std::iota(id.begin(), id.end(), 0);
  long id_coeff = 0;
  for (const auto& [perm, s] : p.terms)
    if (perm == id) id_coeff += s;
  if (id_coeff != 1) throw VerificationError("lie projector: identity coefficient is not 1");
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(k, std::move(p)).first->second;
}

SparseTensor apply_projector(int k, const SparseTensor& t) {
  require_h_power(t, "apply_projector");
  if ((int)t.space.factors().size() != k)
    throw std::invalid_argument("apply_projector: degree mismatch");
  const LieProjector& p = lie_projector(k);
  SparseTensor acc(t.space);
  for (const auto& [perm, s] : p.terms) {
    SparseTensor pt = permute(t, perm);
    if (s > 0)
      acc += pt;
    else
      acc -= pt;
  }
  return acc;
}

bool is_lie_element(const SparseTensor& t) {
  require_h_power(t, "is_lie_element");
  int k = (int)t.space.factors().size();
  if (k == 0) return t.is_zero();
  SparseTensor lhs = apply_projector(k, t);
  SparseTensor rhs = st_scale(t, Rational(k));
  return st_equal(lhs, rhs);
}

SparseTensor bracket_tensors(const SparseTensor& a, const SparseTensor& b) {
  require_h_power(a, "bracket_tensors");
  require_h_power(b, "bracket_tensors");
  SparseTensor out = tensor_product(a, b);
  out -= tensor_product(b, a);
  return out;
}

int mobius(int n) {
  if (n < 1) throw std::invalid_argument("mobius: positive argument required");
  int result = 1;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      result = -result;
    }
  if (n > 1) result = -result;
  return result;
}

long long witt_dimension(int k, int n) {
  if (k < 1 || n < 1) throw std::invalid_argument("witt_dimension: bad arguments");
  mpz_class acc = 0;
  for (int d = 1; d <= k; ++d)
    if (k % d == 0) {
      mpz_class pw;
      mpz_ui_pow_ui(pw.get_mpz_t(), (unsigned long)n, (unsigned long)(k / d));
      acc += mobius(d) * pw;
    }
  mpz_class q = acc / k;
  if (q * k != acc) throw VerificationError("witt_dimension: necklace sum not divisible");
  if (!q.fits_slong_p()) throw ResourceLimitError("witt_dimension: result overflows");
  return q.get_si();
}

long long labute_dimension(int k, int g) {
  if (k < 1 || g < 1) throw std::invalid_argument("labute_dimension: bad arguments");
  std::vector<mpz_class> s(k + 1);
  s[0] = 2;
  if (k >= 1) s[1] = 2 * g;
  for (int m = 2; m <= k; ++m) s[m] = 2 * g * s[m - 1] - s[m - 2];
  mpz_class acc = 0;
  for (int d = 1; d <= k; ++d)
    if (k % d == 0) acc += mobius(d) * s[k / d];
  mpz_class q = acc / k;
  if (q * k != acc) throw VerificationError("labute_dimension: sum not divisible");
  if (!q.fits_slong_p()) throw ResourceLimitError("labute_dimension: result overflows");
  return q.get_si();
}

std::vector<Word> lyndon_words(int k, int alphabet) {
  if (k < 1 || alphabet < 1 || alphabet > 127)
    throw std::invalid_argument("lyndon_words: bad arguments");
  std::vector<Word> out;
  std::string w(1, char(0));
  while (!w.empty()) {
    if ((int)w.size() == k) out.push_back(w);
    std::size_t m = w.size();
    while ((int)w.size() < k) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == char(alphabet - 1)) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  return out;
}

namespace {

SparseTensor lyndon_bracket_raw(const Word& w, int g) {
  if (w.size() == 1) return basis_tensor(TensorSpace::h_pow(g, 1), w);
  // standard factorization: v is the lex least proper suffix
  std::size_t split = w.size() - 1;
  for (std::size_t i = w.size() - 1; i >= 1; --i)
    if (w.compare(i, std::string::npos, w, split, std::string::npos) <= 0) split = i;
  return bracket_tensors(lyndon_bracket_raw(w.substr(0, split), g),
                         lyndon_bracket_raw(w.substr(split), g));
}

}  // namespace

SparseTensor lyndon_bracket_tensor(const Word& w, int g) {
  if (w.empty()) throw std::invalid_argument("lyndon_bracket_tensor: empty word");
  for (char c : w)
    if (c < 0 || c >= 2 * g)
      throw std::invalid_argument("lyndon_bracket_tensor: letter out of alphabet");
  SparseTensor t = lyndon_bracket_raw(w, g);
  auto it = t.terms.begin();
  if (it == t.terms.end() || it->first != w || it->second != 1)
    throw VerificationError("lyndon bracketing lost triangularity");
  return t;
}

std::string label_str(SubspaceLabel l) {
  switch (l) {
    case SubspaceLabel::L: return "L";
    case SubspaceLabel::I: return "I";
    case SubspaceLabel::Lg: return "L_g";
    case SubspaceLabel::h: return "h";
    case SubspaceLabel::j: return "j";
    case SubspaceLabel::imtau: return "imtau";
    case SubspaceLabel::custom: return "custom";
  }
  throw std::invalid_argument("label_str: unknown label");
}

namespace {

std::optional<SubspaceLabel> label_parse(const std::string& s) {
  for (SubspaceLabel l : {SubspaceLabel::L, SubspaceLabel::I, SubspaceLabel::Lg,
                          SubspaceLabel::h, SubspaceLabel::j, SubspaceLabel::imtau,
                          SubspaceLabel::custom})
    if (label_str(l) == s) return l;
  return std::nullopt;
}

}  // namespace

GradedSubspace::GradedSubspace(TensorSpace amb, int deg, SubspaceLabel lab,
                               std::vector<SparseTensor> vecs, bool precertified)
    : ambient(std::move(amb)), degree(deg), label(lab), basis(std::move(vecs)) {
  for (const auto& t : basis)
    if (t.space != ambient)
      throw std::invalid_argument("graded subspace: basis vector in wrong ambient space");
  if (precertified || basis.empty()) return;
  // distinct leading words certify independence outright
  bool usable = true;
  std::vector<Word> lead;
  lead.reserve(basis.size());
  for (const auto& t : basis) {
    if (t.terms.empty()) {
      usable = false;  // the zero vector can never join an independent family
      break;
    }
    lead.push_back(t.terms.begin()->first);
  }
  if (usable) {
    std::sort(lead.begin(), lead.end());
    if (std::adjacent_find(lead.begin(), lead.end()) == lead.end()) return;
  }
  SparseMatrix m(ambient.dim());
  for (const auto& t : basis) m.add_col(t.to_sparse_vector());
  if (rank_modular_certified(m) != basis.size())
    throw VerificationError("graded subspace: basis is not linearly independent");
}

GradedSubspace lie_basis(int k, int g) {
  if (k < 1 || g < 1) throw std::invalid_argument("lie_basis: bad degree or genus");
  if (k > 8 || g > 4)
    throw ResourceLimitError("lie_basis: outside the supported range k <= 8, g <= 4");
  std::vector<Word> words = lyndon_words(k, 2 * g);
  if ((long long)words.size() != witt_dimension(k, 2 * g))
    throw VerificationError("lie_basis: Lyndon count disagrees with the Witt number");
  // materialized term count is |basis| * 2^{k-1} in the worst case
  if (double(words.size()) * double(1u << (k - 1)) > 3.0e6)
    throw ResourceLimitError("lie_basis: tensor materialization over budget");
  std::vector<SparseTensor> basis;
  basis.reserve(words.size());
  for (const auto& w : words) basis.push_back(lyndon_bracket_tensor(w, g));
  return GradedSubspace(TensorSpace::h_pow(g, k), k, SubspaceLabel::L, std::move(basis));
}

namespace {

// [e_c, w] over all generators e_c and all w in prev: spans the next ideal
// degree since the ideal is reached by right-normed brackets from omega_0
std::vector<SparseTensor> ideal_next_level(int g, const std::vector<SparseTensor>& prev) {
  std::vector<SparseTensor> out;
  out.reserve(2 * g * prev.size());
  TensorSpace h1 = TensorSpace::h_pow(g, 1);
  for (int c = 0; c < 2 * g; ++c) {
    SparseTensor e = basis_tensor(h1, Word(1, char(c)));
    for (const auto& w : prev) out.push_back(bracket_tensors(e, w));
  }
  return out;
}

}  // namespace

GradedSubspace ideal_basis(int k, int g) {
  if (k < 2 || g < 1) throw std::invalid_argument("ideal_basis: bad degree or genus");
  if (k > 8 || g > 4)
    throw ResourceLimitError("ideal_basis: outside the supported range k <= 8, g <= 4");
  std::vector<SparseTensor> basis{omega0_tensor(g)};
  for (int m = 3; m <= k; ++m) {
    if (2 * g * basis.size() > 600 || ipow(2 * g, m) > 60000)
      throw ResourceLimitError("ideal_basis: candidate family over budget");
    std::vector<SparseTensor> cands = ideal_next_level(g, basis);
    SparseMatrix mat(TensorSpace::h_pow(g, m).dim());
    for (const auto& t : cands) mat.add_col(t.to_sparse_vector());
    std::vector<std::size_t> keep = independent_columns_certified(mat);
    basis.clear();
    basis.reserve(keep.size());
    for (std::size_t j : keep) basis.push_back(std::move(cands[j]));
  }
  return GradedSubspace(TensorSpace::h_pow(g, k), k, SubspaceLabel::I, std::move(basis),
                        /*precertified=*/true);
}

std::size_t ideal_dimension(int k, int g) {
  if (k < 2 || g < 1) throw std::invalid_argument("ideal_dimension: bad degree or genus");
  if (k == 2) return 1;
  if (ipow(2 * g, k - 2) > 2000 || ipow(2 * g, k) > 200000)
    throw ResourceLimitError("ideal_dimension: spanning family over budget");
  // right-normed spanning family, no intermediate reduction
  std::vector<SparseTensor> span{omega0_tensor(g)};
  for (int m = 3; m <= k; ++m) span = ideal_next_level(g, span);
  SparseMatrix mat(TensorSpace::h_pow(g, k).dim());
  for (const auto& t : span) mat.add_col(t.to_sparse_vector());
  return rank_modular_certified(mat);
}

LgQuotient::Parts LgQuotient::make_parts(int k, int g) {
  if (k < 2 || g < 1) throw std::invalid_argument("quotient_Lg: bad degree or genus");
  long long total = witt_dimension(k, 2 * g);
  if (total > 400 || ipow(2 * g, k) > 60000)
    throw ResourceLimitError("quotient_Lg: echelon over budget");
  GradedSubspace ideal = ideal_basis(k, g);
  TensorSpace ambient = TensorSpace::h_pow(g, k);
  Parts parts{ideal.dim(), {}, Echelon(ambient.dim() + total, ambient.dim())};
  std::size_t tail = ambient.dim();
  auto tailed = [&](const SparseTensor& t) {
    SparseVector v = t.to_sparse_vector();
    v.dim = ambient.dim() + total;
    v.entries.emplace_back(tail, Rational(1));
    return v;
  };
  for (const auto& t : ideal.basis) {
    if (!parts.ech.insert(tailed(t)))
      throw VerificationError("quotient_Lg: ideal basis failed to embed");
    ++tail;
  }
  for (const auto& w : lyndon_words(k, 2 * g)) {
    SparseTensor t = lyndon_bracket_tensor(w, g);
    if (parts.ech.insert(tailed(t))) {
      parts.comp.push_back(std::move(t));
      ++tail;
    }
  }
  if ((long long)(parts.ideal_dim + parts.comp.size()) != total)
    throw VerificationError("quotient_Lg: ideal plus complement misses L(k)");
  if ((long long)parts.comp.size() != labute_dimension(k, g))
    throw VerificationError("quotient_Lg: complement dimension contradicts the necklace count");
  return parts;
}

LgQuotient::LgQuotient(Parts p, int k, int g)
    : k_(k),
      g_(g),
      ambient_(TensorSpace::h_pow(g, k)),
      ideal_dim_(p.ideal_dim),
      comp_(ambient_, k, SubspaceLabel::Lg, std::move(p.comp), /*precertified=*/true),
      ech_(std::move(p.ech)) {}

LgQuotient::LgQuotient(int k, int g) : LgQuotient(make_parts(k, g), k, g) {}

std::vector<Rational> LgQuotient::coordinates(const SparseTensor& t) const {
  if (t.space != ambient_)
    throw std::invalid_argument("LgQuotient: tensor in wrong ambient space");
  SparseVector v = t.to_sparse_vector();
  v.dim = ech_.rows();
  SparseVector r = ech_.reduce(std::move(v));
  std::vector<Rational> out(comp_.dim(), Rational(0));
  for (const auto& [i, c] : r.entries) {
    if (i < ambient_.dim())
      throw std::invalid_argument("LgQuotient: tensor not in L(k)");
    if (i >= ambient_.dim() + ideal_dim_) out[i - ambient_.dim() - ideal_dim_] = -c;
  }
  return out;
}

SparseTensor LgQuotient::project(const SparseTensor& t) const {
  std::vector<Rational> coords = coordinates(t);
  SparseTensor out(ambient_);
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] != 0) out += st_scale(comp_.basis[i], coords[i]);
  return out;
}

LgQuotient quotient_Lg(int k, int g) { return LgQuotient(k, g); }

// ---- invariant parts in chord-diagram coordinates ----

namespace {

// coordinate matrix of a signed place-permutation operator on the span of
// the diagram tensors: column D accumulates the signed images of a_D
SparseMatrix diagram_op_matrix(const DiagramBasis& basis, const SignedPerms& terms) {
  SparseMatrix out(basis.size());
  std::vector<int> perm1;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    std::map<std::size_t, long> acc;
    for (const auto& [perm, s] : terms) {
      perm1.resize(perm.size());
      for (std::size_t v = 0; v < perm.size(); ++v) perm1[v] = perm[v] + 1;
      auto [d2, s2] = permute_diagram(basis.at(j), perm1);
      acc[basis.index_of(d2)] += (long)s * s2;
    }
    SparseVector col(basis.size());
    for (const auto& [i, c] : acc)
      if (c != 0) col.entries.emplace_back(i, Rational(c));
    out.add_col(std::move(col));
  }
  return out;
}

// shift every permutation one slot right, fixing slot 0
SignedPerms shift_perms(const SignedPerms& terms) {
  SignedPerms out;
  out.reserve(terms.size());
  for (const auto& [perm, s] : terms) {
    std::vector<int> p(perm.size() + 1);
    p[0] = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) p[i + 1] = perm[i] + 1;
    out.emplace_back(std::move(p), s);
  }
  return out;
}

// rank of the operator induced on the span of invariant tensors, where an
// idempotent-up-to-scale operator op (op^2 = scale * op) acts through the
// coordinate matrix M and G is the pairing Gram matrix: the image dimension
// is rank(G M), and rank(G) - rank(G (M - scale)) recomputes it through the
// kernel; the two routes must agree.
std::size_t induced_image_dim(const SparseMatrix& gram, const SparseMatrix& op, long scale) {
  std::size_t via_image = rank_modular_certified(mat_mul(gram, op));
  SparseMatrix shifted = mat_add_scaled_identity(op, Rational(-scale));
  std::size_t via_kernel =
      rank_modular_certified(gram) - rank_modular_certified(mat_mul(gram, shifted));
  if (via_image != via_kernel)
    throw VerificationError("invariant dimension: image and kernel routes disagree");
  return via_image;
}

SignedPerms psi_perms(int k) {
  std::vector<std::vector<int>> rhos;
  for (int m = 2; m <= k - 1; ++m) rhos.push_back(rho_cycle(m, k));
  return expand_one_minus(rhos, k);
}

// diagrams on `slots` slots that contain the chord (slots-1, slots)
std::vector<ChordDiagram> diagrams_with_last_chord(int slots) {
  std::vector<ChordDiagram> out;
  if (slots == 2) {
    out.push_back(ChordDiagram({{1, 2}}));
    return out;
  }
  for (const auto& e : enumerate_diagrams((slots - 2) / 2)) {
    auto pairs = e.pairs;
    pairs.emplace_back(slots - 1, slots);
    out.push_back(ChordDiagram(pairs));
  }
  return out;
}

std::size_t span_image_dim(const SparseMatrix& gram, const DiagramBasis& basis,
                           const std::vector<ChordDiagram>& cands, const SignedPerms& op) {
  SparseMatrix m(basis.size());
  std::vector<int> perm1;
  for (const auto& d : cands) {
    std::map<std::size_t, long> acc;
    for (const auto& [perm, s] : op) {
      perm1.resize(perm.size());
      for (std::size_t v = 0; v < perm.size(); ++v) perm1[v] = perm[v] + 1;
      auto [d2, s2] = permute_diagram(d, perm1);
      acc[basis.index_of(d2)] += (long)s * s2;
    }
    SparseVector col(basis.size());
    for (const auto& [i, c] : acc)
      if (c != 0) col.entries.emplace_back(i, Rational(c));
    m.add_col(std::move(col));
  }
  return rank_modular_certified(mat_mul(gram, m));
}

}  // namespace

std::size_t lie_invariant_dimension(int m, int g) {
  if (m < 1 || g < 1) throw std::invalid_argument("lie_invariant_dimension: bad arguments");
  if (m % 2) return 0;  // no invariants in odd tensor degree
  DiagramBasis basis(m / 2);
  SparseMatrix gram = gram_matrix(m / 2, g);
  SparseMatrix p = diagram_op_matrix(basis, lie_projector(m).terms);
  return induced_image_dim(gram, p, m);
}

std::size_t h_times_lie_invariant_dimension(int m, int g) {
  if (m < 1 || g < 1)
    throw std::invalid_argument("h_times_lie_invariant_dimension: bad arguments");
  if (m % 2 == 0) return 0;
  DiagramBasis basis((m + 1) / 2);
  SparseMatrix gram = gram_matrix((m + 1) / 2, g);
  SparseMatrix q = diagram_op_matrix(basis, shift_perms(lie_projector(m).terms));
  return induced_image_dim(gram, q, m);
}

std::size_t ideal_invariant_dimension(int k, int g) {
  if (k < 2 || g < 1) throw std::invalid_argument("ideal_invariant_dimension: bad arguments");
  if (k % 2) return 0;
  DiagramBasis basis(k / 2);
  SparseMatrix gram = gram_matrix(k / 2, g);
  return span_image_dim(gram, basis, diagrams_with_last_chord(k), psi_perms(k));
}

std::size_t h_times_ideal_invariant_dimension(int k, int g) {
  if (k < 2 || g < 1)
    throw std::invalid_argument("h_times_ideal_invariant_dimension: bad arguments");
  if (k % 2 == 0) return 0;
  int slots = k + 1;
  DiagramBasis basis(slots / 2);
  SparseMatrix gram = gram_matrix(slots / 2, g);
  // invariant candidates: the H slot and the k-2 generator slots match among
  // themselves (slots 1..k-1), the symplectic block sits on (k, k+1)
  std::vector<ChordDiagram> cands;
  for (const auto& e : enumerate_diagrams((k - 1) / 2)) {
    auto pairs = e.pairs;
    pairs.emplace_back(slots - 1, slots);
    cands.push_back(ChordDiagram(pairs));
  }
  return span_image_dim(gram, basis, cands, shift_perms(psi_perms(k)));
}

std::size_t quotient_invariant_dimension(int k, int g) {
  std::size_t lie = lie_invariant_dimension(k, g);
  std::size_t ideal = ideal_invariant_dimension(k, g);
  if (ideal > lie)
    throw VerificationError("quotient invariants: ideal exceeds the enclosing space");
  return lie - ideal;
}

// ---- cache ----

void save_subspace(const std::string& path, const GradedSubspace& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_subspace: cannot open " + path);
  out << "mcgcalc-subspace 1\n";
  out << "g " << s.ambient.g() << "\n";
  out << "degree " << s.degree << "\n";
  out << "label " << label_str(s.label) << "\n";
  out << "basis_count " << s.basis.size() << "\n";
  for (const auto& t : s.basis) {
    out << t.terms.size();
    for (const auto& [w, c] : t.terms)
      out << " " << t.space.word_str(w) << " " << rat_str(c);
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_subspace: write failed for " + path);
}

std::optional<GradedSubspace> load_subspace(const std::string& path, int g, int degree,
                                            SubspaceLabel label) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mcgcalc-subspace" || version != 1)
    return std::nullopt;
  std::string key, label_text;
  int file_g = -1, file_degree = -1;
  std::size_t count = 0;
  if (!(in >> key >> file_g) || key != "g") return std::nullopt;
  if (!(in >> key >> file_degree) || key != "degree") return std::nullopt;
  if (!(in >> key >> label_text) || key != "label") return std::nullopt;
  if (!(in >> key >> count) || key != "basis_count") return std::nullopt;
  auto file_label = label_parse(label_text);
  if (file_g != g || file_degree != degree || !file_label || *file_label != label)
    return std::nullopt;
  std::vector<SparseTensor> basis;
  basis.reserve(count);
  std::optional<TensorSpace> ambient;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t nterms = 0;
    if (!(in >> nterms)) return std::nullopt;
    std::vector<std::pair<std::string, std::string>> raw(nterms);
    for (auto& [ws, cs] : raw)
      if (!(in >> ws >> cs)) return std::nullopt;
    if (!ambient && !raw.empty()) {
      // all cached subspaces here live in plain H powers; read the arity off
      // the first word (factor separators are dots)
      int arity = raw[0].first.empty() ? 0
                                       : 1 + (int)std::count(raw[0].first.begin(),
                                                             raw[0].first.end(), '.');
      ambient = TensorSpace::h_pow(g, arity);
    }
    if (!ambient) continue;  // zero tensors before any sized one: resolve later
    SparseTensor t(*ambient);
    try {
      for (const auto& [ws, cs] : raw) t.add_canonical(ambient->word_parse(ws), rat_parse(cs));
    } catch (const std::exception&) {
      return std::nullopt;
    }
    basis.push_back(std::move(t));
  }
  if (!ambient) ambient = TensorSpace::h_pow(g, degree);
  while (basis.size() < count) basis.push_back(SparseTensor(*ambient));
  return GradedSubspace(*ambient, degree, label, std::move(basis));
}

}  // namespace mcg
