#include "mcg/chord.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mcg/errors.hpp"

namespace mcg {

namespace {
constexpr int kMaxChords = 6;  // (2k-1)!! growth; 6 gives 10395 diagrams

void check_k(int k) {
  if (k < 1) throw std::invalid_argument("need at least one chord");
  if (k > kMaxChords)
    throw ResourceLimitError("chord diagrams bounded at k = " +
                             std::to_string(kMaxChords));
}
}  // namespace

ChordDiagram ChordDiagram::canonical(std::vector<std::pair<int, int>> raw) {
  for (auto& [i, j] : raw)
    if (i > j) std::swap(i, j);
  std::sort(raw.begin(), raw.end());
  const int n = 2 * static_cast<int>(raw.size());
  std::vector<char> used(n + 1, 0);
  for (const auto& [i, j] : raw) {
    if (i < 1 || j > n || i == j || used[i] || used[j])
      throw std::invalid_argument("not a perfect matching on 1..2k");
    used[i] = used[j] = 1;
  }
  ChordDiagram c;
  c.pairs = std::move(raw);
  return c;
}

int ChordDiagram::partner(int v) const {
  for (const auto& [i, j] : pairs) {
    if (i == v) return j;
    if (j == v) return i;
  }
  throw std::invalid_argument("vertex out of range");
}

std::string ChordDiagram::str() const {
  std::ostringstream os;
  for (const auto& [i, j] : pairs) os << '(' << i << ',' << j << ')';
  return os.str();
}

ChordDiagram ChordDiagram::parse(const std::string& s) {
  std::vector<std::pair<int, int>> raw;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != '(') throw std::invalid_argument("bad diagram literal: " + s);
    std::size_t comma = s.find(',', pos), close = s.find(')', pos);
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      throw std::invalid_argument("bad diagram literal: " + s);
    raw.emplace_back(std::stoi(s.substr(pos + 1, comma - pos - 1)),
                     std::stoi(s.substr(comma + 1, close - comma - 1)));
    pos = close + 1;
  }
  if (raw.empty()) throw std::invalid_argument("empty diagram literal");
  return canonical(std::move(raw));
}

std::vector<ChordDiagram> enumerate_diagrams(int k) {
  check_k(k);
  const int n = 2 * k;
  std::vector<ChordDiagram> out;
  std::vector<char> used(n + 1, 0);
  std::vector<std::pair<int, int>> cur;
  std::function<void()> rec = [&]() {
    int v = 1;
    while (v <= n && used[v]) ++v;
    if (v > n) {
      ChordDiagram c;
      c.pairs = cur;
      out.push_back(std::move(c));
      return;
    }
    used[v] = 1;
    for (int w = v + 1; w <= n; ++w) {
      if (used[w]) continue;
      used[w] = 1;
      cur.emplace_back(v, w);
      rec();
      cur.pop_back();
      used[w] = 0;
    }
    used[v] = 0;
  };
  rec();
  return out;
}

int diagram_sign(const ChordDiagram& c) {
  std::vector<int> p;
  p.reserve(c.n());
  for (const auto& [i, j] : c.pairs) {
    p.push_back(i);
    p.push_back(j);
  }
  int inv = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++inv;
  return inv % 2 ? -1 : 1;
}

SparseTensor a_tensor(const ChordDiagram& c, int g) {
  const int k = c.k();
  SparseTensor t(TensorSpace::h_pow(g, c.n()));
  Word w(c.n(), '\0');
  const Rational plus(diagram_sign(c)), minus(-plus);
  std::function<void(int, bool)> rec = [&](int s, bool neg) {
    if (s == k) {
      t.terms.emplace(w, neg ? minus : plus);
      return;
    }
    const auto [i, j] = c.pairs[s];
    for (int a = 0; a < 2 * g; ++a) {
      w[i - 1] = static_cast<char>(a);
      w[j - 1] = static_cast<char>(a ^ 1);
      rec(s + 1, neg ^ (a & 1));
    }
  };
  rec(0, false);
  return t;
}

Rational alpha_eval(const ChordDiagram& c, const SparseTensor& t) {
  if (t.space.word_len() != static_cast<std::size_t>(c.n()))
    throw std::invalid_argument("alpha degree mismatch");
  for (const auto& f : t.space.factors())
    if (!(f.base.kind == Primitive::H && f.wedge == 1))
      throw std::invalid_argument("alpha needs a plain H tensor power");
  Rational acc(0);
  long long sgn = diagram_sign(c);
  for (const auto& [w, coeff] : t.terms) {
    long long prod = sgn;
    for (const auto& [i, j] : c.pairs) {
      int m = mu_code(static_cast<unsigned char>(w[i - 1]),
                      static_cast<unsigned char>(w[j - 1]));
      if (!m) {
        prod = 0;
        break;
      }
      prod *= m;
    }
    if (prod > 0)
      acc += coeff;
    else if (prod < 0)
      acc -= coeff;
  }
  return acc;
}

int union_components(const ChordDiagram& c, const ChordDiagram& d) {
  if (c.k() != d.k()) throw std::invalid_argument("chord count mismatch");
  const int n = c.n();
  std::vector<int> root(n + 1);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  auto unite = [&](int a, int b) { root[find(a)] = find(b); };
  for (const auto& [i, j] : c.pairs) unite(i, j);
  for (const auto& [i, j] : d.pairs) unite(i, j);
  int comps = 0;
  for (int v = 1; v <= n; ++v)
    if (find(v) == v) ++comps;
  return comps;
}

namespace {

// Genus-1 evaluation of alpha_C on a_D over plain integers.
long long eval_g1(const ChordDiagram& c, const ChordDiagram& d) {
  const int k = d.k(), n = d.n();
  std::vector<char> w(n, 0);
  long long total = 0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    int coeff = 1;
    for (int s = 0; s < k; ++s) {
      const auto [i, j] = d.pairs[s];
      if (mask >> s & 1) {
        w[i - 1] = 1;
        w[j - 1] = 0;
        coeff = -coeff;
      } else {
        w[i - 1] = 0;
        w[j - 1] = 1;
      }
    }
    for (const auto& [i, j] : c.pairs) {
      int m = mu_code(w[i - 1], w[j - 1]);
      if (!m) {
        coeff = 0;
        break;
      }
      coeff *= m;
    }
    total += coeff;
  }
  return static_cast<long long>(diagram_sign(c)) * diagram_sign(d) * total;
}

// sign and component count of a pairing, genus-independent
std::pair<int, int> pairing_shape(const ChordDiagram& c, const ChordDiagram& d) {
  const int r = union_components(c, d);
  const long long v = eval_g1(c, d);
  if (v == (1LL << r)) return {1, r};
  if (v == -(1LL << r)) return {-1, r};
  throw VerificationError("pairing evaluation is not +-2^r at genus 1");
}

}  // namespace

Rational pairing_formula(const ChordDiagram& c, const ChordDiagram& d, int g) {
  auto [sign, r] = pairing_shape(c, d);
  return Rational(sign) * rat_pow(Rational(2 * g), r);
}

Rational pairing_cycle_form(const ChordDiagram& c, const ChordDiagram& d, int g) {
  const int r = union_components(c, d);
  const int sign = (c.k() + r) % 2 ? -1 : 1;
  return Rational(sign) * rat_pow(Rational(2 * g), r);
}

SparseMatrix gram_matrix(int k, int g) {
  check_k(k);
  if (k > 5) throw ResourceLimitError("gram matrix bounded at k = 5");
  auto diags = enumerate_diagrams(k);
  const std::size_t m = diags.size();
  SparseMatrix gram;
  gram.rows = m;
  for (std::size_t j = 0; j < m; ++j) {
    SparseVector col;
    col.dim = m;
    col.entries.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      auto [sign, r] = pairing_shape(diags[i], diags[j]);
      long long v = sign;
      for (int e = 0; e < r; ++e) v *= 2 * g;
      col.entries.emplace_back(i, Rational(static_cast<long>(v)));
    }
    gram.add_col(std::move(col));
  }
  return gram;
}

std::size_t invariant_dimension(int k, int g) {
  return rank_modular_certified(gram_matrix(k, g));
}

SumRelationReport verify_sum_relation(int k, int g) {
  SparseMatrix gram = gram_matrix(k, g);
  const std::size_t m = gram.ncols();
  std::vector<Rational> row_sums(m, Rational(0));
  for (std::size_t j = 0; j < m; ++j)
    for (const auto& [i, c] : gram.cols[j].entries) row_sums[i] += c;
  for (std::size_t i = 1; i < m; ++i)
    if (row_sums[i] != row_sums[0])
      throw VerificationError("row sums of the pairing matrix are not constant");
  SumRelationReport rep;
  rep.row_sum = row_sums[0];
  rep.is_zero = rep.row_sum == 0;
  return rep;
}

std::string CircularDiagram::str() const {
  std::ostringstream os;
  for (const auto& [i, j] : pairs) os << '(' << i << ',' << j << ')';
  return os.str();
}

CircularDiagram circularize(const ChordDiagram& c) {
  const int n = c.n();
  std::vector<std::pair<int, int>> best;
  for (int rot = 0; rot < n; ++rot) {
    std::vector<std::pair<int, int>> cur;
    cur.reserve(c.k());
    for (const auto& [i, j] : c.pairs) {
      int a = (i - 1 + rot) % n + 1, b = (j - 1 + rot) % n + 1;
      cur.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(cur.begin(), cur.end());
    if (rot == 0 || cur < best) best = std::move(cur);
  }
  CircularDiagram out;
  out.pairs = std::move(best);
  return out;
}

namespace {
std::string partner_key(const ChordDiagram& c) {
  std::string key(c.n(), '\0');
  for (const auto& [i, j] : c.pairs) {
    key[i - 1] = static_cast<char>(j);
    key[j - 1] = static_cast<char>(i);
  }
  return key;
}
}  // namespace

DiagramBasis::DiagramBasis(int k) : k_(k), list_(enumerate_diagrams(k)) {
  index_.reserve(list_.size());
  for (std::size_t i = 0; i < list_.size(); ++i) index_.emplace(partner_key(list_[i]), i);
}

std::size_t DiagramBasis::index_of(const ChordDiagram& c) const {
  auto it = index_.find(partner_key(c));
  if (it == index_.end()) throw std::invalid_argument("diagram not in basis");
  return it->second;
}

std::pair<ChordDiagram, Rational> contract_diagram(const ChordDiagram& c, int i, int j,
                                                   int g) {
  const int n = c.n();
  if (!(1 <= i && i < j && j <= n)) throw std::invalid_argument("bad contraction slots");
  auto relabel = [&](int v) { return v - (v > i) - (v > j); };
  const int p = c.partner(i), q = c.partner(j);
  std::vector<std::pair<int, int>> rest;
  for (const auto& [a, b] : c.pairs)
    if (a != i && a != j && b != i && b != j)
      rest.emplace_back(relabel(a), relabel(b));
  if (p == j) {  // the chord itself: trace gives 2g
    ChordDiagram out = ChordDiagram::canonical(std::move(rest));
    Rational coeff(2 * g * diagram_sign(c) * diagram_sign(out));
    return {std::move(out), std::move(coeff)};
  }
  // legs p and q reconnect; sign from the leg orientations
  int eps = ((i < p) == (j < q)) ? 1 : -1;
  int pp = relabel(p), qq = relabel(q);
  if (pp > qq) eps = -eps;  // the fresh chord is oriented p-to-q
  rest.emplace_back(std::min(pp, qq), std::max(pp, qq));
  ChordDiagram out = ChordDiagram::canonical(std::move(rest));
  Rational coeff(eps * diagram_sign(c) * diagram_sign(out));
  return {std::move(out), std::move(coeff)};
}

std::pair<ChordDiagram, int> permute_diagram(const ChordDiagram& c,
                                             const std::vector<int>& perm) {
  const int n = c.n();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("bad permutation");
  std::vector<std::pair<int, int>> moved;
  int flips = 0;
  for (const auto& [i, j] : c.pairs) {
    int a = perm[i - 1], b = perm[j - 1];
    if (a > b) ++flips;
    moved.emplace_back(std::min(a, b), std::max(a, b));
  }
  ChordDiagram out = ChordDiagram::canonical(std::move(moved));
  int sign = diagram_sign(c) * diagram_sign(out) * (flips % 2 ? -1 : 1);
  return {std::move(out), sign};
}

std::pair<ChordDiagram, int> insert_omega(const ChordDiagram& c, int i, int j) {
  const int n = c.n() + 2;
  if (!(1 <= i && i < j && j <= n)) throw std::invalid_argument("bad insertion slots");
  std::vector<int> slot;  // old position v sits at slot[v-1] in the new diagram
  for (int v = 1; v <= n; ++v)
    if (v != i && v != j) slot.push_back(v);
  std::vector<std::pair<int, int>> moved;
  for (const auto& [a, b] : c.pairs) moved.emplace_back(slot[a - 1], slot[b - 1]);
  moved.emplace_back(i, j);
  ChordDiagram out = ChordDiagram::canonical(std::move(moved));
  int sign = diagram_sign(c) * diagram_sign(out);
  return {std::move(out), sign};
}

}  // namespace mcg
