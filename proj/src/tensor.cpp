#include "mcg/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace mcg {

int mu_code(int a, int b) {
  if ((a & 1) == 0 && b == a + 1) return 1;
  if ((a & 1) == 1 && b == a - 1) return -1;
  return 0;
}

int partner_code(int a) { return a ^ 1; }

std::string h_code_name(int code) {
  return ((code & 1) == 0 ? "x" : "y") + std::to_string(code / 2 + 1);
}

int h_code_parse(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y'))
    throw std::invalid_argument("bad basis name: " + name);
  int idx = std::stoi(name.substr(1));
  if (idx < 1) throw std::invalid_argument("bad basis index: " + name);
  return 2 * (idx - 1) + (name[0] == 'y' ? 1 : 0);
}

namespace {

unsigned long long binom(unsigned long long n, unsigned long long k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned long long r = 1;
  for (unsigned long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Rank of a strictly increasing index tuple among C(n, m) in lex order.
std::size_t wedge_rank(const std::vector<std::size_t>& ix, std::size_t n) {
  const std::size_t m = ix.size();
  std::size_t rank = 0, prev = 0;
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t v = prev; v < ix[t]; ++v) rank += binom(n - 1 - v, m - 1 - t);
    prev = ix[t] + 1;
  }
  return rank;
}

void wedge_unrank(std::size_t rank, std::size_t n, std::size_t m,
                  std::vector<std::size_t>& out) {
  out.clear();
  std::size_t v = 0;
  for (std::size_t t = 0; t < m; ++t) {
    while (true) {
      std::size_t block = binom(n - 1 - v, m - 1 - t);
      if (rank < block) break;
      rank -= block;
      ++v;
    }
    out.push_back(v++);
  }
}

struct PrimTable {
  std::vector<Word> words;
  std::unordered_map<Word, std::uint32_t> rank;
};

PrimTable make_h_table(int g) {
  PrimTable t;
  for (int c = 0; c < 2 * g; ++c) {
    Word w(1, static_cast<char>(c));
    t.rank[w] = t.words.size();
    t.words.push_back(w);
  }
  return t;
}

PrimTable make_w3_table(int g) {
  PrimTable t;
  for (int a = 0; a < 2 * g; ++a)
    for (int b = a + 1; b < 2 * g; ++b)
      for (int c = b + 1; c < 2 * g; ++c) {
        Word w;
        w.push_back(static_cast<char>(a));
        w.push_back(static_cast<char>(b));
        w.push_back(static_cast<char>(c));
        t.rank[w] = t.words.size();
        t.words.push_back(w);
      }
  return t;
}

PrimTable make_sym_table(int g, int m) {
  PrimTable t;
  Word w(m, '\0');
  std::function<void(int, int)> rec = [&](int pos, int from) {
    if (pos == m) {
      t.rank[w] = t.words.size();
      t.words.push_back(w);
      return;
    }
    for (int c = from; c < 2 * g; ++c) {
      w[pos] = static_cast<char>(c);
      rec(pos + 1, c);
    }
  };
  rec(0, 0);
  return t;
}

PrimTable make_u_table(int g);  // defined after the projector cache

struct TableKey {
  int g;
  Primitive::Kind kind;
  int m;
  bool operator<(const TableKey& o) const {
    return std::tie(g, kind, m) < std::tie(o.g, o.kind, o.m);
  }
};

std::mutex table_mutex;

const PrimTable& prim_table(int g, Primitive p) {
  static std::map<TableKey, PrimTable> cache;
  TableKey key{g, p.kind, p.kind == Primitive::Sym ? p.m : 1};
  {
    std::lock_guard<std::mutex> lock(table_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  // Build outside the lock: the U table re-enters for the wedge^3 table.
  PrimTable t;
  switch (p.kind) {
    case Primitive::H: t = make_h_table(g); break;
    case Primitive::W3: t = make_w3_table(g); break;
    case Primitive::Sym: t = make_sym_table(g, p.m); break;
    case Primitive::U: t = make_u_table(g); break;
  }
  std::lock_guard<std::mutex> lock(table_mutex);
  return cache.emplace(key, std::move(t)).first->second;
}

// Canonicalize one primitive block in place; returns the sign (0 kills it).
int canon_block(Primitive p, char* b) {
  switch (p.kind) {
    case Primitive::H:
      return 1;
    case Primitive::W3: {
      int sign = 1;
      for (int i = 0; i < 2; ++i)  // 3-element insertion sort, parity tracked
        for (int j = 0; j < 2 - i; ++j)
          if (b[j] > b[j + 1]) {
            std::swap(b[j], b[j + 1]);
            sign = -sign;
          }
      if (b[0] == b[1] || b[1] == b[2]) return 0;
      return sign;
    }
    case Primitive::U:
      return 1;  // U words are stored canonically by construction
    case Primitive::Sym:
      std::sort(b, b + p.m);
      return 1;
  }
  return 1;
}

}  // namespace

TensorSpace::TensorSpace(int g, std::vector<Factor> factors)
    : g_(g), factors_(std::move(factors)) {
  if (g < 1) throw std::invalid_argument("genus must be at least 1");
  fdims_.reserve(factors_.size());
  for (const auto& f : factors_) {
    if (f.wedge < 1 || (f.base.kind == Primitive::Sym && f.base.m < 1))
      throw std::invalid_argument("bad factor shape");
    std::size_t base_dim = prim_table(g_, f.base).words.size();
    std::size_t d = f.wedge == 1 ? base_dim : binom(base_dim, f.wedge);
    fdims_.push_back(d);
    word_len_ += f.sub_len();
  }
  strides_.assign(factors_.size(), 1);
  for (std::size_t i = factors_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * fdims_[i];
  dim_ = factors_.empty() ? 1 : strides_[0] * fdims_[0];
}

TensorSpace TensorSpace::h_pow(int g, int n) {
  std::vector<Factor> fs(n, Factor{{Primitive::H}, 1});
  return TensorSpace(g, std::move(fs));
}

std::size_t TensorSpace::factor_index(std::size_t f, const char* bytes) const {
  const Factor& fac = factors_[f];
  const PrimTable& tab = prim_table(g_, fac.base);
  const int bl = fac.base.sub_len();
  if (fac.wedge == 1) {
    auto it = tab.rank.find(Word(bytes, bl));
    if (it == tab.rank.end()) throw std::invalid_argument("word not in basis");
    return it->second;
  }
  std::vector<std::size_t> ix(fac.wedge);
  for (int t = 0; t < fac.wedge; ++t) {
    auto it = tab.rank.find(Word(bytes + t * bl, bl));
    if (it == tab.rank.end()) throw std::invalid_argument("word not in basis");
    ix[t] = it->second;
  }
  return wedge_rank(ix, tab.words.size());
}

void TensorSpace::factor_unrank(std::size_t f, std::size_t idx, char* out) const {
  const Factor& fac = factors_[f];
  const PrimTable& tab = prim_table(g_, fac.base);
  const int bl = fac.base.sub_len();
  if (fac.wedge == 1) {
    const Word& w = tab.words.at(idx);
    std::copy(w.begin(), w.end(), out);
    return;
  }
  std::vector<std::size_t> ix;
  wedge_unrank(idx, tab.words.size(), fac.wedge, ix);
  for (int t = 0; t < fac.wedge; ++t) {
    const Word& w = tab.words.at(ix[t]);
    std::copy(w.begin(), w.end(), out + t * bl);
  }
}

std::size_t TensorSpace::word_index(const Word& w) const {
  if (w.size() != word_len_) throw std::invalid_argument("word length mismatch");
  std::size_t idx = 0, off = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    idx += factor_index(f, w.data() + off) * strides_[f];
    off += factors_[f].sub_len();
  }
  return idx;
}

Word TensorSpace::word_at(std::size_t idx) const {
  Word w(word_len_, '\0');
  std::size_t off = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    std::size_t fi = idx / strides_[f];
    idx %= strides_[f];
    factor_unrank(f, fi, w.data() + off);
    off += factors_[f].sub_len();
  }
  return w;
}

std::pair<Word, int> TensorSpace::canonicalize(Word raw) const {
  if (raw.size() != word_len_) throw std::invalid_argument("word length mismatch");
  int sign = 1;
  std::size_t off = 0;
  for (const Factor& fac : factors_) {
    char* base = raw.data() + off;
    const int bl = fac.base.sub_len();
    for (int t = 0; t < fac.wedge; ++t) {
      int s = canon_block(fac.base, base + t * bl);
      if (s == 0) return {Word(), 0};
      sign *= s;
    }
    if (fac.wedge > 1) {
      // insertion sort of the blocks by byte order (== basis order), parity
      for (int t = 1; t < fac.wedge; ++t)
        for (int u = t; u > 0; --u) {
          int cmp = std::memcmp(base + u * bl, base + (u - 1) * bl, bl);
          if (cmp > 0) break;
          if (cmp == 0) return {Word(), 0};
          for (int b = 0; b < bl; ++b) std::swap(base[u * bl + b], base[(u - 1) * bl + b]);
          sign = -sign;
        }
    }
    off += fac.sub_len();
  }
  return {std::move(raw), sign};
}

std::string TensorSpace::word_str(const Word& w) const {
  std::ostringstream os;
  std::size_t off = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    if (f) os << '.';
    const Factor& fac = factors_[f];
    const int bl = fac.base.sub_len();
    const char join = fac.base.kind == Primitive::Sym ? '*' : '^';
    for (int t = 0; t < fac.wedge; ++t) {
      if (t) os << '|';
      for (int b = 0; b < bl; ++b) {
        if (b) os << join;
        os << h_code_name(static_cast<unsigned char>(w[off + t * bl + b]));
      }
    }
    off += fac.sub_len();
  }
  return os.str();
}

namespace {
std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t nxt = s.find(sep, pos);
    out.push_back(s.substr(pos, nxt - pos));
    if (nxt == std::string::npos) break;
    pos = nxt + 1;
  }
  return out;
}
}  // namespace

Word TensorSpace::word_parse(const std::string& s) const {
  if (factors_.empty()) {
    if (!s.empty()) throw std::invalid_argument("scalar space word must be empty");
    return Word();
  }
  auto parts = split(s, '.');
  if (parts.size() != factors_.size())
    throw std::invalid_argument("factor count mismatch in word: " + s);
  Word w;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const Factor& fac = factors_[f];
    const char join = fac.base.kind == Primitive::Sym ? '*' : '^';
    auto blocks = split(parts[f], '|');
    if (static_cast<int>(blocks.size()) != fac.wedge)
      throw std::invalid_argument("block count mismatch in word: " + s);
    for (const auto& blk : blocks) {
      auto names = split(blk, join);
      if (static_cast<int>(names.size()) != fac.base.sub_len())
        throw std::invalid_argument("entry count mismatch in word: " + s);
      for (const auto& nm : names) w.push_back(static_cast<char>(h_code_parse(nm)));
    }
  }
  return w;
}

void SparseTensor::add_canonical(const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = terms.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

void SparseTensor::add_raw(Word raw, const Rational& c) {
  auto [w, s] = space.canonicalize(std::move(raw));
  if (s == 0) return;
  add_canonical(w, s > 0 ? c : Rational(-c));
}

SparseTensor& SparseTensor::operator+=(const SparseTensor& o) {
  if (space != o.space) throw std::invalid_argument("tensor space mismatch");
  for (const auto& [w, c] : o.terms) add_canonical(w, c);
  return *this;
}

SparseTensor& SparseTensor::operator-=(const SparseTensor& o) {
  if (space != o.space) throw std::invalid_argument("tensor space mismatch");
  for (const auto& [w, c] : o.terms) add_canonical(w, -c);
  return *this;
}

SparseVector SparseTensor::to_sparse_vector() const {
  SparseVector v;
  v.dim = space.dim();
  v.entries.reserve(terms.size());
  for (const auto& [w, c] : terms) v.entries.emplace_back(space.word_index(w), c);
  v.normalize();
  return v;
}

SparseTensor SparseTensor::from_sparse_vector(const TensorSpace& s, const SparseVector& v) {
  SparseTensor t(s);
  for (const auto& [i, c] : v.entries) t.add_canonical(s.word_at(i), c);
  return t;
}

std::string SparseTensor::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms) {
    if (!first) os << " + ";
    os << "(" << rat_str(c) << ")*" << space.word_str(w);
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

SparseTensor st_scale(const SparseTensor& t, const Rational& c) {
  SparseTensor out(t.space);
  if (c == 0) return out;
  for (const auto& [w, x] : t.terms) out.terms.emplace(w, x * c);
  return out;
}

bool st_equal(const SparseTensor& a, const SparseTensor& b) {
  return a.space == b.space && a.terms == b.terms;
}

void TensorAccum::add_raw(Word raw, const Rational& c) {
  if (c == 0) return;
  auto [w, s] = space_.canonicalize(std::move(raw));
  if (s == 0) return;
  add_canonical(w, s > 0 ? c : Rational(-c));
}

void TensorAccum::add_canonical(const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void TensorAccum::add_scaled(const SparseTensor& t, const Rational& c) {
  if (space_ != t.space) throw std::invalid_argument("tensor space mismatch");
  if (c == 0) return;
  for (const auto& [w, x] : t.terms) add_canonical(w, x * c);
}

SparseTensor TensorAccum::take() {
  SparseTensor t(space_);
  for (auto& [w, c] : terms_)
    if (c != 0) t.terms.emplace(w, std::move(c));
  terms_.clear();
  return t;
}

// ---- H tensor power operations ----

namespace {
void require_h_pow(const TensorSpace& s, const char* what) {
  for (const auto& f : s.factors())
    if (!(f.base.kind == Primitive::H && f.wedge == 1))
      throw std::invalid_argument(std::string(what) + " needs a plain H tensor power");
}
}  // namespace

Rational mu_pair(const SparseTensor& u, const SparseTensor& v) {
  require_h_pow(u.space, "mu");
  require_h_pow(v.space, "mu");
  if (u.space.word_len() != 1 || v.space.word_len() != 1)
    throw std::invalid_argument("mu needs single H factors");
  Rational acc(0);
  for (const auto& [wu, cu] : u.terms)
    for (const auto& [wv, cv] : v.terms) {
      int m = mu_code(static_cast<unsigned char>(wu[0]), static_cast<unsigned char>(wv[0]));
      if (m) acc += cu * cv * m;
    }
  return acc;
}

SparseTensor basis_tensor(const TensorSpace& s, const Word& w) {
  SparseTensor t(s);
  t.add_raw(w, Rational(1));
  return t;
}

SparseTensor h_basis_vector(int g, int code) {
  return basis_tensor(TensorSpace::h_pow(g, 1), Word(1, static_cast<char>(code)));
}

SparseTensor omega0_tensor(int g) {
  SparseTensor t(TensorSpace::h_pow(g, 2));
  for (int i = 0; i < g; ++i) {
    Word xy{static_cast<char>(2 * i), static_cast<char>(2 * i + 1)};
    Word yx{static_cast<char>(2 * i + 1), static_cast<char>(2 * i)};
    t.add_canonical(xy, Rational(1));
    t.add_canonical(yx, Rational(-1));
  }
  return t;
}

SparseTensor omega0_wedge(int g) {
  SparseTensor t(TensorSpace::wedge_pow(g, Primitive{Primitive::H}, 2));
  for (int i = 0; i < g; ++i) {
    Word w{static_cast<char>(2 * i), static_cast<char>(2 * i + 1)};
    t.add_canonical(w, Rational(1));
  }
  return t;
}

SparseTensor permute(const SparseTensor& t, const std::vector<int>& perm) {
  require_h_pow(t.space, "permute");
  const std::size_t n = t.space.word_len();
  if (perm.size() != n) throw std::invalid_argument("permutation length mismatch");
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= n || seen[p])
      throw std::invalid_argument("not a permutation");
    seen[p] = 1;
  }
  SparseTensor out(t.space);
  Word w(n, '\0');
  for (const auto& [src, c] : t.terms) {
    for (std::size_t i = 0; i < n; ++i) w[perm[i]] = src[i];
    out.add_canonical(w, c);
  }
  return out;
}

SparseTensor contract(const SparseTensor& t, int i, int j) {
  require_h_pow(t.space, "contract");
  const int n = static_cast<int>(t.space.word_len());
  if (!(0 <= i && i < j && j < n)) throw std::invalid_argument("bad contraction slots");
  SparseTensor out(TensorSpace::h_pow(t.space.g(), n - 2));
  for (const auto& [w, c] : t.terms) {
    int m = mu_code(static_cast<unsigned char>(w[i]), static_cast<unsigned char>(w[j]));
    if (!m) continue;
    Word r;
    r.reserve(n - 2);
    for (int p = 0; p < n; ++p)
      if (p != i && p != j) r.push_back(w[p]);
    out.add_canonical(r, m > 0 ? c : Rational(-c));
  }
  return out;
}

SparseTensor tensor_product(const SparseTensor& a, const SparseTensor& b) {
  if (a.space.g() != b.space.g()) throw std::invalid_argument("genus mismatch");
  std::vector<Factor> fs = a.space.factors();
  const auto& bf = b.space.factors();
  fs.insert(fs.end(), bf.begin(), bf.end());
  TensorAccum acc(TensorSpace(a.space.g(), std::move(fs)));
  for (const auto& [wa, ca] : a.terms)
    for (const auto& [wb, cb] : b.terms) acc.add_canonical(wa + wb, ca * cb);
  return acc.take();
}

// ---- wedge^3 H and U ----

namespace {
void require_w3(const TensorSpace& s, const char* what) {
  if (!(s.factors().size() == 1 && s.factors()[0].base.kind == Primitive::W3 &&
        s.factors()[0].wedge == 1))
    throw std::invalid_argument(std::string(what) + " needs a wedge^3 H tensor");
}

constexpr int kS3Perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
constexpr int kS3Sign[6] = {1, -1, -1, 1, 1, -1};
}  // namespace

SparseTensor embed_wedge3(const SparseTensor& t) {
  require_w3(t.space, "embed_wedge3");
  SparseTensor out(TensorSpace::h_pow(t.space.g(), 3));
  Word w(3, '\0');
  for (const auto& [src, c] : t.terms)
    for (int p = 0; p < 6; ++p) {
      for (int i = 0; i < 3; ++i) w[i] = src[kS3Perm[p][i]];
      out.add_canonical(w, kS3Sign[p] > 0 ? c : Rational(-c));
    }
  return out;
}

SparseTensor project_wedge3(const SparseTensor& t) {
  require_h_pow(t.space, "project_wedge3");
  if (t.space.word_len() != 3) throw std::invalid_argument("project_wedge3 needs H^3");
  SparseTensor out(TensorSpace::wedge3(t.space.g()));
  for (const auto& [w, c] : t.terms) out.add_raw(w, c);
  return out;
}

bool wedge3_trivial(int g) { return g == 1; }

SparseTensor embed_H_wedge3(const SparseTensor& u) {
  require_h_pow(u.space, "embed_H_wedge3");
  if (u.space.word_len() != 1) throw std::invalid_argument("embed_H_wedge3 needs H");
  const int g = u.space.g();
  SparseTensor out(TensorSpace::wedge3(g));
  for (const auto& [w, c] : u.terms)
    for (int i = 0; i < g; ++i) {
      Word raw{w[0], static_cast<char>(2 * i), static_cast<char>(2 * i + 1)};
      out.add_raw(std::move(raw), c);
    }
  return out;
}

SparseTensor wedge3_contract(const SparseTensor& t) {
  require_w3(t.space, "wedge3_contract");
  SparseTensor out(TensorSpace::h_pow(t.space.g(), 1));
  for (const auto& [w, c] : t.terms) {
    const int a = static_cast<unsigned char>(w[0]);
    const int b = static_cast<unsigned char>(w[1]);
    const int d = static_cast<unsigned char>(w[2]);
    const Rational c2 = c * 2;
    if (int m = mu_code(a, b)) out.add_canonical(Word(1, w[2]), m > 0 ? c2 : -c2);
    if (int m = mu_code(a, d)) out.add_canonical(Word(1, w[1]), m > 0 ? -c2 : c2);
    if (int m = mu_code(b, d)) out.add_canonical(Word(1, w[0]), m > 0 ? c2 : -c2);
  }
  return out;
}

SparseTensor q_map(const SparseTensor& t) {
  require_w3(t.space, "q_map");
  const int g = t.space.g();
  if (g < 2) throw std::invalid_argument("q_map needs genus at least 2");
  SparseTensor corr = embed_H_wedge3(wedge3_contract(t));
  SparseTensor out = t;
  out += st_scale(corr, Rational(-1, 2 * g - 2));
  return out;
}

// U: quotient of wedge^3 H by the image of H. The basis is the lex-least set
// of wedge words completing that image; projection reads coordinates off a
// fixed echelon with identity tails on the complement columns.
namespace {

struct UQuotient {
  std::vector<Word> complement;
  std::vector<SparseVector> image_cols;
  Echelon ech{0};
  std::size_t w3_dim = 0;
};

std::mutex u_mutex;

const UQuotient& u_quotient(int g) {
  static std::map<int, UQuotient> cache;
  std::lock_guard<std::mutex> lock(u_mutex);
  auto it = cache.find(g);
  if (it != cache.end()) return it->second;

  UQuotient q;
  TensorSpace w3 = TensorSpace::wedge3(g);
  q.w3_dim = w3.dim();

  for (int c = 0; c < 2 * g; ++c)
    q.image_cols.push_back(embed_H_wedge3(h_basis_vector(g, c)).to_sparse_vector());

  // First pass: greedy lex scan for the complement words.
  Echelon probe(q.w3_dim);
  for (const auto& col : q.image_cols) probe.insert(col);
  const std::size_t image_rank = probe.rank();
  for (std::size_t i = 0; i < q.w3_dim; ++i) {
    SparseVector unit;
    unit.dim = q.w3_dim;
    unit.entries.emplace_back(i, Rational(1));
    if (probe.insert(unit)) q.complement.push_back(w3.word_at(i));
  }
  if (image_rank + q.complement.size() != q.w3_dim)
    throw std::logic_error("U complement construction failed");

  // Second pass: echelon with tails on the complement columns only.
  const std::size_t total = q.w3_dim + q.complement.size();
  q.ech = Echelon(total, q.w3_dim);
  std::size_t inserted = 0;
  for (auto col : q.image_cols) {
    col.dim = total;
    if (q.ech.insert(col)) ++inserted;
  }
  if (inserted != image_rank) throw std::logic_error("image column insertion mismatch");
  for (std::size_t j = 0; j < q.complement.size(); ++j) {
    SparseVector unit;
    unit.dim = total;
    unit.entries.emplace_back(w3.word_index(q.complement[j]), Rational(1));
    unit.entries.emplace_back(q.w3_dim + j, Rational(1));
    unit.normalize();
    if (!q.ech.insert(unit)) throw std::logic_error("dependent complement column");
  }
  return cache.emplace(g, std::move(q)).first->second;
}

}  // namespace

const std::vector<Word>& u_basis_words(int g) { return u_quotient(g).complement; }

SparseTensor project_U(const SparseTensor& t) {
  require_w3(t.space, "project_U");
  const int g = t.space.g();
  const UQuotient& q = u_quotient(g);
  SparseVector v = t.to_sparse_vector();
  v.dim = q.w3_dim + q.complement.size();
  SparseVector r = q.ech.reduce(std::move(v));
  SparseTensor out(TensorSpace::u_space(g));
  for (const auto& [i, c] : r.entries) {
    if (i < q.w3_dim) throw std::logic_error("U projection left a residue");
    out.add_canonical(q.complement[i - q.w3_dim], -c);
  }
  return out;
}

SparseTensor u_section(int g, const Word& u_word) {
  return q_map(basis_tensor(TensorSpace::wedge3(g), u_word));
}

// ---- symmetric powers ----

SparseTensor sym_from_tensor(const SparseTensor& t) {
  require_h_pow(t.space, "sym_from_tensor");
  const int m = static_cast<int>(t.space.word_len());
  SparseTensor out(TensorSpace::sym(t.space.g(), m));
  for (const auto& [w, c] : t.terms) out.add_raw(w, c);
  return out;
}

Rational sym_pairing(const SparseTensor& f, const SparseTensor& h) {
  if (f.space != h.space) throw std::invalid_argument("sym_pairing space mismatch");
  const auto& fac = f.space.factors();
  if (fac.size() != 1 || fac[0].base.kind != Primitive::Sym || fac[0].wedge != 1)
    throw std::invalid_argument("sym_pairing needs S^m H tensors");
  const int m = fac[0].base.m;
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  Rational acc(0);
  for (const auto& [wf, cf] : f.terms)
    for (const auto& [wh, ch] : h.terms) {
      std::vector<int> p = perm;
      long long sum = 0;
      do {
        long long prod = 1;
        for (int i = 0; i < m && prod; ++i)
          prod *= mu_code(static_cast<unsigned char>(wf[i]),
                          static_cast<unsigned char>(wh[p[i]]));
        sum += prod;
      } while (std::next_permutation(p.begin(), p.end()));
      if (sum) acc += cf * ch * Rational(static_cast<long>(sum));
    }
  return acc;
}

// ---- generic Leibniz action ----

SparseTensor apply_h_linear(const SparseTensor& t, const HLinearMap& L) {
  const int g = t.space.g();
  TensorAccum acc(t.space);
  for (const auto& [w, c] : t.terms) {
    std::size_t off = 0;
    for (const Factor& fac : t.space.factors()) {
      const int bl = fac.base.sub_len();
      for (int blk = 0; blk < fac.wedge; ++blk) {
        const std::size_t boff = off + static_cast<std::size_t>(blk) * bl;
        if (fac.base.kind == Primitive::U) {
          // Act on the wedge^3 representative, project back to U.
          TensorSpace w3 = TensorSpace::wedge3(g);
          SparseTensor moved(w3);
          for (int p = 0; p < 3; ++p)
            for (const auto& [code, coef] : L(static_cast<unsigned char>(w[boff + p]))) {
              Word raw = w.substr(boff, 3);
              raw[p] = static_cast<char>(code);
              moved.add_raw(std::move(raw), coef);
            }
          if (!moved.is_zero()) {
            SparseTensor proj = project_U(moved);
            for (const auto& [uw, uc] : proj.terms) {
              Word raw = w;
              std::copy(uw.begin(), uw.end(), raw.begin() + boff);
              acc.add_raw(std::move(raw), c * uc);
            }
          }
        } else {
          for (int p = 0; p < bl; ++p)
            for (const auto& [code, coef] : L(static_cast<unsigned char>(w[boff + p]))) {
              Word raw = w;
              raw[boff + p] = static_cast<char>(code);
              acc.add_raw(std::move(raw), c * coef);
            }
        }
      }
      off += fac.sub_len();
    }
  }
  return acc.take();
}

namespace {
PrimTable make_u_table(int g) {
  PrimTable t;
  for (const Word& w : u_basis_words(g)) {
    t.rank[w] = t.words.size();
    t.words.push_back(w);
  }
  return t;
}
}  // namespace

}  // namespace mcg
