#include "mcg/sparse.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace mcg {

void SparseVector::normalize() {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::size_t, Rational>> out;
  out.reserve(entries.size());
  for (auto& e : entries) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(std::move(e));
    if (!out.empty() && out.back().second == 0) out.pop_back();
  }
  entries = std::move(out);
}

Rational SparseVector::at(std::size_t i) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), i,
                             [](const auto& e, std::size_t idx) { return e.first < idx; });
  if (it != entries.end() && it->first == i) return it->second;
  return Rational(0);
}

SparseVector sv_scale(const SparseVector& v, const Rational& c) {
  SparseVector out;
  out.dim = v.dim;
  if (c == 0) return out;
  out.entries.reserve(v.entries.size());
  for (const auto& [i, x] : v.entries) out.entries.emplace_back(i, x * c);
  return out;
}

SparseVector sv_axpy(const SparseVector& v, const Rational& c, const SparseVector& w) {
  SparseVector out;
  out.dim = v.dim;
  if (c == 0) return v;
  out.entries.reserve(v.entries.size() + w.entries.size());
  std::size_t i = 0, j = 0;
  while (i < v.entries.size() || j < w.entries.size()) {
    if (j == w.entries.size() ||
        (i < v.entries.size() && v.entries[i].first < w.entries[j].first)) {
      out.entries.push_back(v.entries[i++]);
    } else if (i == v.entries.size() || w.entries[j].first < v.entries[i].first) {
      out.entries.emplace_back(w.entries[j].first, c * w.entries[j].second);
      ++j;
    } else {
      Rational s = v.entries[i].second + c * w.entries[j].second;
      if (s != 0) out.entries.emplace_back(v.entries[i].first, std::move(s));
      ++i, ++j;
    }
  }
  return out;
}

bool sv_equal(const SparseVector& a, const SparseVector& b) {
  return a.dim == b.dim && a.entries == b.entries;
}

void SparseMatrix::add_col(SparseVector v) {
  v.dim = rows;
  v.normalize();
  cols.push_back(std::move(v));
}

SparseVector Echelon::reduce(SparseVector v) const {
  // Pivots are reduced against their predecessors only, so eliminating in
  // insertion order never reintroduces an already-cleared pivot row.
  for (const auto& p : pivots_) {
    Rational c = v.at(p.row);
    if (c != 0) v = sv_axpy(v, -c, p.col);
  }
  return v;
}

bool Echelon::adopt(SparseVector residue) {
  if (row_load_.size() < pivot_limit_) row_load_.resize(pivot_limit_, 0);
  std::size_t best = SIZE_MAX;
  std::uint32_t best_load = UINT32_MAX;
  for (const auto& [i, x] : residue.entries) {
    if (i >= pivot_limit_) break;
    if (row_load_[i] < best_load) {
      best_load = row_load_[i];
      best = i;
    }
  }
  if (best == SIZE_MAX) return false;
  Rational inv = residue.at(best);
  if (inv != 1) residue = sv_scale(residue, Rational(1) / inv);
  for (const auto& [i, x] : residue.entries)
    if (i < pivot_limit_) ++row_load_[i];
  pivot_rows_.push_back(best);
  pivots_.push_back(Pivot{best, std::move(residue)});
  return true;
}

bool Echelon::insert(const SparseVector& v) { return adopt(reduce(v)); }

std::optional<SparseVector> Echelon::insert_or_residue(const SparseVector& v) {
  SparseVector r = reduce(v);
  if (adopt(r)) return std::nullopt;
  return r;
}

std::size_t rank(const SparseMatrix& m) {
  Echelon e(m.rows);
  for (const auto& c : m.cols) e.insert(c);
  return e.rank();
}

std::vector<std::size_t> independent_columns(const SparseMatrix& m) {
  Echelon e(m.rows);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m.cols.size(); ++j)
    if (e.insert(m.cols[j])) out.push_back(j);
  return out;
}

namespace {

// Column j extended with a unit tail marker at rows + j.
SparseVector extend_tail(const SparseVector& c, std::size_t rows, std::size_t j,
                         std::size_t total) {
  SparseVector v = c;
  v.dim = total;
  v.entries.emplace_back(rows + j, Rational(1));
  return v;
}

}  // namespace

std::vector<SparseVector> nullspace(const SparseMatrix& m) {
  const std::size_t n = m.cols.size();
  const std::size_t total = m.rows + n;
  Echelon e(total, m.rows);
  std::vector<SparseVector> out;
  for (std::size_t j = 0; j < n; ++j) {
    auto residue = e.insert_or_residue(extend_tail(m.cols[j], m.rows, j, total));
    if (!residue) continue;
    SparseVector nv;
    nv.dim = n;
    for (const auto& [i, x] : residue->entries) nv.entries.emplace_back(i - m.rows, x);
    out.push_back(std::move(nv));
  }
  return out;
}

std::optional<std::vector<Rational>> member(const SparseVector& v,
                                            const std::vector<SparseVector>& basis) {
  const std::size_t n = basis.size();
  const std::size_t total = v.dim + n;
  Echelon e(total, v.dim);
  for (std::size_t j = 0; j < n; ++j) e.insert(extend_tail(basis[j], v.dim, j, total));
  SparseVector ext = v;
  ext.dim = total;
  SparseVector r = e.reduce(std::move(ext));
  std::vector<Rational> coords(n, Rational(0));
  for (const auto& [i, x] : r.entries) {
    if (i < v.dim) return std::nullopt;  // residue outside the span
    coords[i - v.dim] = -x;
  }
  return coords;
}

std::optional<std::vector<Rational>> solve(const SparseMatrix& a, const SparseVector& b) {
  SparseVector v = b;
  v.dim = a.rows;
  return member(v, a.cols);
}

// ---- modular path ----

namespace {

constexpr std::uint64_t kPrimes[] = {2147483647ull, 2147483629ull, 2147483587ull,
                                     2147483563ull};

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  b %= p;
  while (e) {
    if (e & 1) r = (unsigned __int128)r * b % p;
    b = (unsigned __int128)b * b % p;
    e >>= 1;
  }
  return r;
}

struct FpVec {
  std::vector<std::pair<std::size_t, std::uint64_t>> entries;  // sorted, nonzero
};

// Rational entries reduced mod p; false when a denominator vanishes mod p.
bool to_fp(const SparseVector& v, std::uint64_t p, FpVec& out) {
  out.entries.clear();
  out.entries.reserve(v.entries.size());
  for (const auto& [i, x] : v.entries) {
    std::uint64_t den = mpz_fdiv_ui(x.get_den().get_mpz_t(), p);
    if (den == 0) return false;
    std::uint64_t num = mpz_fdiv_ui(x.get_num().get_mpz_t(), p);
    std::uint64_t inv = powmod(den, p - 2, p);
    if ((unsigned __int128)den * inv % p != 1) return false;  // p was not prime
    std::uint64_t val = (unsigned __int128)num * inv % p;
    if (val) out.entries.emplace_back(i, val);
  }
  return true;
}

class FpEchelon {
 public:
  FpEchelon(std::size_t rows, std::uint64_t p, std::size_t pivot_limit = SIZE_MAX)
      : p_(p), pivot_limit_(pivot_limit), row_load_(rows, 0) {}

  bool insert(FpVec v) { return insert_or_residue(std::move(v), nullptr); }

  // Reduces v against the pivots. When an entry below pivot_limit_ survives,
  // the vector joins the echelon (true); otherwise the fully reduced vector,
  // supported on tail rows only, is handed back through residue.
  bool insert_or_residue(FpVec v, FpVec* residue) {
    for (const auto& pv : pivots_) {
      std::uint64_t c = at(v, pv.row);
      if (c) axpy_inplace(v, p_ - c, pv.col);
    }
    std::size_t best = SIZE_MAX;
    std::uint32_t best_load = UINT32_MAX;
    for (const auto& [i, x] : v.entries)
      if (i < pivot_limit_ && row_load_[i] < best_load) best_load = row_load_[i], best = i;
    if (best == SIZE_MAX) {
      if (residue) *residue = std::move(v);
      return false;
    }
    std::uint64_t inv = powmod(at(v, best), p_ - 2, p_);
    for (auto& [i, x] : v.entries) {
      x = (unsigned __int128)x * inv % p_;
      ++row_load_[i];
    }
    pivots_.push_back({best, std::move(v)});
    return true;
  }

  std::size_t rank() const { return pivots_.size(); }

 private:
  struct Pivot {
    std::size_t row;
    FpVec col;
  };
  std::uint64_t p_;
  std::size_t pivot_limit_;
  std::vector<std::uint32_t> row_load_;
  std::vector<Pivot> pivots_;

  static std::uint64_t at(const FpVec& v, std::size_t i) {
    auto it = std::lower_bound(v.entries.begin(), v.entries.end(), i,
                               [](const auto& e, std::size_t idx) { return e.first < idx; });
    return (it != v.entries.end() && it->first == i) ? it->second : 0;
  }

  void axpy_inplace(FpVec& v, std::uint64_t c, const FpVec& w) {
    FpVec out;
    out.entries.reserve(v.entries.size() + w.entries.size());
    std::size_t i = 0, j = 0;
    while (i < v.entries.size() || j < w.entries.size()) {
      if (j == w.entries.size() ||
          (i < v.entries.size() && v.entries[i].first < w.entries[j].first)) {
        out.entries.push_back(v.entries[i++]);
      } else if (i == v.entries.size() || w.entries[j].first < v.entries[i].first) {
        std::uint64_t s = (unsigned __int128)c * w.entries[j].second % p_;
        if (s) out.entries.emplace_back(w.entries[j].first, s);
        ++j;
      } else {
        std::uint64_t s =
            (v.entries[i].second + (unsigned __int128)c * w.entries[j].second) % p_;
        if (s) out.entries.emplace_back(v.entries[i].first, s);
        ++i, ++j;
      }
    }
    v = std::move(out);
  }
};

// Pivot column indices mod p, or nullopt when p misbehaves.
std::optional<std::vector<std::size_t>> fp_pivot_cols(const SparseMatrix& m,
                                                      std::uint64_t p) {
  FpEchelon e(m.rows, p);
  std::vector<std::size_t> out;
  FpVec fv;
  for (std::size_t j = 0; j < m.cols.size(); ++j) {
    if (!to_fp(m.cols[j], p, fv)) return std::nullopt;
    if (e.insert(std::move(fv))) out.push_back(j);
    fv = FpVec{};
  }
  return out;
}

struct FpKernel {
  std::vector<std::size_t> pivot_cols;
  // One vector per non-pivot column j, in increasing j: coefficients c with
  // M c = 0 mod p, c_j = 1, and support inside {pivot cols} union {j}.
  std::vector<FpVec> kernel;
};

std::optional<FpKernel> fp_kernel(const SparseMatrix& m, std::uint64_t p) {
  std::size_t n = m.cols.size();
  FpEchelon e(m.rows + n, p, m.rows);
  FpKernel out;
  FpVec fv, res;
  for (std::size_t j = 0; j < n; ++j) {
    if (!to_fp(m.cols[j], p, fv)) return std::nullopt;
    fv.entries.emplace_back(m.rows + j, 1);
    if (e.insert_or_residue(std::move(fv), &res)) {
      out.pivot_cols.push_back(j);
    } else {
      FpVec k;
      k.entries.reserve(res.entries.size());
      for (const auto& [i, x] : res.entries) k.entries.emplace_back(i - m.rows, x);
      out.kernel.push_back(std::move(k));
    }
    fv = FpVec{};
  }
  return out;
}

mpz_class crt_combine(const std::vector<std::uint64_t>& residues,
                      const std::vector<std::uint64_t>& primes) {
  mpz_class r = (unsigned long)residues[0];
  mpz_class mod = (unsigned long)primes[0];
  for (std::size_t i = 1; i < primes.size(); ++i) {
    std::uint64_t p = primes[i];
    std::uint64_t mod_p = mpz_fdiv_ui(mod.get_mpz_t(), p);
    std::uint64_t r_p = mpz_fdiv_ui(r.get_mpz_t(), p);
    std::uint64_t diff = (residues[i] + p - r_p) % p;
    std::uint64_t t = (unsigned __int128)diff * powmod(mod_p, p - 2, p) % p;
    r += mod * (unsigned long)t;
    mod *= (unsigned long)p;
  }
  return r;
}

// Kernel basis lifted from mod-p runs whose pivot set equals pivot_cols,
// then verified exactly over Q. A success certifies rank(m) == |pivot_cols|:
// the mod-p pivot minor bounds the rank below, the verified kernel bounds it
// above. nullopt means the lift could not be completed (caller falls back).
std::optional<std::vector<SparseVector>> modular_kernel_lifted(
    const SparseMatrix& m, const std::vector<std::size_t>& pivot_cols) {
  std::size_t n = m.cols.size();
  std::vector<FpKernel> runs;
  std::vector<std::uint64_t> used;
  for (std::uint64_t p : kPrimes) {
    auto k = fp_kernel(m, p);
    if (!k || k->pivot_cols != pivot_cols) continue;
    runs.push_back(std::move(*k));
    used.push_back(p);
  }
  if (runs.empty()) return std::nullopt;
  mpz_class modulus = 1;
  for (std::uint64_t p : used) modulus *= (unsigned long)p;
  std::size_t nv = n - pivot_cols.size();
  std::vector<SparseVector> out;
  out.reserve(nv);
  for (std::size_t t = 0; t < nv; ++t) {
    std::map<std::size_t, std::vector<std::uint64_t>> residues;
    for (std::size_t r = 0; r < runs.size(); ++r)
      for (const auto& [j, x] : runs[r].kernel[t].entries) {
        auto& rs = residues[j];
        if (rs.empty()) rs.assign(runs.size(), 0);
        rs[r] = x;
      }
    SparseVector c(n);
    for (const auto& [j, rs] : residues) {
      auto q = rat_reconstruct(crt_combine(rs, used), modulus);
      if (!q) return std::nullopt;
      if (*q != 0) c.entries.emplace_back(j, *q);
    }
    if (!mat_apply(m, c).is_zero()) return std::nullopt;
    out.push_back(std::move(c));
  }
  return out;
}

// Pivot set of largest mod-p rank seen across the prime battery; its size is
// a certified lower bound for the rational rank and its columns a certified
// independent set. nullopt when every prime misbehaved.
std::optional<std::vector<std::size_t>> fp_best_pivot_set(const SparseMatrix& m) {
  std::optional<std::vector<std::size_t>> best;
  for (std::uint64_t p : kPrimes) {
    auto piv = fp_pivot_cols(m, p);
    if (!piv) continue;  // prime collided with a denominator; try the next
    if (!best || piv->size() > best->size()) best = std::move(piv);
    if (best->size() == std::min(m.rows, m.cols.size())) break;  // cannot grow further
  }
  return best;
}

}  // namespace

std::optional<Rational> rat_reconstruct(const mpz_class& u, const mpz_class& modulus) {
  mpz_class r0 = modulus, r1 = u % modulus;
  if (r1 < 0) r1 += modulus;
  mpz_class t0 = 0, t1 = 1;
  mpz_class bound = modulus / 2;
  mpz_sqrt(bound.get_mpz_t(), bound.get_mpz_t());
  while (r1 > bound) {
    mpz_class q = r0 / r1;
    mpz_class r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    mpz_class t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (t1 < 0) {
    t1 = -t1;
    r1 = -r1;
  }
  if (t1 == 0 || t1 > bound || gcd(r1, t1) != 1) return std::nullopt;
  Rational q(r1, t1);
  q.canonicalize();
  return q;
}

std::size_t rank_modular_certified(const SparseMatrix& m) {
  std::size_t n = m.cols.size();
  if (n == 0 || m.rows == 0) return 0;
  auto piv = fp_best_pivot_set(m);
  if (piv) {
    if (piv->size() == std::min(m.rows, n)) return piv->size();  // minor certificate
    if (modular_kernel_lifted(m, *piv)) return piv->size();
  }
  return rank(m);  // fallback: pure rational elimination
}

std::size_t rank_lower_bound_modp(const SparseMatrix& m, std::size_t stop_at) {
  std::size_t cap = std::min({m.rows, m.cols.size(), stop_at});
  std::size_t best = 0;
  for (std::uint64_t p : kPrimes) {
    FpEchelon e(m.rows, p);
    FpVec fv;
    bool usable = true;
    for (std::size_t j = 0; j < m.cols.size() && e.rank() < cap; ++j) {
      if (!to_fp(m.cols[j], p, fv)) {
        usable = false;  // denominator hit the prime; this p proves nothing
        break;
      }
      e.insert(std::move(fv));
      fv = FpVec{};
    }
    if (usable && e.rank() > best) best = e.rank();
    if (best >= cap) break;
  }
  return best;
}

std::vector<SparseVector> nullspace_certified(const SparseMatrix& m) {
  std::size_t n = m.cols.size();
  if (n == 0) return {};
  auto piv = fp_best_pivot_set(m);
  if (piv) {
    if (piv->size() == n) return {};
    if (auto kv = modular_kernel_lifted(m, *piv)) return *kv;
  }
  return nullspace(m);
}

std::vector<std::size_t> independent_columns_certified(const SparseMatrix& m) {
  std::size_t n = m.cols.size();
  if (n == 0) return {};
  auto piv = fp_best_pivot_set(m);
  if (piv) {
    // independence of the pivot columns is the mod-p minor; spanning needs a
    // verified kernel vector per leftover column unless the rank is full
    if (piv->size() == n || piv->size() == m.rows) return *piv;
    if (modular_kernel_lifted(m, *piv)) return *piv;
  }
  return independent_columns(m);
}

SparseVector mat_apply(const SparseMatrix& m, const SparseVector& x) {
  SparseVector out(m.rows);
  for (const auto& [j, c] : x.entries) out = sv_axpy(out, c, m.cols.at(j));
  return out;
}

SparseMatrix mat_mul(const SparseMatrix& a, const SparseMatrix& b) {
  if (b.rows != a.cols.size())
    throw std::invalid_argument("mat_mul: inner dimensions disagree");
  SparseMatrix out(a.rows);
  for (const auto& col : b.cols) out.add_col(mat_apply(a, col));
  return out;
}

SparseMatrix mat_add_scaled_identity(const SparseMatrix& m, const Rational& c) {
  if (m.rows != m.cols.size())
    throw std::invalid_argument("mat_add_scaled_identity: matrix not square");
  SparseMatrix out(m.rows);
  for (std::size_t j = 0; j < m.cols.size(); ++j) {
    SparseVector e(m.rows);
    if (c != 0) e.entries.emplace_back(j, c);
    out.add_col(sv_axpy(e, Rational(1), m.cols[j]));
  }
  return out;
}

}  // namespace mcg
