#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mcg/rational.hpp"

namespace mcg {

// Sparse column vector: entries sorted by index, no explicit zeros.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, Rational>> entries;

  bool is_zero() const { return entries.empty(); }
  void normalize();                       // sort, merge duplicates, drop zeros
  Rational at(std::size_t i) const;
};

SparseVector sv_scale(const SparseVector& v, const Rational& c);
// v + c*w
SparseVector sv_axpy(const SparseVector& v, const Rational& c, const SparseVector& w);
bool sv_equal(const SparseVector& a, const SparseVector& b);

// Column-major sparse matrix.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<SparseVector> cols;

  std::size_t ncols() const { return cols.size(); }
  void add_col(SparseVector v);
};

// Incremental exact column echelon over Q. Pivot rows are restricted to
// [0, pivot_limit); rows at or above the limit ride along unreduced, which is
// how nullspace/member track column combinations (identity tail). Pivot rows
// are chosen least-loaded first to limit fill.
class Echelon {
 public:
  explicit Echelon(std::size_t rows, std::size_t pivot_limit = SIZE_MAX)
      : rows_(rows), pivot_limit_(pivot_limit < rows ? pivot_limit : rows) {}

  SparseVector reduce(SparseVector v) const;
  // Reduce, then adopt as a new pivot if anything survives below pivot_limit.
  // Returns true when the column enlarged the span.
  bool insert(const SparseVector& v);
  // As insert, but hands back the reduced residue when no pivot was created.
  std::optional<SparseVector> insert_or_residue(const SparseVector& v);

  std::size_t rank() const { return pivots_.size(); }
  std::size_t rows() const { return rows_; }
  const std::vector<std::size_t>& pivot_rows() const { return pivot_rows_; }

 private:
  struct Pivot {
    std::size_t row;
    SparseVector col;  // normalized: entry at row equals 1
  };
  std::size_t rows_;
  std::size_t pivot_limit_;
  std::vector<Pivot> pivots_;
  std::vector<std::size_t> pivot_rows_;
  std::vector<std::uint32_t> row_load_;

  bool adopt(SparseVector residue);
};

// Exact rank over Q.
std::size_t rank(const SparseMatrix& m);

// Basis of the (right) nullspace: vectors c (length ncols) with M c = 0.
std::vector<SparseVector> nullspace(const SparseMatrix& m);

// Coordinates of v in span(basis) if representable, else nullopt. When the
// basis is dependent any valid coordinate vector may be returned.
std::optional<std::vector<Rational>> member(const SparseVector& v,
                                            const std::vector<SparseVector>& basis);

// Any particular solution of A x = b, nullopt if inconsistent.
std::optional<std::vector<Rational>> solve(const SparseMatrix& a, const SparseVector& b);

// Indices of a maximal independent subset of the columns, in scan order.
std::vector<std::size_t> independent_columns(const SparseMatrix& m);

// Rank accelerated by modular elimination, exact regardless: a nonzero pivot
// minor mod p is nonzero over Q, so the mod-p pivot count is a certified
// lower bound for free. The matching upper bound comes from lifting a mod-p
// kernel basis through CRT and rational reconstruction and verifying M c = 0
// exactly over Q (the lifted vectors carry units at distinct non-pivot
// columns, so their independence is structural). Any snag falls back to pure
// rational elimination; the modular pass is never the source of truth.
std::size_t rank_modular_certified(const SparseMatrix& m);

// Mod-p rank lower bound with early exit: elimination stops as soon as the
// pivot count reaches stop_at (or the row/column cap). A nonzero pivot minor
// mod p is nonzero over Q, so any return value is a certified lower bound,
// and a return equal to stop_at certifies rank >= stop_at at the cost of
// only that many pivots.
std::size_t rank_lower_bound_modp(const SparseMatrix& m, std::size_t stop_at);

// Exact right-kernel basis by the same search-modularly, certify-exactly
// scheme; falls back to rational elimination when lifting fails.
std::vector<SparseVector> nullspace_certified(const SparseMatrix& m);

// Certified maximal independent column set: independence from a mod-p pivot
// minor, spanning from exactly verified kernel vectors (or full rank); falls
// back to rational elimination. Selection may differ from the rational scan,
// but is always a certified basis of the column space.
std::vector<std::size_t> independent_columns_certified(const SparseMatrix& m);

// Rational reconstruction of u mod modulus (|num|, den bounded by
// sqrt(modulus/2)); nullopt when no representative exists in that box.
std::optional<Rational> rat_reconstruct(const mpz_class& u, const mpz_class& modulus);

SparseVector mat_apply(const SparseMatrix& m, const SparseVector& x);
SparseMatrix mat_mul(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix mat_add_scaled_identity(const SparseMatrix& m, const Rational& c);

}  // namespace mcg
