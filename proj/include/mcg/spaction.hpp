#pragma once

// Infinitesimal sp(2g) action on the tensor carriers, the quadratic Casimir,
// Casimir-polynomial isotypic projection, and the Weyl dimension formula.
//
// Irreducibles of Sp(2g) are indexed by partitions with at most g rows. The
// Casimir here is normalized so that its eigenvalue on the irreducible with
// highest weight p is <p, p + 2 rho> with rho = (g, g-1, ..., 1); the defining
// representation H gets 2g + 1.

#include <cstddef>
#include <string>
#include <vector>

#include "mcg/tensor.hpp"

namespace mcg {

// Young diagram rows, weakly decreasing, trailing zeros trimmed.
struct Partition {
  std::vector<int> parts;

  Partition() = default;
  explicit Partition(std::vector<int> p);

  // "[3,1,1]"; "[0]" and "[]" both give the empty partition
  static Partition parse(const std::string& s);
  std::string str() const;

  int size() const;  // number of boxes
  int rows() const { return static_cast<int>(parts.size()); }
  bool operator==(const Partition& o) const { return parts == o.parts; }
  bool operator<(const Partition& o) const { return parts < o.parts; }
};

// Basis element of sp(2g): the symmetrized pairing quadratic for a code pair,
// u -> mu(a, u) e_b + mu(b, u) e_a. Ranges over a <= b; count g(2g + 1).
struct SpGenerator {
  int g = 0;
  int a = 0;
  int b = 0;

  HLinearMap map() const;
};

std::vector<SpGenerator> sp_basis(int g);

// Leibniz action of one generator across all tensor factors.
SparseTensor act(const SpGenerator& x, const SparseTensor& t);

// Quadratic Casimir: double actions summed against the inverse Gram matrix of
// half the defining-representation trace form on sp_basis(g).
SparseTensor casimir(const SparseTensor& t);

// <p, p + 2 rho> in the standard weight normalization.
Rational casimir_eigenvalue(const Partition& p, int g);

// Product of (casimir - lambda(mu)) / (lambda(target) - lambda(mu)) over the
// constituents other than the target. Requires target among the constituents
// and all constituent eigenvalues pairwise distinct; throws otherwise.
SparseTensor isotypic_project(const SparseTensor& t, const Partition& target,
                              const std::vector<Partition>& constituents, int g);

// Checks a claimed decomposition of the span of `basis` into the given
// constituents: total dimension must match, and the Casimir minimal
// polynomial on the span must have exactly the distinct claimed eigenvalues.
bool validate_constituents(const std::vector<SparseTensor>& basis,
                           const std::vector<Partition>& parts, int g);

// Weyl dimension of the Sp(2g) irreducible; more than g rows gives 0.
std::size_t weyl_dim(const Partition& p, int g);

struct TableColumn {
  std::string name;
  std::vector<Partition> parts;
  std::size_t dim = 0;
};

struct TableReport {
  int degree = 0;
  int g = 0;
  std::vector<TableColumn> columns;
  std::size_t row_total = 0;
  std::size_t h_dim = 0;
  bool matched = false;

  std::string json() const;
};

// Compares h_dimension(degree, g) against the tabulated decomposition row
// (degree <= 4). The row total is the stable decomposition; truncation to
// fewer than g rows is exact at g = 3 for all rows and fails honestly in the
// genuinely unstable cases (degree 4 at g = 2), which the report flags.
TableReport table_check(int degree, int g);

}  // namespace mcg
