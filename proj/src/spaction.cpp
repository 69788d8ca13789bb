#include "mcg/spaction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mcg/derivations.hpp"
#include "mcg/errors.hpp"

namespace mcg {

Partition::Partition(std::vector<int> p) : parts(std::move(p)) {
  while (!parts.empty() && parts.back() == 0) parts.pop_back();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] <= 0 || (i && parts[i] > parts[i - 1]))
      throw std::invalid_argument("Partition: rows must be weakly decreasing positives");
  }
}

Partition Partition::parse(const std::string& s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw std::invalid_argument("Partition::parse: expected [a,b,...]");
  std::vector<int> rows;
  std::string body = s.substr(1, s.size() - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) rows.push_back(std::stoi(item));
  if (rows.size() == 1 && rows[0] == 0) rows.clear();
  return Partition(std::move(rows));
}

std::string Partition::str() const {
  if (parts.empty()) return "[0]";
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(parts[i]);
  }
  return out + "]";
}

int Partition::size() const {
  int s = 0;
  for (int p : parts) s += p;
  return s;
}

HLinearMap SpGenerator::map() const {
  int pa = a, pb = b;
  return [pa, pb](int code) {
    std::vector<std::pair<int, Rational>> out;
    if (int m = mu_code(pa, code)) out.emplace_back(pb, Rational(m));
    if (int m = mu_code(pb, code)) out.emplace_back(pa, Rational(m));
    return out;
  };
}

std::vector<SpGenerator> sp_basis(int g) {
  if (g < 1) throw std::invalid_argument("sp_basis: bad genus");
  std::vector<SpGenerator> out;
  for (int a = 0; a < 2 * g; ++a)
    for (int b = a; b < 2 * g; ++b) out.push_back(SpGenerator{g, a, b});
  return out;
}

SparseTensor act(const SpGenerator& x, const SparseTensor& t) {
  if (t.space.g() != x.g) throw std::invalid_argument("act: genus mismatch");
  return apply_h_linear(t, x.map());
}

namespace {

// Sparse list of (i, j, coeff) with coeff = (G^{-1})_{ij} for the Gram matrix
// G_{ij} = tr(S_i S_j) / 2 on the defining representation. Dense inversion is
// cheap (g(2g+1) <= 36 for the genera we drive) and done once per genus.
struct CasimirTable {
  std::vector<SpGenerator> gens;
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> pairs;
};

const CasimirTable& casimir_table(int g) {
  static std::map<int, CasimirTable> cache;
  auto it = cache.find(g);
  if (it != cache.end()) return it->second;

  CasimirTable tab;
  tab.gens = sp_basis(g);
  const std::size_t n = tab.gens.size();
  const int dimH = 2 * g;

  // columns of each generator as a dense dimH x dimH integer table
  auto matrix_of = [&](const SpGenerator& s) {
    std::vector<std::vector<Rational>> m(dimH, std::vector<Rational>(dimH, Rational(0)));
    for (int c = 0; c < dimH; ++c)
      for (const auto& [code, coef] : s.map()(c)) m[code][c] += coef;
    return m;
  };
  std::vector<std::vector<std::vector<Rational>>> mats;
  mats.reserve(n);
  for (const auto& s : tab.gens) mats.push_back(matrix_of(s));

  std::vector<std::vector<Rational>> gram(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Rational tr(0);
      for (int r = 0; r < dimH; ++r)
        for (int c = 0; c < dimH; ++c) tr += mats[i][r][c] * mats[j][c][r];
      tr /= 2;
      gram[i][j] = tr;
      gram[j][i] = tr;
    }

  // invert by Gauss-Jordan
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && gram[piv][col] == 0) ++piv;
    if (piv == n) throw std::logic_error("casimir_table: degenerate trace form");
    std::swap(gram[piv], gram[col]);
    std::swap(inv[piv], inv[col]);
    Rational d = gram[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      gram[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || gram[r][col] == 0) continue;
      Rational f = gram[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        gram[r][j] -= f * gram[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }

  // grouped by inner index so one application serves every partner
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (inv[i][j] != 0) tab.pairs.emplace_back(i, j, inv[i][j]);

  return cache.emplace(g, std::move(tab)).first->second;
}

}  // namespace

SparseTensor casimir(const SparseTensor& t) {
  const CasimirTable& tab = casimir_table(t.space.g());
  SparseTensor acc(t.space);
  SparseTensor inner(t.space);
  std::size_t have_j = tab.gens.size();
  for (const auto& [i, j, coef] : tab.pairs) {
    if (j != have_j) {
      inner = apply_h_linear(t, tab.gens[j].map());
      have_j = j;
    }
    if (inner.is_zero()) continue;
    acc += st_scale(apply_h_linear(inner, tab.gens[i].map()), coef);
  }
  return acc;
}

Rational casimir_eigenvalue(const Partition& p, int g) {
  if (g < 1) throw std::invalid_argument("casimir_eigenvalue: bad genus");
  long v = 0;
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    long pi = p.parts[i];
    v += pi * pi + 2 * pi * (g - static_cast<long>(i));
  }
  return Rational(v);
}

SparseTensor isotypic_project(const SparseTensor& t, const Partition& target,
                              const std::vector<Partition>& constituents, int g) {
  if (t.space.g() != g) throw std::invalid_argument("isotypic_project: genus mismatch");
  std::vector<Rational> eigen;
  bool found = false;
  for (const auto& c : constituents) {
    Rational e = casimir_eigenvalue(c, g);
    for (const Rational& prev : eigen)
      if (prev == e)
        throw std::invalid_argument("isotypic_project: repeated Casimir eigenvalue at " +
                                    c.str());
    eigen.push_back(e);
    if (c == target) found = true;
  }
  if (!found) throw std::invalid_argument("isotypic_project: target not a constituent");

  Rational lt = casimir_eigenvalue(target, g);
  SparseTensor out = t;
  for (const auto& c : constituents) {
    if (c == target) continue;
    Rational lm = casimir_eigenvalue(c, g);
    SparseTensor shifted = casimir(out);
    shifted -= st_scale(out, lm);
    out = st_scale(shifted, Rational(1) / (lt - lm));
  }
  return out;
}

bool validate_constituents(const std::vector<SparseTensor>& basis,
                           const std::vector<Partition>& parts, int g) {
  if (basis.empty()) return parts.empty();
  std::size_t total = 0;
  for (const auto& p : parts) total += weyl_dim(p, g);
  if (total != basis.size()) return false;

  std::set<Rational> eigen;
  for (const auto& p : parts)
    if (weyl_dim(p, g) > 0) eigen.insert(casimir_eigenvalue(p, g));

  // the product over all distinct eigenvalues must kill the span
  for (const auto& b : basis) {
    SparseTensor v = b;
    for (const Rational& e : eigen) {
      SparseTensor next = casimir(v);
      next -= st_scale(v, e);
      v = std::move(next);
      if (v.is_zero()) break;
    }
    if (!v.is_zero()) return false;
  }

  // and no factor is redundant: dropping any one leaves a surviving vector
  for (const Rational& skip : eigen) {
    bool survives = false;
    for (const auto& b : basis) {
      SparseTensor v = b;
      for (const Rational& e : eigen) {
        if (e == skip) continue;
        SparseTensor next = casimir(v);
        next -= st_scale(v, e);
        v = std::move(next);
        if (v.is_zero()) break;
      }
      if (!v.is_zero()) {
        survives = true;
        break;
      }
    }
    if (!survives) return false;
  }
  return true;
}

std::size_t weyl_dim(const Partition& p, int g) {
  if (g < 1) throw std::invalid_argument("weyl_dim: bad genus");
  if (p.rows() > g) return 0;
  // l_i = p_i + g - i + 1 and m_i = g - i + 1 with rows 1-indexed
  std::vector<long> l(g), m(g);
  for (int i = 0; i < g; ++i) {
    long pi = i < p.rows() ? p.parts[i] : 0;
    l[i] = pi + g - i;
    m[i] = g - i;
  }
  Rational dim(1);
  for (int i = 0; i < g; ++i) dim *= Rational(l[i]) / Rational(m[i]);
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j)
      dim *= Rational(l[i] * l[i] - l[j] * l[j]) / Rational(m[i] * m[i] - m[j] * m[j]);
  if (dim.get_den() != 1 || dim < 0)
    throw std::logic_error("weyl_dim: formula produced a non-natural value");
  return static_cast<std::size_t>(dim.get_num().get_ui());
}

namespace {

std::vector<Partition> parse_list(const std::vector<std::string>& names) {
  std::vector<Partition> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(Partition::parse(n));
  return out;
}

}  // namespace

std::string TableReport::json() const {
  std::ostringstream os;
  os << "{\"degree\":" << degree << ",\"g\":" << g << ",\"columns\":[";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os << ',';
    os << "{\"name\":\"" << columns[i].name << "\",\"parts\":[";
    for (std::size_t j = 0; j < columns[i].parts.size(); ++j) {
      if (j) os << ',';
      os << '"' << columns[i].parts[j].str() << '"';
    }
    os << "],\"dim\":" << columns[i].dim << '}';
  }
  os << "],\"row_total\":" << row_total << ",\"h_dim\":" << h_dim
     << ",\"matched\":" << (matched ? "true" : "false") << '}';
  return os.str();
}

TableReport table_check(int degree, int g) {
  if (degree < 1 || degree > 4)
    throw std::invalid_argument("table_check: tabulated degrees are 1 through 4");

  // decomposition rows: ideal, quotient-algebra image, Johnson image,
  // non-trace cokernel, trace component
  std::vector<std::vector<std::string>> row;
  switch (degree) {
    case 1: row = {{}, {"[1]"}, {"[1,1,1]"}, {}, {}}; break;
    case 2: row = {{"[0]"}, {"[1,1]"}, {"[2,2]"}, {}, {}}; break;
    case 3: row = {{}, {"[2,1]"}, {"[3,1,1]"}, {}, {"[3]"}}; break;
    default:
      row = {{"[2]"},
             {"[3,1]", "[2,1,1]", "[2]"},
             {"[4,2]", "[3,1,1,1]", "[2,2,2]", "[3,1]", "[2]"},
             {"[2,1,1]"},
             {}};
      break;
  }
  static const char* names[5] = {"ideal", "quotient", "johnson_image", "cokernel_rest",
                                 "trace"};

  TableReport rep;
  rep.degree = degree;
  rep.g = g;
  for (int c = 0; c < 5; ++c) {
    TableColumn col;
    col.name = names[c];
    col.parts = parse_list(row[c]);
    for (const auto& p : col.parts) col.dim += weyl_dim(p, g);
    rep.row_total += col.dim;
    rep.columns.push_back(std::move(col));
  }
  rep.h_dim = h_dimension(degree, g);
  rep.matched = rep.row_total == rep.h_dim;
  return rep;
}

}  // namespace mcg
