#include "mcg/graphs.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mcg/errors.hpp"

namespace mcg {

namespace {

using Edge = std::pair<int, int>;
using EdgeList = std::vector<Edge>;

void check_degrees(int n, const EdgeList& edges) {
  std::vector<int> deg(n, 0);
  for (const auto& [a, b] : edges) {
    if (a < 1 || b < 1 || a > n || b > n)
      throw std::invalid_argument("edge endpoint out of range");
    deg[a - 1] += a == b ? 2 : 1;
    if (a != b) deg[b - 1] += 1;
  }
  for (int d : deg)
    if (d != 3) throw std::invalid_argument("every vertex must have degree 3");
}

EdgeList relabeled(const EdgeList& edges, const std::vector<int>& newlab) {
  EdgeList out;
  out.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    int x = newlab[a - 1], y = newlab[b - 1];
    if (x > y) std::swap(x, y);
    out.emplace_back(x, y);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Isomorphism-invariant vertex keys: loop count and the multiplicity profile
// toward distinct neighbors, refined twice by the neighbors' keys. Only label
// assignments that list the key classes in order can realize the minimum, so
// the exhaustive search below permutes within classes only.
std::vector<long> vertex_keys(int n, const EdgeList& edges) {
  std::vector<int> loops(n, 0);
  std::vector<std::map<int, int>> mult(n);
  for (const auto& [a, b] : edges) {
    if (a == b) {
      ++loops[a - 1];
    } else {
      ++mult[a - 1][b - 1];
      ++mult[b - 1][a - 1];
    }
  }
  std::vector<long> key(n);
  for (int v = 0; v < n; ++v) {
    std::vector<int> profile;
    profile.reserve(mult[v].size());
    for (const auto& [w, m] : mult[v]) profile.push_back(m);
    std::sort(profile.begin(), profile.end());
    long h = loops[v];
    for (int m : profile) h = h * 8 + m;
    key[v] = h;
  }
  for (int round = 0; round < 2; ++round) {
    std::vector<long> ids(key);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto id_of = [&](long k) {
      return static_cast<long>(std::lower_bound(ids.begin(), ids.end(), k) - ids.begin());
    };
    std::vector<long> next(n);
    for (int v = 0; v < n; ++v) {
      std::vector<long> nb;
      nb.reserve(mult[v].size());
      for (const auto& [w, m] : mult[v]) nb.push_back(id_of(key[w]) * 8 + m);
      std::sort(nb.begin(), nb.end());
      long h = id_of(key[v]);
      for (long e : nb) h = h * 128 + e + 1;
      next[v] = h;
    }
    key = std::move(next);
  }
  return key;
}

EdgeList canonical_edges(int n, const EdgeList& edges) {
  const std::vector<long> key = vertex_keys(n, edges);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return key[a] != key[b] ? key[a] < key[b] : a < b;
  });
  std::vector<std::vector<int>> classes;
  for (int v : order) {
    if (classes.empty() || key[classes.back().front()] != key[v]) classes.push_back({});
    classes.back().push_back(v);
  }
  std::vector<int> newlab(n);
  EdgeList best;
  bool have = false;
  std::function<void(std::size_t)> rec = [&](std::size_t ci) {
    if (ci == classes.size()) {
      int lab = 0;
      for (const auto& cls : classes)
        for (int v : cls) newlab[v] = ++lab;
      EdgeList cand = relabeled(edges, newlab);
      if (!have || cand < best) {
        best = std::move(cand);
        have = true;
      }
      return;
    }
    std::vector<int>& cls = classes[ci];
    std::sort(cls.begin(), cls.end());
    do rec(ci + 1);
    while (std::next_permutation(cls.begin(), cls.end()));
  };
  rec(0);
  return best;
}

int component_count(int n, const EdgeList& edges) {
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (const auto& [a, b] : edges)
    if (a != b) root[find(a - 1)] = find(b - 1);
  int comps = 0;
  for (int v = 0; v < n; ++v)
    if (find(v) == v) ++comps;
  return comps;
}

constexpr int kS3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
constexpr int kS3Sign[6] = {1, -1, -1, 1, 1, -1};

long factorial(int n) {
  long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int perm_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++inv;
  return inv % 2 ? -1 : 1;
}

// Expand a wedge power of 3-letter blocks through a per-block linear map,
// memoizing the single-block images.
SparseTensor map_blocks(const SparseTensor& t, const TensorSpace& target,
                        const std::function<SparseTensor(const Word&)>& image) {
  const int m = t.space.factors()[0].wedge;
  std::map<Word, std::vector<std::pair<Word, Rational>>> memo;
  auto block = [&](const Word& b) -> const std::vector<std::pair<Word, Rational>>& {
    auto it = memo.find(b);
    if (it == memo.end()) {
      SparseTensor img = image(b);
      std::vector<std::pair<Word, Rational>> terms(img.terms.begin(), img.terms.end());
      it = memo.emplace(b, std::move(terms)).first;
    }
    return it->second;
  };
  TensorAccum acc(target);
  Word raw(3 * m, '\0');
  for (const auto& [w, coef] : t.terms) {
    std::vector<const std::vector<std::pair<Word, Rational>>*> exp(m);
    bool dead = false;
    for (int b = 0; b < m && !dead; ++b) {
      exp[b] = &block(w.substr(3 * b, 3));
      dead = exp[b]->empty();
    }
    if (dead) continue;
    std::vector<std::size_t> ch(m, 0);
    while (true) {
      Rational cf = coef;
      for (int b = 0; b < m; ++b) {
        const auto& [bw, bc] = (*exp[b])[ch[b]];
        std::copy(bw.begin(), bw.end(), raw.begin() + 3 * b);
        cf *= bc;
      }
      acc.add_raw(raw, cf);
      int b = 0;
      while (b < m && ++ch[b] == exp[b]->size()) ch[b++] = 0;
      if (b == m) break;
    }
  }
  return acc.take();
}

}  // namespace

TrivalentGraph TrivalentGraph::canonical(int vertices, EdgeList raw) {
  if (vertices < 2 || vertices % 2)
    throw std::invalid_argument("vertex count must be positive and even");
  if (vertices > 8) throw ResourceLimitError("graph canonicalization bounded at 8 vertices");
  for (auto& [a, b] : raw)
    if (a > b) std::swap(a, b);
  check_degrees(vertices, raw);
  TrivalentGraph g;
  g.vertices = vertices;
  g.edges = canonical_edges(vertices, raw);
  return g;
}

bool TrivalentGraph::has_loop() const {
  for (const auto& [a, b] : edges)
    if (a == b) return true;
  return false;
}

bool TrivalentGraph::connected() const { return component_count(vertices, edges) == 1; }

std::string TrivalentGraph::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) os << ',';
    os << edges[i].first << '-' << edges[i].second;
  }
  return os.str();
}

TrivalentGraph TrivalentGraph::parse(const std::string& s) {
  EdgeList edges;
  int n = 0;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t nxt = s.find(',', pos);
    std::string item = s.substr(pos, nxt == std::string::npos ? nxt : nxt - pos);
    std::size_t dash = item.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("bad edge: " + item);
    int a = std::stoi(item.substr(0, dash));
    int b = std::stoi(item.substr(dash + 1));
    edges.emplace_back(a, b);
    n = std::max({n, a, b});
    if (nxt == std::string::npos) break;
    pos = nxt + 1;
  }
  return canonical(n, std::move(edges));
}

TrivalentGraph theta_graph() { return TrivalentGraph::canonical(2, {{1, 2}, {1, 2}, {1, 2}}); }

TrivalentGraph dumbbell_graph() {
  return TrivalentGraph::canonical(2, {{1, 1}, {1, 2}, {2, 2}});
}

std::vector<TrivalentGraph> enumerate_graphs(int vertices, bool connected_only,
                                             bool loopless_only) {
  if (vertices < 2 || vertices % 2)
    throw std::invalid_argument("vertex count must be positive and even");
  if (vertices > 8) throw ResourceLimitError("graph enumeration bounded at 8 vertices");
  const int n = vertices;
  std::set<EdgeList> seen;
  std::vector<int> deficit(n, 3);
  EdgeList cur;
  // closes the lowest open slot each step; partners from one source are
  // chosen in non-decreasing order, so each edge multiset appears once
  std::function<void(int, int)> rec = [&](int u, int minv) {
    int first = -1;
    for (int v = 0; v < n; ++v)
      if (deficit[v]) {
        first = v;
        break;
      }
    if (first < 0) {
      if (!connected_only || component_count(n, cur) == 1) seen.insert(canonical_edges(n, cur));
      return;
    }
    if (first != u) {
      u = first;
      minv = u;
    }
    for (int v = minv; v < n; ++v) {
      if (v == u) {
        if (loopless_only || deficit[u] < 2) continue;
        deficit[u] -= 2;
        cur.emplace_back(u + 1, u + 1);
        rec(u, v);
        cur.pop_back();
        deficit[u] += 2;
      } else if (deficit[v]) {
        --deficit[u];
        --deficit[v];
        cur.emplace_back(u + 1, v + 1);
        rec(u, v);
        cur.pop_back();
        ++deficit[u];
        ++deficit[v];
      }
    }
  };
  rec(0, 0);
  std::vector<TrivalentGraph> out;
  out.reserve(seen.size());
  for (const EdgeList& es : seen) {
    TrivalentGraph g;
    g.vertices = n;
    g.edges = es;
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TrivalentGraph graph_of_diagram(const ChordDiagram& c) {
  if (c.n() == 0 || c.n() % 6 != 0)
    throw std::invalid_argument("diagram needs 6k slots to collapse into triples");
  const int n = c.n() / 3;
  EdgeList es;
  es.reserve(c.pairs.size());
  for (const auto& [i, j] : c.pairs) es.emplace_back((i - 1) / 3 + 1, (j - 1) / 3 + 1);
  return TrivalentGraph::canonical(n, std::move(es));
}

ChordDiagram lift_of_graph(const TrivalentGraph& gamma) {
  std::vector<int> used(gamma.vertices, 0);
  auto slot = [&](int v) { return 3 * (v - 1) + ++used[v - 1]; };
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(gamma.edges.size());
  for (const auto& [a, b] : gamma.edges) {
    int i = slot(a), j = slot(b);
    pairs.emplace_back(i, j);
  }
  return ChordDiagram::canonical(std::move(pairs));
}

SparseTensor a_graph_from(const ChordDiagram& c, int g) {
  if (c.n() == 0 || c.n() % 6 != 0)
    throw std::invalid_argument("diagram needs 6k slots to collapse into triples");
  const int m = c.n() / 3;
  if (m > 4) throw ResourceLimitError("a_graph bounded at 4 wedge blocks");
  if (g > 4) throw ResourceLimitError("a_graph bounded at genus 4");
  TensorAccum acc(TensorSpace::wedge_pow(g, {Primitive::W3}, m));
  for (const auto& [w, coef] : a_tensor(c, g).terms) acc.add_raw(w, coef);
  return acc.take();
}

SparseTensor a_graph(const TrivalentGraph& gamma, int g) {
  return a_graph_from(lift_of_graph(gamma), g);
}

Rational alpha_graph(const TrivalentGraph& gamma, const SparseTensor& t) {
  const int m = gamma.vertices;
  const int g = t.space.g();
  if (t.space != TensorSpace::wedge_pow(g, {Primitive::W3}, m))
    throw std::invalid_argument("alpha_graph needs a wedge power of wedge^3 H matching the graph");
  if (m > 4) throw ResourceLimitError("alpha_graph bounded at 4 wedge blocks");
  const ChordDiagram c = lift_of_graph(gamma);
  const int csign = diagram_sign(c);
  const int len = 3 * m;
  std::vector<int> bp(m);
  Word e(len, '\0');
  Rational total;
  for (const auto& [w, coef] : t.terms) {
    long sum = 0;
    std::iota(bp.begin(), bp.end(), 0);
    do {
      const int bsign = perm_sign(bp);
      std::vector<int> ch(m, 0);
      while (true) {
        int sign = bsign;
        for (int b = 0; b < m; ++b) {
          sign *= kS3Sign[ch[b]];
          for (int s = 0; s < 3; ++s) e[3 * bp[b] + s] = w[3 * b + kS3[ch[b]][s]];
        }
        int prod = 1;
        for (const auto& [i, j] : c.pairs) {
          prod *= mu_code(static_cast<unsigned char>(e[i - 1]),
                          static_cast<unsigned char>(e[j - 1]));
          if (!prod) break;
        }
        sum += sign * prod;
        int b = 0;
        while (b < m && ++ch[b] == 6) ch[b++] = 0;
        if (b == m) break;
      }
    } while (std::next_permutation(bp.begin(), bp.end()));
    total += coef * Rational(csign * sum);
  }
  return total / Rational(factorial(m));
}

SparseTensor project_u_blocks(const SparseTensor& t) {
  const auto& fs = t.space.factors();
  if (fs.size() != 1 || fs[0].base.kind != Primitive::W3)
    throw std::invalid_argument("project_u_blocks needs a wedge power of wedge^3 H");
  const int g = t.space.g();
  const TensorSpace w3 = TensorSpace::wedge3(g);
  return map_blocks(t, TensorSpace::wedge_pow(g, {Primitive::U}, fs[0].wedge),
                    [&](const Word& b) {
                      SparseTensor one(w3);
                      one.add_canonical(b, Rational(1));
                      return project_U(one);
                    });
}

Rational beta_graph(const TrivalentGraph& gamma, const SparseTensor& t) {
  if (gamma.has_loop()) throw std::invalid_argument("beta_graph needs a loopless graph");
  const auto& fs = t.space.factors();
  if (fs.size() != 1 || fs[0].base.kind != Primitive::U)
    throw std::invalid_argument("beta_graph needs a wedge power of U");
  if (fs[0].wedge != gamma.vertices)
    throw std::invalid_argument("block count must match the graph size");
  const int g = t.space.g();
  SparseTensor lifted =
      map_blocks(t, TensorSpace::wedge_pow(g, {Primitive::W3}, fs[0].wedge),
                 [&](const Word& b) { return u_section(g, b); });
  return alpha_graph(gamma, lifted);
}

GraphMonomial GraphMonomial::of_graph(const TrivalentGraph& gamma) {
  const int n = gamma.vertices;
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (const auto& [a, b] : gamma.edges)
    if (a != b) root[find(a - 1)] = find(b - 1);
  std::map<int, std::vector<int>> comps;
  for (int v = 0; v < n; ++v) comps[find(v)].push_back(v);
  GraphMonomial mono;
  for (const auto& [r, verts] : comps) {
    std::vector<int> local(n, 0);
    for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i) + 1;
    EdgeList es;
    for (const auto& [a, b] : gamma.edges)
      if (find(a - 1) == r) es.emplace_back(local[a - 1], local[b - 1]);
    mono.components.push_back(
        TrivalentGraph::canonical(static_cast<int>(verts.size()), std::move(es)));
  }
  std::sort(mono.components.begin(), mono.components.end());
  return mono;
}

int GraphMonomial::vertices() const {
  int n = 0;
  for (const auto& c : components) n += c.vertices;
  return n;
}

std::string GraphMonomial::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) os << ';';
    os << components[i].str();
  }
  return os.str();
}

std::string GraphRelation::json() const {
  std::ostringstream os;
  os << "{\"k\":" << k << ",\"genus\":" << genus
     << ",\"vanishes\":" << (vanishes ? "true" : "false")
     << ",\"nonzero_next\":" << (nonzero_next ? "true" : "false")
     << ",\"tensor_checked\":" << (tensor_checked ? "true" : "false") << ",\"expansion\":[";
  for (std::size_t i = 0; i < expansion.size(); ++i) {
    if (i) os << ',';
    os << "{\"monomial\":\"" << expansion[i].first.str()
       << "\",\"multiplicity\":" << expansion[i].second << '}';
  }
  os << "]}";
  return os.str();
}

GraphRelation extract_relation(int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (k > 2) throw ResourceLimitError("relation extraction bounded at k = 2");
  const int ck = 3 * k;
  const int genus = 3 * k - 1;
  DiagramBasis basis(ck);
  const std::size_t m = basis.size();

  GraphRelation rel;
  rel.k = k;
  rel.genus = genus;

  std::map<GraphMonomial, long> mult;
  for (std::size_t i = 0; i < m; ++i)
    ++mult[GraphMonomial::of_graph(graph_of_diagram(basis.at(i)))];
  for (const auto& [mono, c] : mult) rel.expansion.emplace_back(mono, Rational(c));

  // 0-based partner tables and diagram-independent data for the pair scan
  const int n = 2 * ck;
  std::vector<std::array<int, 12>> partner(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [a, b] : basis.at(i).pairs) {
      partner[i][a - 1] = b - 1;
      partner[i][b - 1] = a - 1;
    }

  // spot-check the closed-form pairing against the tensor-backed sign route
  std::mt19937 rng(12021);
  for (int s = 0; s < 200; ++s) {
    const ChordDiagram& c = basis.at(rng() % m);
    const ChordDiagram& d = basis.at(rng() % m);
    if (pairing_cycle_form(c, d, genus) != pairing_formula(c, d, genus))
      throw VerificationError("cycle-form pairing disagrees with the evaluated sign");
  }

  // per functional, signed counts of pairs by union component count; row sums
  // at any genus follow by weighting with (2g)^r
  std::vector<std::array<long long, 7>> cnt(m, {0, 0, 0, 0, 0, 0, 0});
  for (std::size_t i = 0; i < m; ++i) {
    const auto& pi = partner[i];
    for (std::size_t j = i; j < m; ++j) {
      const auto& pj = partner[j];
      unsigned visited = 0;
      int r = 0;
      for (int v = 0; v < n; ++v) {
        if (visited & (1u << v)) continue;
        ++r;
        int w = v;
        do {
          visited |= 1u << w;
          const int x = pi[w];
          visited |= 1u << x;
          w = pj[x];
        } while (w != v);
      }
      const int sign = (ck + r) % 2 ? -1 : 1;
      cnt[i][r] += sign;
      if (j != i) cnt[j][r] += sign;
    }
  }
  auto row_sum = [&](std::size_t i, int g) {
    long long s = 0, p = 1;
    for (int r = 1; r <= ck; ++r) {
      p *= 2 * g;
      s += cnt[i][r] * p;
    }
    return s;
  };
  bool vanish = true, above = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (row_sum(i, genus) != 0) vanish = false;
    if (row_sum(i, genus + 1) != 0) above = true;
  }
  rel.vanishes = vanish;
  rel.nonzero_next = above;

  // consistency with the per-functional scan in the chord module, plus the
  // literal tensor sums where they fit in memory
  if (k == 1) {
    SumRelationReport rep = verify_sum_relation(ck, genus);
    if (rep.is_zero != rel.vanishes)
      throw VerificationError("relation scan disagrees with the chord-module row sums");
    SparseTensor low(TensorSpace::h_pow(genus, n));
    SparseTensor high(TensorSpace::h_pow(genus + 1, n));
    for (std::size_t i = 0; i < m; ++i) {
      low += a_tensor(basis.at(i), genus);
      high += a_tensor(basis.at(i), genus + 1);
    }
    rel.tensor_checked = low.is_zero() && !high.is_zero();
  }
  return rel;
}

Rational e1_cocycle_functional(const SparseTensor& t, int g) {
  if (g < 2) throw std::invalid_argument("cocycle functional needs genus at least 2");
  if (t.space.g() != g) throw std::invalid_argument("tensor genus mismatch");
  const Rational ad = alpha_graph(dumbbell_graph(), t);
  const Rational at = alpha_graph(theta_graph(), t);
  return (Rational(-3) * ad + Rational(2 * g - 2) * at) / Rational(2 * g + 1);
}

}  // namespace mcg
