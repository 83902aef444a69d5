#pragma once

// Vietoris-Rips persistent homology in dimensions 0 and 1 over Z/2.
//
// Convention: an edge {i, j} enters the filtration at d(i, j) and a triangle
// at the largest of its three edge lengths. Two reductions are provided:
//
//  * compute_persistence: union-find for H0, then a reduction of the
//    coboundary matrix of the non-tree edges (persistent cohomology) with
//    clearing, implicit coboundaries and a shortcut for columns whose first
//    coface is not yet claimed. Intended for tracks of a few thousand points.
//
//  * naive_reduce: materializes the whole 2-skeleton and reduces the boundary
//    matrix left to right. Exponentially dumber, kept as a reference.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "looptrack/error.hpp"
#include "looptrack/metric.hpp"
#include "looptrack/union_find.hpp"

namespace looptrack {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  bool essential() const noexcept { return std::isinf(death); }
  double lifespan() const noexcept { return death - birth; }

  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  std::size_t n_points = 0;
  double cap = 0.0;

  std::vector<PersistencePair> of_dim(int dim) const {
    std::vector<PersistencePair> out;
    for (const auto& p : pairs) {
      if (p.dim == dim) out.push_back(p);
    }
    return out;
  }

  // Sorts pairs by (dim, birth, death) so that equal multisets compare equal.
  void canonicalize() { std::sort(pairs.begin(), pairs.end()); }
};

struct Simplex {
  std::array<std::size_t, 3> vertices{};
  std::size_t dimension = 0;  // vertex count minus one
  double value = 0.0;

  std::span<const std::size_t> verts() const noexcept { return {vertices.data(), dimension + 1}; }
};

// Simplices ordered by (value, dimension, lexicographic vertices), which puts
// every face before its cofaces.
struct Filtration {
  std::vector<Simplex> simplices;
  double cap = 0.0;
};

inline bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dimension != b.dimension) return a.dimension < b.dimension;
  return std::lexicographical_compare(a.verts().begin(), a.verts().end(), b.verts().begin(),
                                      b.verts().end());
}

// Rips 2-skeleton truncated at `cap`.
inline Filtration build_filtration(const DistanceMatrix& m, double cap) {
  if (!(cap >= 0.0)) throw ConfigError("build_filtration: cap must be >= 0");
  const std::size_t n = m.size();
  Filtration f;
  f.cap = cap;
  for (std::size_t i = 0; i < n; ++i) f.simplices.push_back({{i, 0, 0}, 0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = m(i, j);
      if (dij > cap) continue;
      f.simplices.push_back({{i, j, 0}, 1, dij});
      for (std::size_t k = j + 1; k < n; ++k) {
        const double dik = m(i, k);
        const double djk = m(j, k);
        if (dik > cap || djk > cap) continue;
        f.simplices.push_back({{i, j, k}, 2, std::max({dij, dik, djk})});
      }
    }
  }
  std::sort(f.simplices.begin(), f.simplices.end(), filtration_less);
  return f;
}

namespace detail {

inline std::int64_t choose2(std::int64_t x) noexcept { return x * (x - 1) / 2; }
inline std::int64_t choose3(std::int64_t x) noexcept { return x * (x - 1) * (x - 2) / 6; }

// Colexicographic rank of a sorted vertex tuple.
inline std::int64_t edge_rank(std::int64_t lo, std::int64_t hi) noexcept { return choose2(hi) + lo; }
inline std::int64_t triangle_rank(std::int64_t lo, std::int64_t mid, std::int64_t hi) noexcept {
  return choose3(hi) + choose2(mid) + lo;
}

// A simplex of fixed dimension identified by (filtration value, colex rank);
// the pair ordering is a valid filtration order within one dimension.
struct Entry {
  double value = 0.0;
  std::int64_t rank = 0;

  friend auto operator<=>(const Entry&, const Entry&) = default;
};

struct Edge {
  double value = 0.0;
  std::int64_t rank = 0;
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
};

class CofaceEnumerator {
 public:
  CofaceEnumerator(const DistanceMatrix& m, double cap) : m_(m), cap_(cap) {}

  // Calls f(Entry) for each triangle {lo, hi, k} inside the cap, in
  // increasing colex rank. Stops early when f returns false.
  template <typename F>
  void for_each(const Edge& e, F&& f) const {
    const std::size_t n = m_.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (k == e.lo || k == e.hi) continue;
      const double d_lo = m_(e.lo, k);
      if (d_lo > cap_) continue;
      const double d_hi = m_(e.hi, k);
      if (d_hi > cap_) continue;
      const double value = std::max({e.value, d_lo, d_hi});
      std::int64_t rank;
      if (k < e.lo) {
        rank = triangle_rank(k, e.lo, e.hi);
      } else if (k < e.hi) {
        rank = triangle_rank(e.lo, k, e.hi);
      } else {
        rank = triangle_rank(e.lo, e.hi, k);
      }
      if (!f(Entry{value, rank})) return;
    }
  }

  // Earliest coface in filtration order. Ranks increase with k, so the first
  // coface sharing the edge's own value is the minimum.
  std::optional<Entry> first(const Edge& e) const {
    std::optional<Entry> best;
    for_each(e, [&](const Entry& c) {
      if (!best || c < *best) best = c;
      return c.value != e.value;
    });
    return best;
  }

 private:
  const DistanceMatrix& m_;
  double cap_;
};

using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

// Removes and returns the smallest entry with odd multiplicity.
inline std::optional<Entry> pop_pivot(MinHeap& heap) {
  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    if (!heap.empty() && heap.top() == top) {
      heap.pop();
      continue;
    }
    return top;
  }
  return std::nullopt;
}

// Keeps one copy of each index that occurs an odd number of times.
inline void reduce_mod2(std::vector<std::uint32_t>& column) {
  std::sort(column.begin(), column.end());
  std::size_t out = 0;
  for (std::size_t i = 0; i < column.size();) {
    std::size_t j = i;
    while (j < column.size() && column[j] == column[i]) ++j;
    if ((j - i) % 2 == 1) column[out++] = column[i];
    i = j;
  }
  column.resize(out);
}

}  // namespace detail

// Persistence pairs of the Rips filtration of `m` truncated at `cap`.
// Zero-lifespan pairs are dropped; classes alive at the cap are reported
// with death = +inf.
inline PersistenceDiagram compute_persistence(const DistanceMatrix& m, double cap) {
  using detail::Edge;
  using detail::Entry;
  if (!(cap >= 0.0)) throw ConfigError("compute_persistence: cap must be >= 0");
  const std::size_t n = m.size();
  if (n == 0) throw ConfigError("compute_persistence: empty distance matrix");
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("compute_persistence: too many points");
  }

  PersistenceDiagram diagram;
  diagram.n_points = n;
  diagram.cap = cap;

  std::vector<Edge> edges;
  for (std::size_t hi = 1; hi < n; ++hi) {
    const auto row = m.row(hi);
    for (std::size_t lo = 0; lo < hi; ++lo) {
      if (row[lo] <= cap) {
        edges.push_back({row[lo], detail::edge_rank(static_cast<std::int64_t>(lo),
                                                    static_cast<std::int64_t>(hi)),
                         static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.value != b.value ? a.value < b.value : a.rank < b.rank;
  });

  // H0. Tree edges are exactly the pivots of the vertex coboundaries, so they
  // are cleared from the H1 reduction.
  UnionFind components(n);
  std::vector<bool> tree_edge(edges.size(), false);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (components.unite(edges[i].lo, edges[i].hi)) {
      tree_edge[i] = true;
      if (edges[i].value > 0.0) diagram.pairs.push_back({0, 0.0, edges[i].value});
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (components.find(v) == v) diagram.pairs.push_back({0, 0.0, kInfinity});
  }

  // H1: coboundary columns of the remaining edges, latest edge first.
  const detail::CofaceEnumerator cofaces(m, cap);
  std::unordered_map<std::int64_t, std::size_t> pivot_owner;
  std::vector<std::vector<std::uint32_t>> reductions;

  auto record = [&](const Entry& pivot, std::vector<std::uint32_t> column, const Edge& e) {
    pivot_owner.emplace(pivot.rank, reductions.size());
    reductions.push_back(std::move(column));
    if (pivot.value > e.value) diagram.pairs.push_back({1, e.value, pivot.value});
  };

  for (std::size_t pos = edges.size(); pos-- > 0;) {
    if (tree_edge[pos]) continue;
    const Edge& e = edges[pos];
    const auto self = static_cast<std::uint32_t>(pos);

    const std::optional<Entry> first = cofaces.first(e);
    if (!first) {
      diagram.pairs.push_back({1, e.value, kInfinity});
      continue;
    }
    if (!pivot_owner.contains(first->rank)) {
      record(*first, {self}, e);
      continue;
    }

    detail::MinHeap working;
    std::vector<std::uint32_t> column{self};
    auto push_cofaces = [&](const Edge& edge) {
      cofaces.for_each(edge, [&](const Entry& c) {
        working.push(c);
        return true;
      });
    };
    push_cofaces(e);
    while (true) {
      const std::optional<Entry> pivot = detail::pop_pivot(working);
      if (!pivot) {
        diagram.pairs.push_back({1, e.value, kInfinity});
        break;
      }
      const auto owner = pivot_owner.find(pivot->rank);
      if (owner == pivot_owner.end()) {
        detail::reduce_mod2(column);
        record(*pivot, std::move(column), e);
        break;
      }
      working.push(*pivot);
      for (const std::uint32_t other : reductions[owner->second]) {
        push_cofaces(edges[other]);
        column.push_back(other);
      }
    }
  }

  diagram.canonicalize();
  return diagram;
}

// Same, truncated at the enclosing radius so every finite H1 class is seen.
inline PersistenceDiagram compute_persistence(const DistanceMatrix& m) {
  return compute_persistence(m, enclosing_radius(m));
}

inline constexpr std::size_t kNaiveReduceMaxPoints = 25;

// Reference reduction of the full boundary matrix of the 2-skeleton.
inline PersistenceDiagram naive_reduce(const DistanceMatrix& m, double cap) {
  const std::size_t n = m.size();
  if (n == 0) throw ConfigError("naive_reduce: empty distance matrix");
  if (n > kNaiveReduceMaxPoints) {
    throw ConfigError("naive_reduce: " + std::to_string(n) + " points exceeds the limit of " +
                      std::to_string(kNaiveReduceMaxPoints));
  }
  const Filtration f = build_filtration(m, cap);
  const std::size_t count = f.simplices.size();

  // Position of each vertex and edge in the filtration.
  std::vector<std::size_t> vertex_pos(n);
  std::vector<std::size_t> edge_pos(n * n, count);
  for (std::size_t p = 0; p < count; ++p) {
    const auto& s = f.simplices[p];
    if (s.dimension == 0) vertex_pos[s.vertices[0]] = p;
    if (s.dimension == 1) {
      edge_pos[s.vertices[0] * n + s.vertices[1]] = p;
      edge_pos[s.vertices[1] * n + s.vertices[0]] = p;
    }
  }

  std::vector<std::vector<std::size_t>> columns(count);
  for (std::size_t p = 0; p < count; ++p) {
    const auto& s = f.simplices[p];
    const auto v = s.vertices;
    if (s.dimension == 1) {
      columns[p] = {vertex_pos[v[0]], vertex_pos[v[1]]};
    } else if (s.dimension == 2) {
      columns[p] = {edge_pos[v[0] * n + v[1]], edge_pos[v[0] * n + v[2]], edge_pos[v[1] * n + v[2]]};
    }
    std::sort(columns[p].begin(), columns[p].end());
  }

  PersistenceDiagram diagram;
  diagram.n_points = n;
  diagram.cap = cap;

  std::vector<std::size_t> low_owner(count, count);
  std::vector<bool> paired(count, false);
  for (std::size_t j = 0; j < count; ++j) {
    auto& col = columns[j];
    while (!col.empty() && low_owner[col.back()] != count) {
      const auto& other = columns[low_owner[col.back()]];
      std::vector<std::size_t> sum;
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(sum));
      col = std::move(sum);
    }
    if (col.empty()) continue;
    const std::size_t low = col.back();
    low_owner[low] = j;
    paired[low] = true;
    paired[j] = true;
    const auto& born = f.simplices[low];
    const auto& dies = f.simplices[j];
    if (dies.value > born.value) {
      diagram.pairs.push_back({static_cast<int>(born.dimension), born.value, dies.value});
    }
  }
  for (std::size_t p = 0; p < count; ++p) {
    const auto& s = f.simplices[p];
    if (!paired[p] && s.dimension < 2) {
      diagram.pairs.push_back({static_cast<int>(s.dimension), s.value, kInfinity});
    }
  }
  diagram.canonicalize();
  return diagram;
}

inline PersistenceDiagram naive_reduce(const DistanceMatrix& m) {
  return naive_reduce(m, enclosing_radius(m));
}

struct BettiNumbers {
  std::size_t b0 = 0;
  std::size_t b1 = 0;

  friend bool operator==(const BettiNumbers&, const BettiNumbers&) = default;
};

// Classes alive at scale r: birth <= r < death.
inline BettiNumbers betti_numbers(const PersistenceDiagram& diagram, double r) {
  if (!(r >= 0.0)) throw ConfigError("betti_numbers: scale must be >= 0");
  if (r > diagram.cap) {
    throw ConfigError("betti_numbers: scale exceeds the filtration cap; the diagram is truncated there");
  }
  BettiNumbers b;
  for (const auto& p : diagram.pairs) {
    if (p.birth <= r && r < p.death) {
      if (p.dim == 0) ++b.b0;
      if (p.dim == 1) ++b.b1;
    }
  }
  return b;
}

}  // namespace looptrack
