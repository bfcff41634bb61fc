#pragma once

#include <bit>
#include <cassert>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace nibblepack {

// Canonical undirected edge: u < v always.
struct Edge {
  uint32_t u = 0;
  uint32_t v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(uint32_t a, uint32_t b) {
  assert(a != b);
  return a < b ? Edge{a, b} : Edge{b, a};
}

// Dense index of a canonical edge, used to key per-edge random draws.
inline uint64_t edge_index(Edge e, uint32_t n) {
  return static_cast<uint64_t>(e.u) * n + e.v;
}

// Set of undirected edges over vertices {0..n-1}, stored as packed
// per-vertex adjacency bit rows. Neighborhood intersections are
// word-parallel; iteration order is lexicographic on (u, v) with u < v.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(uint32_t n)
      : n_(n), words_((n + 63) / 64), bits_(static_cast<size_t>(n) * words_, 0) {}

  uint32_t vertex_count() const { return n_; }
  size_t edge_count() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(uint32_t u, uint32_t v) const {
    assert(u < n_ && v < n_);
    if (u == v) return false;
    return (bits_[row_offset(u) + (v >> 6)] >> (v & 63)) & 1;
  }
  bool contains(Edge e) const { return contains(e.u, e.v); }

  // Returns true when the edge was not present before.
  bool insert(uint32_t u, uint32_t v) {
    assert(u < n_ && v < n_ && u != v);
    uint64_t& wu = bits_[row_offset(u) + (v >> 6)];
    uint64_t bu = 1ULL << (v & 63);
    if (wu & bu) return false;
    wu |= bu;
    bits_[row_offset(v) + (u >> 6)] |= 1ULL << (u & 63);
    ++count_;
    return true;
  }
  bool insert(Edge e) { return insert(e.u, e.v); }

  bool erase(uint32_t u, uint32_t v) {
    assert(u < n_ && v < n_ && u != v);
    uint64_t& wu = bits_[row_offset(u) + (v >> 6)];
    uint64_t bu = 1ULL << (v & 63);
    if (!(wu & bu)) return false;
    wu &= ~bu;
    bits_[row_offset(v) + (u >> 6)] &= ~(1ULL << (u & 63));
    --count_;
    return true;
  }
  bool erase(Edge e) { return erase(e.u, e.v); }

  void clear();

  size_t degree(uint32_t v) const;

  std::span<const uint64_t> row(uint32_t v) const {
    assert(v < n_);
    return {bits_.data() + row_offset(v), words_};
  }

  void neighbors(uint32_t v, std::vector<uint32_t>& out) const;

  // Calls fn(w) for every neighbor w of v, ascending.
  template <typename Fn>
  void for_each_neighbor(uint32_t v, Fn&& fn) const {
    const uint64_t* r = bits_.data() + row_offset(v);
    for (uint32_t w = 0; w < words_; ++w) {
      uint64_t word = r[w];
      while (word) {
        fn(static_cast<uint32_t>((w << 6) + std::countr_zero(word)));
        word &= word - 1;
      }
    }
  }

  // Calls fn(Edge{u, v}) for every edge, lexicographic on (u, v), u < v.
  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (uint32_t u = 0; u < n_; ++u) {
      const uint64_t* r = bits_.data() + row_offset(u);
      for (uint32_t w = u >> 6; w < words_; ++w) {
        uint64_t word = r[w];
        if (w == (u >> 6)) word &= ~((2ULL << (u & 63)) - 1);
        while (word) {
          fn(Edge{u, static_cast<uint32_t>((w << 6) + std::countr_zero(word))});
          word &= word - 1;
        }
      }
    }
  }

  std::vector<Edge> edges() const;

  // Set algebra over equal vertex counts.
  void insert_all(const EdgeSet& other);
  void erase_all(const EdgeSet& other);
  bool intersects(const EdgeSet& other) const;
  bool is_subset_of(const EdgeSet& other) const;

  bool operator==(const EdgeSet& other) const {
    return n_ == other.n_ && bits_ == other.bits_;
  }

  // Recount from the raw bits; used to cross-check the running count.
  size_t recount() const;

  static size_t common_count(std::span<const uint64_t> a, std::span<const uint64_t> b) {
    assert(a.size() == b.size());
    size_t c = 0;
    for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
    return c;
  }

 private:
  size_t row_offset(uint32_t v) const { return static_cast<size_t>(v) * words_; }

  uint32_t n_ = 0;
  uint32_t words_ = 0;
  size_t count_ = 0;
  std::vector<uint64_t> bits_;
};

EdgeSet complete_graph(uint32_t n);

}  // namespace nibblepack
