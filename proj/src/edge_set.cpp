#include "nibblepack/edge_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace nibblepack {

void EdgeSet::clear() {
  std::fill(bits_.begin(), bits_.end(), 0);
  count_ = 0;
}

size_t EdgeSet::degree(uint32_t v) const {
  const uint64_t* r = bits_.data() + row_offset(v);
  size_t d = 0;
  for (uint32_t w = 0; w < words_; ++w) d += std::popcount(r[w]);
  return d;
}

void EdgeSet::neighbors(uint32_t v, std::vector<uint32_t>& out) const {
  out.clear();
  for_each_neighbor(v, [&](uint32_t w) { out.push_back(w); });
}

std::vector<Edge> EdgeSet::edges() const {
  std::vector<Edge> out;
  out.reserve(count_);
  for_each_edge([&](Edge e) { out.push_back(e); });
  return out;
}

void EdgeSet::insert_all(const EdgeSet& other) {
  if (n_ != other.n_) throw std::invalid_argument("EdgeSet::insert_all: vertex count mismatch");
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  count_ = recount();
}

void EdgeSet::erase_all(const EdgeSet& other) {
  if (n_ != other.n_) throw std::invalid_argument("EdgeSet::erase_all: vertex count mismatch");
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~other.bits_[i];
  count_ = recount();
}

bool EdgeSet::intersects(const EdgeSet& other) const {
  if (n_ != other.n_) throw std::invalid_argument("EdgeSet::intersects: vertex count mismatch");
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & other.bits_[i]) return true;
  return false;
}

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
  if (n_ != other.n_) throw std::invalid_argument("EdgeSet::is_subset_of: vertex count mismatch");
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~other.bits_[i]) return false;
  return true;
}

size_t EdgeSet::recount() const {
  size_t total = 0;
  for (uint64_t w : bits_) total += std::popcount(w);
  return total / 2;
}

EdgeSet complete_graph(uint32_t n) {
  EdgeSet s(n);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v) s.insert(u, v);
  return s;
}

}  // namespace nibblepack
