#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace spatialprompt {

/// Union by rank with path halving.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t size) : parents_(size), ranks_(size, 0) {
    std::iota(parents_.begin(), parents_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parents_[x] != x) {
      parents_[x] = parents_[parents_[x]];
      x = parents_[x];
    }
    return x;
  }

  /// Returns false if already joined.
  bool join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (ranks_[a] < ranks_[b]) std::swap(a, b);
    parents_[b] = a;
    if (ranks_[a] == ranks_[b]) ++ranks_[a];
    return true;
  }

  bool in_same_set(std::size_t a, std::size_t b) { return find(a) == find(b); }

  std::size_t size() const { return parents_.size(); }

 private:
  std::vector<std::size_t> parents_;
  std::vector<unsigned char> ranks_;
};

}  // namespace spatialprompt
