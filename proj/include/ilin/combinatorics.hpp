#pragma once

#include <cstddef>
#include <vector>

namespace ilin {

/// All non-empty subsets of `items`, in bitmask order.
template <class T>
std::vector<std::vector<T>> nonempty_subsets(const std::vector<T>& items) {
  std::vector<std::vector<T>> out;
  const std::size_t n = items.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<T> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.push_back(items[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Cartesian product of the option lists. An empty input yields one empty tuple.
template <class T>
std::vector<std::vector<T>> cartesian(const std::vector<std::vector<T>>& options) {
  std::vector<std::vector<T>> out{{}};
  for (const auto& opts : options) {
    std::vector<std::vector<T>> next;
    for (const auto& prefix : out) {
      for (const auto& o : opts) {
        auto t = prefix;
        t.push_back(o);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace ilin
