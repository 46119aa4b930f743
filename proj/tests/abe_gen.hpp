#pragma once

// Random access trees and attribute sets for property tests.

#include <algorithm>
#include <string>
#include <vector>

#include "locauth/abe/access_tree.hpp"
#include "locauth/rng.hpp"

namespace testgen {

inline constexpr int kUniverse = 10;

inline locauth::abe::Attribute attr(int i) {
  return locauth::abe::Attribute::parse("a" + std::to_string(i));
}

/// Random threshold tree with exactly `leaves` leaves (1..8 in practice).
inline locauth::abe::AccessTree random_tree(locauth::Rng& rng, int leaves) {
  using locauth::abe::AccessNode;
  if (leaves == 1) {
    return AccessNode::leaf(attr(static_cast<int>(rng.uniform(kUniverse))));
  }
  // Split the leaves among 2..min(leaves, 4) children.
  const int max_children = std::min(leaves, 4);
  const int n = 2 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(max_children - 1)));
  std::vector<int> sizes(n, 1);
  for (int extra = leaves - n; extra > 0; --extra) sizes[rng.uniform(n)]++;
  std::vector<AccessNode> children;
  for (int s : sizes) children.push_back(random_tree(rng, s));
  const auto k = 1 + static_cast<std::uint32_t>(rng.uniform(static_cast<std::uint64_t>(n)));
  return AccessNode::gate(k, std::move(children));
}

inline locauth::abe::AttributeSet random_attrs(locauth::Rng& rng) {
  locauth::abe::AttributeSet out;
  while (out.empty()) {
    for (int i = 0; i < kUniverse; ++i) {
      if (rng.uniform(2) == 0) out.insert(attr(i));
    }
  }
  return out;
}

}  // namespace testgen
