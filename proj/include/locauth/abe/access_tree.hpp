#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locauth/abe/attribute.hpp"
#include "locauth/bytes.hpp"

namespace locauth::abe {

/// Node of a threshold-gate access tree. A leaf names one attribute; a gate is
/// satisfied when at least `threshold` of its children are. AND is n-of-n and
/// OR is 1-of-n. Children carry implicit 1-based indices in order.
class AccessNode {
 public:
  static constexpr std::size_t kMaxChildren = 255;

  /// Empty placeholder (no leaves); only meaningful as an assignment target.
  AccessNode() = default;

  static AccessNode leaf(Attribute attr);
  /// Throws std::invalid_argument unless 1 <= threshold <= children.size() <= 255.
  static AccessNode gate(std::uint32_t threshold, std::vector<AccessNode> children);
  static AccessNode all_of(std::vector<AccessNode> children);
  static AccessNode any_of(std::vector<AccessNode> children);

  bool is_leaf() const { return attribute_.has_value(); }
  const Attribute& attribute() const { return *attribute_; }
  std::uint32_t threshold() const { return threshold_; }
  const std::vector<AccessNode>& children() const { return children_; }

  bool is_and() const { return !is_leaf() && threshold_ == children_.size(); }
  bool is_or() const { return !is_leaf() && threshold_ == 1; }

  std::size_t leaf_count() const;

  friend bool operator==(const AccessNode&, const AccessNode&) = default;

 private:
  std::optional<Attribute> attribute_;
  std::uint32_t threshold_ = 1;
  std::vector<AccessNode> children_;
};

using AccessTree = AccessNode;

/// Pure predicate: does `attrs` satisfy `tree`?
bool satisfies(const AttributeSet& attrs, const AccessTree& tree);

/// Leaf attributes in preorder (the order ciphertext leaf components use).
std::vector<Attribute> leaves_in_order(const AccessTree& tree);

/// Canonical prefix encoding: gate = 0x01 k n children..., leaf = 0x02 len name.
void encode_tree(Bytes& out, const AccessTree& tree);
Bytes encode_tree(const AccessTree& tree);
AccessTree decode_tree(ByteReader& in);

/// Human-readable rendering; AND/OR gates print infix, other gates as "k of (...)".
std::string to_string(const AccessTree& tree);

}  // namespace locauth::abe
