#include "locauth/abe/access_tree.hpp"

#include <stdexcept>

namespace locauth::abe {

namespace {
constexpr std::uint8_t kGateTag = 0x01;
constexpr std::uint8_t kLeafTag = 0x02;
constexpr int kMaxDecodeDepth = 64;
}  // namespace

AccessNode AccessNode::leaf(Attribute attr) {
  AccessNode n;
  n.attribute_ = std::move(attr);
  return n;
}

AccessNode AccessNode::gate(std::uint32_t threshold, std::vector<AccessNode> children) {
  if (children.empty()) throw std::invalid_argument("gate needs at least one child");
  if (children.size() > kMaxChildren) throw std::invalid_argument("gate has too many children");
  if (threshold < 1 || threshold > children.size()) {
    throw std::invalid_argument("gate threshold " + std::to_string(threshold) + " outside [1, " +
                                std::to_string(children.size()) + "]");
  }
  AccessNode n;
  n.threshold_ = threshold;
  n.children_ = std::move(children);
  return n;
}

AccessNode AccessNode::all_of(std::vector<AccessNode> children) {
  auto k = static_cast<std::uint32_t>(children.size());
  return gate(k, std::move(children));
}

AccessNode AccessNode::any_of(std::vector<AccessNode> children) {
  return gate(1, std::move(children));
}

std::size_t AccessNode::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

bool satisfies(const AttributeSet& attrs, const AccessTree& tree) {
  if (tree.is_leaf()) return attrs.contains(tree.attribute());
  std::uint32_t ok = 0;
  for (const auto& child : tree.children()) {
    if (satisfies(attrs, child) && ++ok >= tree.threshold()) return true;
  }
  return false;
}

namespace {
void collect_leaves(const AccessTree& node, std::vector<Attribute>& out) {
  if (node.is_leaf()) {
    out.push_back(node.attribute());
    return;
  }
  for (const auto& c : node.children()) collect_leaves(c, out);
}
}  // namespace

std::vector<Attribute> leaves_in_order(const AccessTree& tree) {
  std::vector<Attribute> out;
  collect_leaves(tree, out);
  return out;
}

void encode_tree(Bytes& out, const AccessTree& tree) {
  if (tree.is_leaf()) {
    const auto& name = tree.attribute().name();
    out.push_back(kLeafTag);
    out.push_back(static_cast<std::uint8_t>(name.size()));
    append(out, as_bytes(name));
    return;
  }
  out.push_back(kGateTag);
  out.push_back(static_cast<std::uint8_t>(tree.threshold()));
  out.push_back(static_cast<std::uint8_t>(tree.children().size()));
  for (const auto& c : tree.children()) encode_tree(out, c);
}

Bytes encode_tree(const AccessTree& tree) {
  Bytes out;
  encode_tree(out, tree);
  return out;
}

namespace {
AccessTree decode_node(ByteReader& in, int depth) {
  if (depth > kMaxDecodeDepth) throw DecodeError("access tree nested too deeply");
  auto tag = in.u8();
  if (tag == kLeafTag) {
    auto len = in.u8();
    auto raw = in.take(len);
    std::string name(raw.begin(), raw.end());
    auto attr = Attribute::parse(name);
    if (attr.name() != name) throw DecodeError("leaf attribute not canonical");
    return AccessNode::leaf(std::move(attr));
  }
  if (tag != kGateTag) throw DecodeError("unknown access tree tag");
  auto k = in.u8();
  auto n = in.u8();
  if (n == 0 || k == 0 || k > n) throw DecodeError("invalid gate threshold");
  std::vector<AccessNode> children;
  children.reserve(n);
  for (unsigned i = 0; i < n; ++i) children.push_back(decode_node(in, depth + 1));
  return AccessNode::gate(k, std::move(children));
}
}  // namespace

AccessTree decode_tree(ByteReader& in) {
  try {
    return decode_node(in, 0);
  } catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
}

std::string to_string(const AccessTree& tree) {
  if (tree.is_leaf()) return tree.attribute().name();
  std::string sep;
  std::string prefix;
  if (tree.children().size() == 1) {
    return to_string(tree.children().front());
  } else if (tree.is_and()) {
    sep = " AND ";
  } else if (tree.is_or()) {
    sep = " OR ";
  } else {
    sep = ", ";
    prefix = std::to_string(tree.threshold()) + " of ";
  }
  std::string out = prefix + "(";
  for (std::size_t i = 0; i < tree.children().size(); ++i) {
    if (i) out += sep;
    out += to_string(tree.children()[i]);
  }
  return out + ")";
}

}  // namespace locauth::abe
