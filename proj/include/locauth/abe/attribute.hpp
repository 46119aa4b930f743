#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace locauth::abe {

inline constexpr unsigned kDefaultNumericWidth = 8;
inline constexpr std::size_t kMaxAttributeLength = 255;

/// A credential name in canonical form: lowercase, no whitespace, drawn from
/// [a-z0-9_:.=/@-], e.g. "firm:xyz" or "clearance:bit3=0".
class Attribute {
 public:
  /// Canonicalizes `raw`; throws std::invalid_argument when it cannot be.
  static Attribute parse(std::string_view raw);

  const std::string& name() const { return name_; }

  friend auto operator<=>(const Attribute&, const Attribute&) = default;
  friend bool operator==(const Attribute&, const Attribute&) = default;

 private:
  explicit Attribute(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

using AttributeSet = std::set<Attribute>;

std::string canonicalize_attribute(std::string_view raw);

/// "name:bit{i}={0|1}"
Attribute bit_attribute(std::string_view name, unsigned bit, bool set);

/// One bit attribute per position, encoding `value` in `width` bits.
std::vector<Attribute> numeric_attributes(std::string_view name, std::uint64_t value,
                                          unsigned width = kDefaultNumericWidth);

/// Builds a key's attribute set from operator input. Items of the form
/// "name=<decimal>" (other than literal "name:bitN=x" attributes) expand into
/// bit attributes; everything else is taken as a plain attribute.
AttributeSet parse_attribute_set(std::span<const std::string> items,
                                 unsigned width = kDefaultNumericWidth);

}  // namespace locauth::abe
