#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "locauth/abe/access_tree.hpp"

namespace locauth::abe {

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal };

std::string_view to_string(Comparator cmp);

/// Syntax or range error in a policy string; `position` is a byte offset.
class PolicyError : public std::invalid_argument {
 public:
  PolicyError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses
///   expr   := term ('OR' term)*
///   term   := factor ('AND' factor)*
///   factor := attribute | name cmp integer | '(' expr ')'
///   cmp    := '<' | '<=' | '>' | '>=' | '=='
/// AND binds tighter than OR; keywords are case-insensitive. Comparisons
/// compile to bit-attribute subtrees of the given width.
AccessTree parse_policy(std::string_view text, unsigned width = kDefaultNumericWidth);

/// Access subtree over "name:bit{i}={0|1}" leaves that a value's bit
/// attributes satisfy iff (value cmp k). Throws std::out_of_range unless
/// 0 <= k < 2^width.
AccessTree compile_comparison(std::string_view name, Comparator cmp, std::uint64_t k,
                              unsigned width = kDefaultNumericWidth);

}  // namespace locauth::abe
