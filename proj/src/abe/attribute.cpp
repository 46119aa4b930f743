#include "locauth/abe/attribute.hpp"

#include <cctype>
#include <charconv>
#include <regex>
#include <stdexcept>

namespace locauth::abe {

namespace {

bool allowed_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == ':' || c == '.' ||
         c == '=' || c == '/' || c == '@' || c == '-';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string canonicalize_attribute(std::string_view raw) {
  auto s = trim(raw);
  if (s.empty()) throw std::invalid_argument("attribute is empty");
  if (s.size() > kMaxAttributeLength) throw std::invalid_argument("attribute too long");
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!allowed_char(lower)) {
      throw std::invalid_argument("attribute '" + std::string(raw) + "' contains invalid character");
    }
    out.push_back(lower);
  }
  return out;
}

Attribute Attribute::parse(std::string_view raw) { return Attribute(canonicalize_attribute(raw)); }

Attribute bit_attribute(std::string_view name, unsigned bit, bool set) {
  std::string s(name);
  s += ":bit" + std::to_string(bit) + (set ? "=1" : "=0");
  return Attribute::parse(s);
}

std::vector<Attribute> numeric_attributes(std::string_view name, std::uint64_t value,
                                          unsigned width) {
  if (width == 0 || width > 32) throw std::invalid_argument("numeric width must be in [1, 32]");
  if (value >> width) {
    throw std::out_of_range("value " + std::to_string(value) + " does not fit in " +
                            std::to_string(width) + " bits");
  }
  std::vector<Attribute> out;
  out.reserve(width);
  for (unsigned i = 0; i < width; ++i) out.push_back(bit_attribute(name, i, (value >> i) & 1u));
  return out;
}

AttributeSet parse_attribute_set(std::span<const std::string> items, unsigned width) {
  static const std::regex numeric(R"(^([a-z0-9_:./@-]+)=([0-9]+)$)");
  static const std::regex bit_literal(R"(:bit[0-9]+$)");
  AttributeSet out;
  for (const auto& item : items) {
    std::string canon = canonicalize_attribute(item);
    std::smatch m;
    if (std::regex_match(canon, m, numeric) && !std::regex_search(m[1].str(), bit_literal)) {
      std::uint64_t value = 0;
      const auto digits = m[2].str();
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{}) throw std::out_of_range("numeric attribute value too large: " + item);
      for (auto& a : numeric_attributes(m[1].str(), value, width)) out.insert(std::move(a));
    } else {
      out.insert(Attribute::parse(canon));
    }
  }
  return out;
}

}  // namespace locauth::abe
