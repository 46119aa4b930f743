#include "locauth/abe/policy.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

namespace locauth::abe {

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Equal: return "==";
  }
  return "?";
}

// ---- comparison compiler ----------------------------------------------------

namespace {

// Joins `head` with `tail` under a gate of the given kind, absorbing `tail`'s
// children when it is already the same kind of gate.
AccessNode join(bool conjunction, AccessNode head, AccessNode tail) {
  std::vector<AccessNode> children{std::move(head)};
  bool same_kind = !tail.is_leaf() && (conjunction ? tail.is_and() : tail.is_or()) &&
                   tail.children().size() > 1;
  if (same_kind) {
    for (const auto& c : tail.children()) children.push_back(c);
  } else {
    children.push_back(std::move(tail));
  }
  return conjunction ? AccessNode::all_of(std::move(children))
                     : AccessNode::any_of(std::move(children));
}

AccessNode constant(std::string_view name, bool value) {
  std::vector<AccessNode> both{AccessNode::leaf(bit_attribute(name, 0, false)),
                               AccessNode::leaf(bit_attribute(name, 0, true))};
  // Every encoded value carries exactly one of bit0=0 / bit0=1.
  return value ? AccessNode::any_of(std::move(both)) : AccessNode::all_of(std::move(both));
}

// Strict comparison v > k (greater=true) or v < k (greater=false), built from
// the least significant bit upward. nullopt means the predicate is never true.
std::optional<AccessNode> strict(std::string_view name, bool greater, std::uint64_t k,
                                 unsigned width) {
  std::optional<AccessNode> acc;  // predicate over bits [0, i)
  for (unsigned i = 0; i < width; ++i) {
    bool k_bit = (k >> i) & 1u;
    // For '>' a 1 where k has 0 wins outright; for '<' a 0 where k has 1.
    bool wins = greater ? !k_bit : k_bit;
    auto leaf = AccessNode::leaf(bit_attribute(name, i, greater));
    if (wins) {
      acc = acc ? join(false, std::move(leaf), std::move(*acc)) : std::move(leaf);
    } else if (acc) {
      acc = join(true, std::move(leaf), std::move(*acc));
    }
  }
  return acc;
}

}  // namespace

AccessTree compile_comparison(std::string_view name, Comparator cmp, std::uint64_t k,
                              unsigned width) {
  if (width == 0 || width > 32) throw std::out_of_range("numeric width must be in [1, 32]");
  const std::uint64_t max = (std::uint64_t{1} << width) - 1;
  if (k > max) {
    throw std::out_of_range("comparison value " + std::to_string(k) + " outside [0, " +
                            std::to_string(max) + "]");
  }
  const std::string canon = canonicalize_attribute(name);
  auto or_false = [&](std::optional<AccessNode> n) {
    return n ? std::move(*n) : constant(canon, false);
  };
  switch (cmp) {
    case Comparator::Greater: return or_false(strict(canon, true, k, width));
    case Comparator::Less: return or_false(strict(canon, false, k, width));
    case Comparator::GreaterEqual:
      return k == 0 ? constant(canon, true) : or_false(strict(canon, true, k - 1, width));
    case Comparator::LessEqual:
      return k == max ? constant(canon, true) : or_false(strict(canon, false, k + 1, width));
    case Comparator::Equal: {
      std::vector<AccessNode> bits;
      for (unsigned i = width; i-- > 0;) {
        bits.push_back(AccessNode::leaf(bit_attribute(canon, i, (k >> i) & 1u)));
      }
      return AccessNode::all_of(std::move(bits));
    }
  }
  throw std::invalid_argument("unknown comparator");
}

// ---- parser -------------------------------------------------------------------

namespace {

enum class Tok { Ident, LParen, RParen, Cmp, And, Or, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '.' ||
         c == '-' || c == '/' || c == '@';
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", i++});
    } else if (c == '<' || c == '>') {
      std::size_t start = i++;
      if (i < text.size() && text[i] == '=') ++i;
      out.push_back({Tok::Cmp, std::string(text.substr(start, i - start)), start});
    } else if (c == '=') {
      if (i + 1 < text.size() && text[i + 1] == '=') {
        out.push_back({Tok::Cmp, "==", i});
        i += 2;
      } else {
        throw PolicyError("expected '=='", i);
      }
    } else if (ident_char(c)) {
      std::size_t start = i;
      while (i < text.size() && ident_char(text[i])) ++i;
      // A single '=' inside a name is part of a literal such as "x:bit3=0".
      if (i + 1 < text.size() && text[i] == '=' && text[i + 1] != '=' && ident_char(text[i + 1])) {
        ++i;
        while (i < text.size() && ident_char(text[i])) ++i;
      }
      std::string word(text.substr(start, i - start));
      auto kw = upper(word);
      if (kw == "AND") {
        out.push_back({Tok::And, word, start});
      } else if (kw == "OR") {
        out.push_back({Tok::Or, word, start});
      } else {
        out.push_back({Tok::Ident, word, start});
      }
    } else {
      throw PolicyError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, unsigned width) : toks_(std::move(tokens)), width_(width) {}

  AccessTree parse() {
    if (peek().kind == Tok::End) throw PolicyError("empty policy", peek().pos);
    auto tree = expr();
    if (peek().kind != Tok::End) throw PolicyError("unexpected '" + peek().text + "'", peek().pos);
    return tree;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  AccessTree expr() {
    std::vector<AccessNode> terms{term()};
    while (peek().kind == Tok::Or) {
      next();
      terms.push_back(term());
    }
    return terms.size() == 1 ? std::move(terms.front()) : AccessNode::any_of(std::move(terms));
  }

  AccessTree term() {
    std::vector<AccessNode> factors{factor()};
    while (peek().kind == Tok::And) {
      next();
      factors.push_back(factor());
    }
    return factors.size() == 1 ? std::move(factors.front())
                               : AccessNode::all_of(std::move(factors));
  }

  AccessTree factor() {
    const Token& t = next();
    if (t.kind == Tok::LParen) {
      auto inner = expr();
      if (peek().kind != Tok::RParen) throw PolicyError("expected ')'", peek().pos);
      next();
      return inner;
    }
    if (t.kind != Tok::Ident) {
      throw PolicyError(t.kind == Tok::End ? "unexpected end of policy"
                                           : "unexpected '" + t.text + "'",
                        t.pos);
    }
    if (peek().kind == Tok::Cmp) {
      const Token& op = next();
      const Token& num = next();
      if (num.kind != Tok::Ident) throw PolicyError("expected integer", num.pos);
      std::uint64_t k = 0;
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), k);
      if (ec != std::errc{} || ptr != num.text.data() + num.text.size()) {
        throw PolicyError("expected integer, got '" + num.text + "'", num.pos);
      }
      try {
        return compile_comparison(t.text, comparator(op), k, width_);
      } catch (const std::out_of_range& e) {
        throw PolicyError(e.what(), num.pos);
      } catch (const std::invalid_argument& e) {
        throw PolicyError(e.what(), t.pos);
      }
    }
    try {
      return AccessNode::leaf(Attribute::parse(t.text));
    } catch (const std::invalid_argument& e) {
      throw PolicyError(e.what(), t.pos);
    }
  }

  static Comparator comparator(const Token& op) {
    if (op.text == "<") return Comparator::Less;
    if (op.text == "<=") return Comparator::LessEqual;
    if (op.text == ">") return Comparator::Greater;
    if (op.text == ">=") return Comparator::GreaterEqual;
    return Comparator::Equal;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  unsigned width_;
};

}  // namespace

AccessTree parse_policy(std::string_view text, unsigned width) {
  return Parser(tokenize(text), width).parse();
}

}  // namespace locauth::abe
