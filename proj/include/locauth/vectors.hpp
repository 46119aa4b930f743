#pragma once

// Fixed-input vectors for the token and key derivations, for checking other
// implementations byte for byte.

#include <string>
#include <utility>
#include <vector>

namespace locauth {

struct VectorEntry {
  std::string key;
  std::string value;  // lowercase hex, or a quoted string / decimal for inputs
};

/// Inputs first, then one block of derived values per period.
std::vector<VectorEntry> token_vectors();

/// "key = value" per line, blank line between period blocks.
std::string render_vectors();

}  // namespace locauth
