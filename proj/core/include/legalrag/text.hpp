#pragma once

#include <string>
#include <string_view>

namespace legalrag::text {

// All text in the library is UTF-8. Corpus text is normalized to NFC on load
// and otherwise left untouched.
std::string ToNfc(std::string_view utf8);

bool IsValidUtf8(std::string_view s);

std::string_view TrimWhitespace(std::string_view s);

inline bool IsBlank(std::string_view s) { return TrimWhitespace(s).empty(); }

}  // namespace legalrag::text
