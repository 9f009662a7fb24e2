#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace legalrag {

/// Half-open byte range [begin, end) of one token inside the source string.
struct TokenSpan {
  size_t begin = 0;
  size_t end = 0;
};

/// Token counting rule used for every budget in the pipeline. Implementations
/// must be deterministic, count "" as 0, and satisfy
/// count(a + b) <= count(a) + count(b) + 1.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::string_view name() const = 0;
  virtual std::vector<TokenSpan> Tokenize(std::string_view text) const = 0;
  virtual size_t CountTokens(std::string_view text) const { return Tokenize(text).size(); }
};

// A token is a maximal run of letter/digit code points (combining marks and
// format characters extend a run), or a single other non-whitespace code
// point. Whitespace separates and is never a token.
class UnicodeWordTokenizer final : public Tokenizer {
 public:
  std::string_view name() const override { return "unicode-word-v1"; }
  std::vector<TokenSpan> Tokenize(std::string_view text) const override;
  size_t CountTokens(std::string_view text) const override;
};

const Tokenizer& DefaultTokenizer();

inline size_t CountTokens(std::string_view text, const Tokenizer& tokenizer = DefaultTokenizer()) {
  return tokenizer.CountTokens(text);
}

}  // namespace legalrag
