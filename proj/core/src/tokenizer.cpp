#include "legalrag/tokenizer.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace legalrag {
namespace {

enum class CharClass { kSpace, kWord, kJoiner, kSymbol };

CharClass Classify(UChar32 c) {
  if (c < 0) return CharClass::kSymbol;  // ill-formed byte sequence
  if (c < 0x80) {
    if (c == ' ' || (c >= '\t' && c <= '\r')) return CharClass::kSpace;
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      return CharClass::kWord;
    }
    return CharClass::kSymbol;
  }
  if (u_isUWhiteSpace(c)) return CharClass::kSpace;
  if (u_isalnum(c)) return CharClass::kWord;
  const auto mask = U_GET_GC_MASK(c);
  if (mask & (U_GC_M_MASK | U_GC_CF_MASK)) return CharClass::kJoiner;
  return CharClass::kSymbol;
}

// Visits every token; avoids materializing spans when only counting.
template <typename Sink>
void Scan(std::string_view text, Sink&& sink) {
  const auto* p = reinterpret_cast<const uint8_t*>(text.data());
  const auto len = static_cast<int32_t>(text.size());
  int32_t i = 0;
  bool in_word = false;
  size_t word_begin = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    const CharClass cls = Classify(c);
    if (cls == CharClass::kWord || (cls == CharClass::kJoiner && in_word)) {
      if (!in_word) {
        in_word = true;
        word_begin = static_cast<size_t>(start);
      }
      continue;
    }
    if (in_word) {
      sink(TokenSpan{word_begin, static_cast<size_t>(start)});
      in_word = false;
    }
    if (cls == CharClass::kSymbol) {
      sink(TokenSpan{static_cast<size_t>(start), static_cast<size_t>(i)});
    }
    // Spaces and stray joiners outside a word produce nothing.
  }
  if (in_word) sink(TokenSpan{word_begin, text.size()});
}

}  // namespace

std::vector<TokenSpan> UnicodeWordTokenizer::Tokenize(std::string_view text) const {
  std::vector<TokenSpan> spans;
  spans.reserve(text.size() / 4 + 1);
  Scan(text, [&](TokenSpan s) { spans.push_back(s); });
  return spans;
}

size_t UnicodeWordTokenizer::CountTokens(std::string_view text) const {
  size_t n = 0;
  Scan(text, [&](TokenSpan) { ++n; });
  return n;
}

const Tokenizer& DefaultTokenizer() {
  static const UnicodeWordTokenizer tokenizer;
  return tokenizer;
}

}  // namespace legalrag
