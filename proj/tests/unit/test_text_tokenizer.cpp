#include <doctest.h>

#include <random>

#include "legalrag/text.hpp"
#include "legalrag/tokenizer.hpp"
#include "test_support.hpp"

using namespace legalrag;

namespace {

std::vector<std::string> Pieces(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& t : DefaultTokenizer().Tokenize(s)) out.emplace_back(s.substr(t.begin, t.end - t.begin));
  return out;
}

}  // namespace

TEST_CASE("NFC normalization composes decomposed sequences") {
  const std::string decomposed = "e\xCC\x81";  // e + combining acute
  CHECK(text::ToNfc(decomposed) == "\xC3\xA9");
  CHECK(text::ToNfc("plain ascii") == "plain ascii");
  CHECK(text::ToNfc(text::ToNfc("الجمعية")) == text::ToNfc("الجمعية"));
}

TEST_CASE("UTF-8 validity and whitespace helpers") {
  CHECK(text::IsValidUtf8("المادة 5"));
  CHECK_FALSE(text::IsValidUtf8("\xC3"));
  CHECK_FALSE(text::IsValidUtf8("\xFF\xFE"));
  CHECK(text::TrimWhitespace("  \t a b \n") == "a b");
  CHECK(text::IsBlank(" \n\t"));
  CHECK_FALSE(text::IsBlank(" x "));
}

TEST_CASE("word runs and symbols") {
  CHECK(Pieces("Article 12, paragraph (b).") ==
        std::vector<std::string>{"Article", "12", ",", "paragraph", "(", "b", ")", "."});
  CHECK(Pieces("") .empty());
  CHECK(Pieces("   \n ").empty());
  CHECK(CountTokens("art12x") == 1);
}

TEST_CASE("Arabic words with diacritics stay whole") {
  // fatha/shadda are combining marks inside the word
  CHECK(Pieces("الجَمْعِيَّة العمومية") == std::vector<std::string>{"الجَمْعِيَّة", "العمومية"});
  CHECK(Pieces("هل يجوز؟") == std::vector<std::string>{"هل", "يجوز", "؟"});
}

TEST_CASE("spans are ordered, disjoint and in bounds") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::string s = testing::RandomText(rng, trial * 13);
    const auto spans = DefaultTokenizer().Tokenize(s);
    CHECK(spans.size() == static_cast<size_t>(trial * 13));
    size_t prev_end = 0;
    for (const auto& t : spans) {
      CHECK(t.begin >= prev_end);
      CHECK(t.end > t.begin);
      CHECK(t.end <= s.size());
      prev_end = t.end;
    }
  }
}

TEST_CASE("count is subadditive up to one token under concatenation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string a = testing::RandomText(rng, trial % 17);
    const std::string b = testing::RandomText(rng, trial % 5);
    CHECK(CountTokens(a + b) <= CountTokens(a) + CountTokens(b) + 1);
    CHECK(CountTokens(a + b) + 1 >= CountTokens(a) + CountTokens(b));
  }
}
