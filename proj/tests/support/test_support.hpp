#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "legalrag/corpus.hpp"
#include "legalrag/error.hpp"

namespace legalrag::testing {

inline std::filesystem::path Fixture(const std::string& rel) { return std::filesystem::path(LEGALRAG_FIXTURES) / rel; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void WriteFile(const std::filesystem::path& path, const std::string& content);
std::string ReadFile(const std::filesystem::path& path);

/// Whitespace-separated words drawn from a small mixed Latin/Arabic
/// vocabulary, with punctuation sprinkled in. Exactly `tokens` tokens long
/// under the default tokenizer.
std::string RandomText(std::mt19937_64& rng, size_t tokens);

/// A law document with `articles` numbered articles of short English text.
Document SyntheticLaw(const std::string& doc_id, int articles);

}  // namespace legalrag::testing

// Runs `stmt` and checks it throws legalrag::Error with `code`.
#define CHECK_THROWS_CODE(stmt, code_)                                 \
  do {                                                                 \
    bool thrown_ = false;                                              \
    try {                                                              \
      stmt;                                                            \
    } catch (const ::legalrag::Error& e_) {                            \
      thrown_ = true;                                                  \
      CHECK_MESSAGE(e_.code() == (code_), ::legalrag::ErrorCodeName(e_.code())); \
    }                                                                  \
    CHECK_MESSAGE(thrown_, "expected legalrag::Error");                \
  } while (false)
