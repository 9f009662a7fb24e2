#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace legalrag {

enum class DocumentKind { kLaw, kBylaws, kQaDataset };
enum class Language { kArabic, kEnglish, kMixed };
enum class QaSource { kHuman, kGenerated };

std::string_view ToString(DocumentKind kind);
std::string_view ToString(Language language);
std::string_view ToString(QaSource source);

struct Article {
  int article_number = 0;
  std::optional<std::string> heading;
  std::string text;
  std::string parent_doc;
};

struct QAPair {
  /// "<doc_id>/q<line>" for loaded pairs; unique across a corpus.
  std::string qa_id;
  std::string question;
  std::string answer;
  std::optional<int> article_number;
  QaSource source = QaSource::kHuman;
};

struct Document {
  std::string doc_id;
  std::string title;
  DocumentKind kind = DocumentKind::kLaw;
  Language language = Language::kEnglish;
  std::vector<Article> articles;  // law / bylaws
  std::vector<QAPair> qa_pairs;   // qa_dataset
};

/// Immutable after load. Documents are ordered by doc_id, articles by number.
struct Corpus {
  std::vector<Document> documents;

  size_t article_count() const;
  size_t qa_pair_count() const;

  const Article* FindArticle(std::string_view doc_id, int article_number) const;
  const QAPair* FindQaPair(std::string_view qa_id) const;
};

/// Where a passage (and every chunk cut from it) came from.
struct SourceRef {
  std::string doc_id;
  std::optional<int> article_number;
  /// Empty for article passages.
  std::string qa_id;

  bool is_qa() const { return !qa_id.empty(); }
  /// Human-readable label used in chunk ids and prompt context blocks.
  std::string Label() const;

  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct Passage {
  SourceRef source;
  std::string text;
};

/// Loads `<dir>/corpus.json` and the per-document `.articles.jsonl` /
/// `.qa.jsonl` files it names. Throws Error{kMissingFile, kSchemaViolation,
/// kDuplicateId}.
Corpus LoadCorpus(const std::filesystem::path& dir);

/// Validates the Document/Article/QAPair invariants on an in-memory corpus.
void ValidateCorpus(const Corpus& corpus);

/// One passage per article, one "Q: ...\nA: ..." passage per QA pair.
std::vector<Passage> FlattenToPassages(const Corpus& corpus);

std::string RenderQaPassage(std::string_view question, std::string_view answer);

/// Canonical JSON dump; equal corpora serialize to equal bytes.
std::string SerializeCorpus(const Corpus& corpus);

/// One line of the `.qa.jsonl` format, without the trailing newline.
std::string QaPairToJsonLine(const QAPair& pair);

/// Writes a corpus directory (manifest plus per-document files).
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace legalrag
