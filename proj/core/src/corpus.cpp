#include "legalrag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void Violation(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, where + ": " + what);
}

DocumentKind ParseKind(const std::string& s, const std::string& where) {
  if (s == "law") return DocumentKind::kLaw;
  if (s == "bylaws") return DocumentKind::kBylaws;
  if (s == "qa_dataset") return DocumentKind::kQaDataset;
  Violation(where, "field 'kind' must be one of law|bylaws|qa_dataset, got '" + s + "'");
}

Language ParseLanguage(const std::string& s, const std::string& where) {
  if (s == "arabic") return Language::kArabic;
  if (s == "english") return Language::kEnglish;
  if (s == "mixed") return Language::kMixed;
  Violation(where, "field 'language' must be one of arabic|english|mixed, got '" + s + "'");
}

std::string RequireString(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) Violation(where, std::string("missing field '") + key + "'");
  if (!it->is_string()) Violation(where, std::string("field '") + key + "' must be a string");
  const auto& raw = it->get_ref<const std::string&>();
  if (!text::IsValidUtf8(raw)) Violation(where, std::string("field '") + key + "' is not valid UTF-8");
  return text::ToNfc(raw);
}

std::optional<int> OptionalPositiveInt(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) Violation(where, std::string("field '") + key + "' must be an integer or null");
  const auto v = it->get<long long>();
  if (v <= 0 || v > std::numeric_limits<int>::max()) {
    Violation(where, std::string("field '") + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

template <typename Fn>
void ForEachJsonLine(const fs::path& file, Fn&& fn) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + file.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::IsBlank(line)) continue;
    const std::string where = file.filename().string() + ":" + std::to_string(line_no);
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) Violation(where, "line is not valid JSON");
    if (!obj.is_object()) Violation(where, "record must be a JSON object");
    fn(obj, where, line_no);
  }
}

std::vector<Article> LoadArticles(const fs::path& file, const std::string& doc_id) {
  std::vector<Article> articles;
  ForEachJsonLine(file, [&](const json& obj, const std::string& where, int) {
    Article a;
    auto number = OptionalPositiveInt(obj, "article_number", where);
    if (!number) Violation(where, "missing field 'article_number'");
    a.article_number = *number;
    if (auto it = obj.find("heading"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) Violation(where, "field 'heading' must be a string or null");
      a.heading = text::ToNfc(it->get<std::string>());
    }
    a.text = RequireString(obj, "text", where);
    if (text::IsBlank(a.text)) Violation(where, "field 'text' is empty");
    a.parent_doc = doc_id;
    articles.push_back(std::move(a));
  });
  return articles;
}

std::vector<QAPair> LoadQaPairs(const fs::path& file, const std::string& doc_id) {
  std::vector<QAPair> pairs;
  ForEachJsonLine(file, [&](const json& obj, const std::string& where, int line_no) {
    QAPair p;
    p.qa_id = doc_id + "/q" + std::to_string(line_no);
    p.question = RequireString(obj, "question", where);
    p.answer = RequireString(obj, "answer", where);
    if (text::IsBlank(p.question)) Violation(where, "field 'question' is empty");
    if (text::IsBlank(p.answer)) Violation(where, "field 'answer' is empty");
    p.article_number = OptionalPositiveInt(obj, "article_number", where);
    const std::string source = RequireString(obj, "source", where);
    if (source == "human") {
      p.source = QaSource::kHuman;
    } else if (source == "generated") {
      p.source = QaSource::kGenerated;
    } else {
      Violation(where, "field 'source' must be human|generated, got '" + source + "'");
    }
    if (p.source == QaSource::kGenerated && !p.article_number) {
      Violation(where, "generated pair requires 'article_number'");
    }
    pairs.push_back(std::move(p));
  });
  return pairs;
}

void ValidateDocument(const Document& doc) {
  const std::string where = "document '" + doc.doc_id + "'";
  if (doc.doc_id.empty()) Violation("manifest", "field 'doc_id' is empty");
  if (doc.kind != DocumentKind::kQaDataset && doc.articles.empty()) {
    Violation(where, "law/bylaws document has no articles");
  }
  std::set<int> numbers;
  for (const auto& a : doc.articles) {
    if (a.article_number <= 0) Violation(where, "article_number must be positive");
    if (text::IsBlank(a.text)) {
      Violation(where + " article " + std::to_string(a.article_number), "field 'text' is empty");
    }
    if (!numbers.insert(a.article_number).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate article_number " +
                                               std::to_string(a.article_number));
    }
  }
  for (const auto& p : doc.qa_pairs) {
    if (text::IsBlank(p.question) || text::IsBlank(p.answer)) {
      Violation(where + " " + p.qa_id, "question and answer must be non-empty");
    }
    if (p.source == QaSource::kGenerated && !p.article_number) {
      Violation(where + " " + p.qa_id, "generated pair requires 'article_number'");
    }
  }
}

json ToJson(const Document& doc) {
  json j = {{"doc_id", doc.doc_id},
            {"title", doc.title},
            {"kind", ToString(doc.kind)},
            {"language", ToString(doc.language)}};
  json articles = json::array();
  for (const auto& a : doc.articles) {
    articles.push_back({{"article_number", a.article_number},
                        {"heading", a.heading ? json(*a.heading) : json(nullptr)},
                        {"text", a.text}});
  }
  json qa = json::array();
  for (const auto& p : doc.qa_pairs) {
    qa.push_back({{"qa_id", p.qa_id},
                  {"question", p.question},
                  {"answer", p.answer},
                  {"article_number", p.article_number ? json(*p.article_number) : json(nullptr)},
                  {"source", ToString(p.source)}});
  }
  j["articles"] = std::move(articles);
  j["qa_pairs"] = std::move(qa);
  return j;
}

}  // namespace

std::string_view ToString(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::kLaw: return "law";
    case DocumentKind::kBylaws: return "bylaws";
    case DocumentKind::kQaDataset: return "qa_dataset";
  }
  return "law";
}

std::string_view ToString(Language language) {
  switch (language) {
    case Language::kArabic: return "arabic";
    case Language::kEnglish: return "english";
    case Language::kMixed: return "mixed";
  }
  return "english";
}

std::string_view ToString(QaSource source) {
  return source == QaSource::kHuman ? "human" : "generated";
}

size_t Corpus::article_count() const {
  size_t n = 0;
  for (const auto& d : documents) n += d.articles.size();
  return n;
}

size_t Corpus::qa_pair_count() const {
  size_t n = 0;
  for (const auto& d : documents) n += d.qa_pairs.size();
  return n;
}

const Article* Corpus::FindArticle(std::string_view doc_id, int article_number) const {
  for (const auto& d : documents) {
    if (d.doc_id != doc_id) continue;
    for (const auto& a : d.articles) {
      if (a.article_number == article_number) return &a;
    }
  }
  return nullptr;
}

const QAPair* Corpus::FindQaPair(std::string_view qa_id) const {
  for (const auto& d : documents) {
    for (const auto& p : d.qa_pairs) {
      if (p.qa_id == qa_id) return &p;
    }
  }
  return nullptr;
}

std::string SourceRef::Label() const {
  if (is_qa()) return qa_id;
  return doc_id + "/art-" + (article_number ? std::to_string(*article_number) : std::string("?"));
}

Corpus LoadCorpus(const fs::path& dir) {
  const fs::path manifest_path = dir / "corpus.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing manifest " + manifest_path.string());

  json manifest = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (manifest.is_discarded()) Violation("corpus.json", "not valid JSON");
  const json* entries = &manifest;
  if (manifest.is_object()) {
    auto it = manifest.find("documents");
    if (it == manifest.end()) Violation("corpus.json", "missing field 'documents'");
    entries = &*it;
  }
  if (!entries->is_array()) Violation("corpus.json", "'documents' must be an array");

  Corpus corpus;
  std::set<std::string> seen;
  int index = 0;
  for (const auto& entry : *entries) {
    const std::string where = "corpus.json documents[" + std::to_string(index++) + "]";
    if (!entry.is_object()) Violation(where, "entry must be an object");
    Document doc;
    doc.doc_id = RequireString(entry, "doc_id", where);
    if (doc.doc_id.empty()) Violation(where, "field 'doc_id' is empty");
    if (doc.doc_id.find_first_of("/\\") != std::string::npos) {
      Violation(where, "field 'doc_id' must not contain path separators");
    }
    if (!seen.insert(doc.doc_id).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate doc_id '" + doc.doc_id + "'");
    }
    doc.title = RequireString(entry, "title", where);
    doc.kind = ParseKind(RequireString(entry, "kind", where), where);
    doc.language = ParseLanguage(RequireString(entry, "language", where), where);

    if (doc.kind == DocumentKind::kQaDataset) {
      doc.qa_pairs = LoadQaPairs(dir / (doc.doc_id + ".qa.jsonl"), doc.doc_id);
    } else {
      doc.articles = LoadArticles(dir / (doc.doc_id + ".articles.jsonl"), doc.doc_id);
    }
    ValidateDocument(doc);
    std::sort(doc.articles.begin(), doc.articles.end(),
              [](const Article& a, const Article& b) { return a.article_number < b.article_number; });
    corpus.documents.push_back(std::move(doc));
  }
  std::sort(corpus.documents.begin(), corpus.documents.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return corpus;
}

void ValidateCorpus(const Corpus& corpus) {
  std::set<std::string> doc_ids;
  std::set<std::string> qa_ids;
  for (const auto& d : corpus.documents) {
    if (!doc_ids.insert(d.doc_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate doc_id '" + d.doc_id + "'");
    }
    ValidateDocument(d);
    for (const auto& p : d.qa_pairs) {
      if (p.qa_id.empty() || !qa_ids.insert(p.qa_id).second) {
        throw Error(ErrorCode::kDuplicateId, "missing or duplicate qa_id '" + p.qa_id + "'");
      }
    }
  }
}

std::string RenderQaPassage(std::string_view question, std::string_view answer) {
  std::string out;
  out.reserve(question.size() + answer.size() + 7);
  out.append("Q: ").append(question).append("\nA: ").append(answer);
  return out;
}

std::vector<Passage> FlattenToPassages(const Corpus& corpus) {
  std::vector<Passage> passages;
  passages.reserve(corpus.article_count() + corpus.qa_pair_count());
  for (const auto& doc : corpus.documents) {
    for (const auto& a : doc.articles) {
      Passage p;
      p.source = SourceRef{doc.doc_id, a.article_number, {}};
      p.text = a.heading ? *a.heading + "\n" + a.text : a.text;
      passages.push_back(std::move(p));
    }
    for (const auto& qa : doc.qa_pairs) {
      Passage p;
      p.source = SourceRef{doc.doc_id, qa.article_number, qa.qa_id};
      p.text = RenderQaPassage(qa.question, qa.answer);
      passages.push_back(std::move(p));
    }
  }
  return passages;
}

std::string SerializeCorpus(const Corpus& corpus) {
  json docs = json::array();
  for (const auto& d : corpus.documents) docs.push_back(ToJson(d));
  return json{{"documents", std::move(docs)}}.dump(2);
}

std::string QaPairToJsonLine(const QAPair& pair) {
  json j = {{"question", pair.question},
            {"answer", pair.answer},
            {"article_number", pair.article_number ? json(*pair.article_number) : json(nullptr)},
            {"source", ToString(pair.source)}};
  return j.dump();
}

void WriteCorpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest = json::array();
  for (const auto& d : corpus.documents) {
    manifest.push_back({{"doc_id", d.doc_id},
                        {"title", d.title},
                        {"kind", ToString(d.kind)},
                        {"language", ToString(d.language)}});
    const bool qa = d.kind == DocumentKind::kQaDataset;
    const fs::path file = dir / (d.doc_id + (qa ? ".qa.jsonl" : ".articles.jsonl"));
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
    if (qa) {
      for (const auto& p : d.qa_pairs) out << QaPairToJsonLine(p) << '\n';
    } else {
      for (const auto& a : d.articles) {
        json j = {{"article_number", a.article_number},
                  {"heading", a.heading ? json(*a.heading) : json(nullptr)},
                  {"text", a.text}};
        out << j.dump() << '\n';
      }
    }
  }
  std::ofstream out(dir / "corpus.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / "corpus.json").string());
  out << json{{"documents", std::move(manifest)}}.dump(2) << '\n';
}

}  // namespace legalrag
