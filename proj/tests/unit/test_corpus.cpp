#include <doctest.h>

#include <algorithm>

#include "legalrag/corpus.hpp"
#include "legalrag/error.hpp"
#include "test_support.hpp"

using namespace legalrag;
using legalrag::testing::Fixture;
using legalrag::testing::TempDir;
using legalrag::testing::WriteFile;

namespace {

void WriteMinimal(const TempDir& dir, const std::string& articles) {
  WriteFile(dir / "corpus.json",
            R"({"documents":[{"doc_id":"law","title":"Law","kind":"law","language":"english"}]})");
  WriteFile(dir / "law.articles.jsonl", articles);
}

}  // namespace

TEST_CASE("fixture corpus loads in canonical order") {
  const Corpus c = LoadCorpus(Fixture("corpus"));
  REQUIRE(c.documents.size() == 3);
  CHECK(c.documents[0].doc_id == "coop_bylaws");
  CHECK(c.documents[1].doc_id == "coop_law");
  CHECK(c.article_count() == 15);
  CHECK(c.qa_pair_count() == 0);

  const Article* a5 = c.FindArticle("coop_law", 5);
  REQUIRE(a5 != nullptr);
  CHECK(a5->parent_doc == "coop_law");
  CHECK(a5->heading == std::optional<std::string>("الجمعية العمومية"));
  CHECK(c.FindArticle("coop_law", 3)->heading == std::nullopt);
  CHECK(c.FindArticle("coop_law", 99) == nullptr);

  const Corpus qa = LoadCorpus(Fixture("qa_dataset"));
  CHECK(qa.qa_pair_count() == 3);
  const QAPair* q = qa.FindQaPair("coop_qa/q2");
  REQUIRE(q != nullptr);
  CHECK(q->article_number == 7);
  CHECK(q->source == QaSource::kHuman);
}

TEST_CASE("passages carry provenance") {
  Corpus c = LoadCorpus(Fixture("corpus"));
  c.documents.push_back(LoadCorpus(Fixture("qa_dataset")).documents[0]);
  const auto passages = FlattenToPassages(c);
  CHECK(passages.size() == c.article_count() + c.qa_pair_count());
  bool saw_heading = false, saw_qa = false;
  for (const auto& p : passages) {
    CHECK_FALSE(p.text.empty());
    if (p.source.doc_id == "coop_law" && p.source.article_number == 1) {
      CHECK(p.text.rfind("Definitions\n", 0) == 0);
      CHECK(p.source.Label() == "coop_law/art-1");
      saw_heading = true;
    }
    if (p.source.is_qa()) {
      CHECK(p.text.rfind("Q: ", 0) == 0);
      CHECK(p.text.find("\nA: ") != std::string::npos);
      CHECK(p.source.Label() == p.source.qa_id);
      saw_qa = true;
    }
  }
  CHECK(saw_heading);
  CHECK(saw_qa);
}

TEST_CASE("write then load round-trips") {
  Corpus c = LoadCorpus(Fixture("corpus"));
  c.documents.push_back(LoadCorpus(Fixture("qa_dataset")).documents[0]);
  std::sort(c.documents.begin(), c.documents.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  TempDir dir;
  WriteCorpus(c, dir.path());
  const Corpus again = LoadCorpus(dir.path());
  CHECK(SerializeCorpus(again) == SerializeCorpus(c));
}

TEST_CASE("loader rejects bad input") {
  SUBCASE("missing manifest") {
    TempDir dir;
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kMissingFile);
  }
  SUBCASE("missing article file") {
    TempDir dir;
    WriteFile(dir / "corpus.json",
              R"({"documents":[{"doc_id":"law","title":"Law","kind":"law","language":"english"}]})");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kMissingFile);
  }
  SUBCASE("duplicate article number") {
    TempDir dir;
    WriteMinimal(dir, "{\"article_number\":1,\"text\":\"a\"}\n{\"article_number\":1,\"text\":\"b\"}\n");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kDuplicateId);
  }
  SUBCASE("non-positive article number") {
    TempDir dir;
    WriteMinimal(dir, "{\"article_number\":0,\"text\":\"a\"}\n");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kSchemaViolation);
  }
  SUBCASE("empty text") {
    TempDir dir;
    WriteMinimal(dir, "{\"article_number\":1,\"text\":\"   \"}\n");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kSchemaViolation);
  }
  SUBCASE("not json") {
    TempDir dir;
    WriteMinimal(dir, "{article_number: 1}\n");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kSchemaViolation);
  }
  SUBCASE("unknown kind") {
    TempDir dir;
    WriteFile(dir / "corpus.json",
              R"({"documents":[{"doc_id":"law","title":"Law","kind":"decree","language":"english"}]})");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kSchemaViolation);
  }
  SUBCASE("duplicate doc id") {
    TempDir dir;
    WriteFile(dir / "corpus.json", R"({"documents":[
      {"doc_id":"law","title":"Law","kind":"law","language":"english"},
      {"doc_id":"law","title":"Law again","kind":"law","language":"english"}]})");
    WriteFile(dir / "law.articles.jsonl", "{\"article_number\":1,\"text\":\"a\"}\n");
    CHECK_THROWS_CODE(LoadCorpus(dir.path()), ErrorCode::kDuplicateId);
  }
}

TEST_CASE("text is NFC-normalized on load") {
  TempDir dir;
  WriteMinimal(dir, "{\"article_number\":1,\"text\":\"caf\\u0065\\u0301\"}\n");
  const Corpus c = LoadCorpus(dir.path());
  CHECK(c.documents[0].articles[0].text == "caf\xC3\xA9");
}

TEST_CASE("ValidateCorpus checks in-memory invariants") {
  Corpus c;
  c.documents.push_back(testing::SyntheticLaw("law", 3));
  CHECK_NOTHROW(ValidateCorpus(c));
  c.documents[0].articles[1].article_number = 1;
  CHECK_THROWS_CODE(ValidateCorpus(c), ErrorCode::kDuplicateId);
}
