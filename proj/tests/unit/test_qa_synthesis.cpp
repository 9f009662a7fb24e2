#include <doctest.h>

#include <map>
#include <mutex>

#include "legalrag/qa_synthesis.hpp"
#include "test_support.hpp"

using namespace legalrag;

namespace {

std::string ReplyWith(size_t n, int article) {
  std::string s = "Here you go:\n[";
  for (size_t i = 0; i < n; ++i) {
    if (i) s += ",";
    s += R"({"question":"Q)" + std::to_string(i) + R"( about article?","answer":"According to Article )" +
         std::to_string(article) + R"(, yes."})";
  }
  return s + "]\nHope this helps.";
}

// Article number parsed back out of the "Article N:" message.
int ArticleOf(const CompletionRequest& r) {
  const std::string& body = r.messages.at(1).content;
  return std::stoi(body.substr(8, body.find(':') - 8));
}

Corpus TwoDocCorpus(int law_articles) {
  Corpus c;
  c.documents.push_back(testing::SyntheticLaw("law", law_articles));
  Document bylaws = testing::SyntheticLaw("bylaws", 2);
  bylaws.kind = DocumentKind::kBylaws;
  c.documents.push_back(bylaws);
  return c;
}

}  // namespace

TEST_CASE("prompt shape") {
  Article a{12, std::string("Reserve"), "Twenty percent goes to reserve.", "law"};
  const auto msgs = BuildSynthesisPrompt(a, SynthesisConfig{});
  REQUIRE(msgs.size() == 3);
  for (const auto& m : msgs) CHECK(m.role == Role::kUser);
  CHECK(msgs[0].content.find("Generate 5 questions") == 0);
  CHECK(msgs[1].content == "Article 12:\nReserve\nTwenty percent goes to reserve.");
  CHECK(msgs[2].content.find("\"question\"") != std::string::npos);
  CHECK(msgs[2].content.find("Article 12") != std::string::npos);
  CHECK(msgs[2].content.find("{article_number}") == std::string::npos);
}

TEST_CASE("reply parsing") {
  CHECK(ParseSynthesisReply(ReplyWith(3, 1), 3).size() == 3);
  CHECK(ParseSynthesisReply(R"(see [1] first, then [{"question":"a]b","answer":"c"}])", 1)[0].question == "a]b");
  CHECK_THROWS_CODE(ParseSynthesisReply("no json here", 1), ErrorCode::kParseFailure);
  CHECK_THROWS_CODE(ParseSynthesisReply(R"([{"question":"a","answer":"b","extra":1}])", 1),
                    ErrorCode::kParseFailure);
  CHECK_THROWS_CODE(ParseSynthesisReply(R"([{"question":"a","answer":2}])", 1), ErrorCode::kParseFailure);
  CHECK_THROWS_CODE(ParseSynthesisReply(R"([{"question":" ","answer":"b"}])", 1), ErrorCode::kEmptyField);
  CHECK_THROWS_CODE(ParseSynthesisReply(ReplyWith(4, 1), 5), ErrorCode::kCountMismatch);
}

TEST_CASE("article citation check") {
  CHECK(CitesArticle("According to Article 12, yes", 12));
  CHECK(CitesArticle("(12)", 12));
  CHECK_FALSE(CitesArticle("Article 120 says", 12));
  CHECK_FALSE(CitesArticle("Article 112 says", 12));
}

TEST_CASE("law articles only, ordered ids, sink order") {
  const Corpus c = TwoDocCorpus(6);
  MockLlmGateway gw([](const CompletionRequest& r) { return ReplyWith(2, ArticleOf(r)); });
  SynthesisConfig cfg;
  cfg.questions_per_article = 2;
  cfg.parallelism = 3;
  std::vector<std::string> streamed;
  const auto report = SynthesizeDataset(c, cfg, gw, [&](const std::vector<QAPair>& batch) {
    for (const auto& p : batch) streamed.push_back(p.qa_id);
  });
  CHECK(report.articles_processed == 6);
  CHECK(report.failures.empty());
  CHECK(report.style_warnings == 0);
  REQUIRE(report.pairs.size() == 12);
  CHECK(report.pairs[0].qa_id == "law/gen-a1-1");
  CHECK(report.pairs[11].qa_id == "law/gen-a6-2");
  CHECK(report.pairs[4].article_number == 3);
  CHECK(report.pairs[4].source == QaSource::kGenerated);
  std::vector<std::string> expected;
  for (const auto& p : report.pairs) expected.push_back(p.qa_id);
  CHECK(streamed == expected);
}

TEST_CASE("parse failures retry the same prompt, then give up") {
  const Corpus c = TwoDocCorpus(3);
  std::mutex mu;
  std::map<int, int> attempts;
  std::vector<ChatMessage> first_prompt_a2;
  bool same_prompt = true;
  MockLlmGateway gw([&](const CompletionRequest& r) {
    const int a = ArticleOf(r);
    std::lock_guard lock(mu);
    const int n = ++attempts[a];
    if (a == 2) {
      if (n == 1) first_prompt_a2 = r.messages;
      same_prompt = same_prompt && r.messages == first_prompt_a2;
      return std::string("not json at all");
    }
    if (a == 3 && n == 1) return ReplyWith(4, a);  // wrong count, then fine
    return ReplyWith(5, a);
  });
  SynthesisConfig cfg;
  const auto report = SynthesizeDataset(c, cfg, gw);
  CHECK(report.pairs.size() == 10);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].doc_id == "law");
  CHECK(report.failures[0].article_number == 2);
  CHECK(report.failures[0].reason.find("parse_failure") != std::string::npos);
  CHECK(attempts[2] == 4);  // 1 + max_parse_retries
  CHECK(attempts[3] == 2);
  CHECK(same_prompt);
}

TEST_CASE("provider outage is recorded without parse retries") {
  const Corpus c = TwoDocCorpus(2);
  int calls = 0;
  MockLlmGateway gw([&](const CompletionRequest& r) -> std::string {
    ++calls;
    if (ArticleOf(r) == 1) throw Error(ErrorCode::kProviderUnavailable, "down");
    return ReplyWith(5, 2);
  });
  const auto report = SynthesizeDataset(c, SynthesisConfig{}, gw);
  CHECK(calls == 2);
  CHECK(report.pairs.size() == 5);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].reason.find("provider_unavailable") != std::string::npos);
}

TEST_CASE("style warnings and empty corpus") {
  const Corpus c = TwoDocCorpus(1);
  MockLlmGateway gw([](const CompletionRequest&) {
    return std::string(R"([{"question":"q","answer":"No citation here."}])");
  });
  SynthesisConfig cfg;
  cfg.questions_per_article = 1;
  CHECK(SynthesizeDataset(c, cfg, gw).style_warnings == 1);

  Corpus only_bylaws;
  only_bylaws.documents.push_back(c.documents[1]);
  CHECK_THROWS_CODE(SynthesizeDataset(only_bylaws, cfg, gw), ErrorCode::kInvalidArgument);
  cfg.questions_per_article = 0;
  CHECK_THROWS_CODE(SynthesizeDataset(c, cfg, gw), ErrorCode::kInvalidArgument);
}
