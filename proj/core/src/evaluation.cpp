#include "legalrag/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {
namespace {

using nlohmann::json;

void RequireNonEmpty(std::span<const Judgment> judgments) {
  if (judgments.empty()) throw Error(ErrorCode::kEmptyJudgments, "no judgments to evaluate");
}

bool IsCorrect(JudgmentLabel label) { return label != JudgmentLabel::kWrong; }

// num / den with the 0/0 := 0 convention; records the name when undefined.
double Ratio(size_t num, size_t den, const char* name, std::vector<std::string>& undefined) {
  if (den == 0) {
    undefined.emplace_back(name);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

json MetricsJson(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

std::string_view ToString(JudgmentLabel label) {
  switch (label) {
    case JudgmentLabel::kRight: return "Right";
    case JudgmentLabel::kRelated: return "Related";
    case JudgmentLabel::kWrong: return "Wrong";
  }
  return "Wrong";
}

void ValidateJudgment(const Judgment& j) {
  const double s = j.satisfaction;
  const auto fail = [&](const std::string& rule) {
    std::ostringstream msg;
    msg << "judgment '" << j.question_id << "': " << ToString(j.label) << " requires " << rule << ", got " << s;
    throw Error(ErrorCode::kSatisfactionOutOfBand, msg.str());
  };
  if (!std::isfinite(s) || s < 0.0 || s > 100.0) fail("satisfaction in [0, 100]");
  switch (j.label) {
    case JudgmentLabel::kRight:
      if (s != 100.0) fail("satisfaction 100");
      break;
    case JudgmentLabel::kWrong:
      if (s != 0.0) fail("satisfaction 0");
      break;
    case JudgmentLabel::kRelated:
      if (s < kRelatedMinSatisfaction || s > kRelatedMaxSatisfaction) fail("satisfaction in [60, 85]");
      break;
  }
}

double OverallAccuracy(std::span<const Judgment> judgments) {
  RequireNonEmpty(judgments);
  size_t correct = 0;
  for (const auto& j : judgments) correct += IsCorrect(j.label) ? 1 : 0;
  // Multiply first so 41/50 gives exactly 82.
  return 100.0 * static_cast<double>(correct) / static_cast<double>(judgments.size());
}

double AverageSatisfaction(std::span<const Judgment> judgments) {
  RequireNonEmpty(judgments);
  double sum = 0.0;
  for (const auto& j : judgments) sum += j.satisfaction;
  return sum / static_cast<double>(judgments.size());
}

double F1Score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

ConfusionMetrics ComputeConfusionMetrics(std::span<const Judgment> judgments) {
  RequireNonEmpty(judgments);
  ConfusionMetrics m;
  for (const auto& j : judgments) {
    if (IsCorrect(j.label)) {
      ++m.counts.tp;
    } else {
      ++m.counts.fn;
    }
  }
  const auto& c = m.counts;
  m.positive.precision = Ratio(c.tp, c.tp + c.fp, "precision_pos", m.undefined);
  m.positive.recall = Ratio(c.tp, c.tp + c.fn, "recall_pos", m.undefined);
  m.positive.f1 = F1Score(m.positive.precision, m.positive.recall);
  m.negative.precision = Ratio(c.tn, c.tn + c.fn, "precision_neg", m.undefined);
  m.negative.recall = Ratio(c.tn, c.tn + c.fp, "recall_neg", m.undefined);
  m.negative.f1 = F1Score(m.negative.precision, m.negative.recall);
  return m;
}

EvalReport Evaluate(std::span<const Judgment> judgments) {
  RequireNonEmpty(judgments);
  EvalReport r;
  r.n = judgments.size();
  for (const auto& j : judgments) {
    switch (j.label) {
      case JudgmentLabel::kRight: ++r.n_right; break;
      case JudgmentLabel::kRelated: ++r.n_related; break;
      case JudgmentLabel::kWrong: ++r.n_wrong; break;
    }
  }
  r.accuracy_pct = OverallAccuracy(judgments);
  r.avg_satisfaction_pct = AverageSatisfaction(judgments);
  r.confusion = ComputeConfusionMetrics(judgments);
  return r;
}

Judgment ParseJudgment(std::string_view line) {
  const json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw Error(ErrorCode::kSchemaViolation, "judgment record is not a JSON object");
  }
  const auto field = [&](const char* key) -> const json& {
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorCode::kSchemaViolation, std::string("missing field '") + key + "'");
    return *it;
  };
  Judgment j;
  const json& id = field("question_id");
  if (!id.is_string() || text::IsBlank(id.get_ref<const std::string&>())) {
    throw Error(ErrorCode::kSchemaViolation, "field 'question_id' must be a non-empty string");
  }
  j.question_id = id.get<std::string>();

  const json& label = field("label");
  if (!label.is_string()) throw Error(ErrorCode::kSchemaViolation, "field 'label' must be a string");
  const auto& l = label.get_ref<const std::string&>();
  if (l == "Right") {
    j.label = JudgmentLabel::kRight;
  } else if (l == "Related") {
    j.label = JudgmentLabel::kRelated;
  } else if (l == "Wrong") {
    j.label = JudgmentLabel::kWrong;
  } else {
    throw Error(ErrorCode::kSchemaViolation, "field 'label' must be Right|Related|Wrong, got '" + l + "'");
  }

  const json& s = field("satisfaction");
  if (!s.is_number()) throw Error(ErrorCode::kSchemaViolation, "field 'satisfaction' must be a number");
  j.satisfaction = s.get<double>();
  ValidateJudgment(j);
  return j;
}

std::string JudgmentToJsonLine(const Judgment& judgment) {
  return json{{"question_id", judgment.question_id},
              {"label", ToString(judgment.label)},
              {"satisfaction", judgment.satisfaction}}
      .dump();
}

std::vector<Judgment> LoadJudgments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open judgments " + path.string());
  std::vector<Judgment> out;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::IsBlank(line)) continue;
    try {
      Judgment j = ParseJudgment(line);
      if (!ids.insert(j.question_id).second) {
        throw Error(ErrorCode::kSchemaViolation, "duplicate question_id '" + j.question_id + "'");
      }
      out.push_back(std::move(j));
    } catch (const Error& e) {
      throw Error(e.code(), path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string ReportToJson(const EvalReport& r) {
  const auto& c = r.confusion;
  json j = {
      {"n", r.n},
      {"n_right", r.n_right},
      {"n_related", r.n_related},
      {"n_wrong", r.n_wrong},
      {"accuracy_pct", r.accuracy_pct},
      {"avg_satisfaction_pct", r.avg_satisfaction_pct},
      {"precision_pos", c.positive.precision},
      {"recall_pos", c.positive.recall},
      {"f1_pos", c.positive.f1},
      {"precision_neg", c.negative.precision},
      {"recall_neg", c.negative.recall},
      {"f1_neg", c.negative.f1},
      {"confusion", {{"tp", c.counts.tp}, {"fp", c.counts.fp}, {"fn", c.counts.fn}, {"tn", c.counts.tn}}},
      {"positive_class", MetricsJson(c.positive)},
      {"negative_class", MetricsJson(c.negative)},
      {"undefined_ratios", c.undefined},
  };
  return j.dump(2);
}

void WriteReport(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write report " + path.string());
  out << ReportToJson(report) << '\n';
}

std::string FormatReport(const EvalReport& r) {
  const auto& c = r.confusion;
  std::ostringstream os;
  os << std::fixed;
  os << "questions:            " << r.n << " (right " << r.n_right << ", related " << r.n_related << ", wrong "
     << r.n_wrong << ")\n";
  os << std::setprecision(2);
  os << "overall accuracy:     " << r.accuracy_pct << "%\n";
  os << "average satisfaction: " << r.avg_satisfaction_pct << "%\n";
  os << std::setprecision(4);
  os << "right/related class:  precision " << c.positive.precision << "  recall " << c.positive.recall << "  f1 "
     << c.positive.f1 << "\n";
  os << "wrong class:          precision " << c.negative.precision << "  recall " << c.negative.recall << "  f1 "
     << c.negative.f1 << "\n";
  os << "confusion:            tp " << c.counts.tp << "  fp " << c.counts.fp << "  fn " << c.counts.fn << "  tn "
     << c.counts.tn << "\n";
  if (!c.undefined.empty()) {
    os << "undefined (0/0, reported as 0):";
    for (const auto& u : c.undefined) os << ' ' << u;
    os << '\n';
  }
  return os.str();
}

}  // namespace legalrag
