#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace legalrag {

enum class JudgmentLabel { kRight, kRelated, kWrong };
std::string_view ToString(JudgmentLabel label);

/// Expert verdict on one answer. Satisfaction bands: Right = 100, Wrong = 0,
/// Related in [60, 85].
struct Judgment {
  std::string question_id;
  JudgmentLabel label = JudgmentLabel::kRight;
  double satisfaction = 100.0;
};

inline constexpr double kRelatedMinSatisfaction = 60.0;
inline constexpr double kRelatedMaxSatisfaction = 85.0;

/// Throws Error{kSatisfactionOutOfBand}.
void ValidateJudgment(const Judgment& judgment);

// Every reference answer is taken as correct, so all actual labels are
// positive: TP = right + related, FN = wrong, FP = TN = 0.
struct ConfusionCounts {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  size_t tn = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ConfusionMetrics {
  ConfusionCounts counts;
  ClassMetrics positive;
  ClassMetrics negative;
  /// Names of ratios whose denominator was zero; each was reported as 0.
  std::vector<std::string> undefined;
};

struct EvalReport {
  size_t n = 0;
  size_t n_right = 0;
  size_t n_related = 0;
  size_t n_wrong = 0;
  double accuracy_pct = 0.0;
  double avg_satisfaction_pct = 0.0;
  ConfusionMetrics confusion;
};

/// 100 * (right + related) / n. Throws Error{kEmptyJudgments}.
double OverallAccuracy(std::span<const Judgment> judgments);
/// Mean satisfaction. Throws Error{kEmptyJudgments}.
double AverageSatisfaction(std::span<const Judgment> judgments);
/// Throws Error{kEmptyJudgments}.
ConfusionMetrics ComputeConfusionMetrics(std::span<const Judgment> judgments);

/// Harmonic mean; 0 when precision + recall == 0.
double F1Score(double precision, double recall);

EvalReport Evaluate(std::span<const Judgment> judgments);

/// One JSON object per line: {"question_id", "label", "satisfaction"}.
/// Throws Error{kMissingFile, kSchemaViolation, kSatisfactionOutOfBand}.
std::vector<Judgment> LoadJudgments(const std::filesystem::path& path);
Judgment ParseJudgment(std::string_view json_line);
std::string JudgmentToJsonLine(const Judgment& judgment);

std::string ReportToJson(const EvalReport& report);
void WriteReport(const EvalReport& report, const std::filesystem::path& path);
/// Plain-text summary for the terminal.
std::string FormatReport(const EvalReport& report);

}  // namespace legalrag
