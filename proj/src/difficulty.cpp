#include "ugcs/difficulty.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "ugcs/errors.hpp"
#include "ugcs/kernels.hpp"
#include "ugcs/log_io.hpp"

namespace ugcs {

std::string_view metric_id(MetricKind kind) {
  switch (kind) {
    case MetricKind::anll: return "anll";
    case MetricKind::nll: return "nll";
    case MetricKind::pre_anll: return "pre_anll";
    case MetricKind::pre_nll: return "pre_nll";
    case MetricKind::pre_consistency: return "pre_consistency";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view id) {
  for (MetricKind k : kAllMetrics) {
    if (metric_id(k) == id) return k;
  }
  return std::nullopt;
}

DifficultyMetric DifficultyMetric::on_the_fly(MetricKind kind) {
  if (is_precomputed(kind)) {
    throw ConfigError(std::string(metric_id(kind)) + " needs a precomputed score table");
  }
  return DifficultyMetric(kind, nullptr);
}

DifficultyMetric DifficultyMetric::precomputed(MetricKind kind, ScoreTable table) {
  if (!is_precomputed(kind)) {
    throw ConfigError(std::string(metric_id(kind)) + " is computed from the log, not from a table");
  }
  return DifficultyMetric(kind, std::make_shared<const ScoreTable>(std::move(table)));
}

double DifficultyMetric::per_answer(const AnswerRecord& record) const {
  return kind_ == MetricKind::nll ? nll(record) : anll(record);
}

double DifficultyMetric::lookup(const std::string& sample_id) const {
  if (!table_) throw MissingPrecomputedScoreError("metric has no score table");
  auto it = table_->find(sample_id);
  if (it == table_->end()) {
    throw MissingPrecomputedScoreError("no " + std::string(metric_id(kind_)) +
                                       " score for sample '" + sample_id + "'");
  }
  return it->second;
}

double total_logprob(const AnswerRecord& record) {
  if (const auto* tokens = std::get_if<TokenLogprobs>(&record.evidence)) {
    return kernels::sum(tokens->values);
  }
  return std::get<SumLogprob>(record.evidence).value;
}

double anll(const AnswerRecord& record) {
  // 0.0 - s rather than -s so a zero sum yields +0.0.
  return (0.0 - total_logprob(record)) / static_cast<double>(record.num_tokens);
}

double nll(const AnswerRecord& record) {
  return anll(record) * static_cast<double>(record.num_tokens);
}

double consistency_score(std::span<const int> bits) {
  if (bits.size() < 2) {
    throw TooFewGenerationsError("consistency needs at least 2 generations, got " +
                                 std::to_string(bits.size()));
  }
  std::size_t correct = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw ConfigError("correctness bits must be 0 or 1");
    correct += static_cast<std::size_t>(b);
  }
  const double q = static_cast<double>(correct) / static_cast<double>(bits.size());
  return q * (1.0 - q);
}

ScoreTable build_consistency_table(const std::map<std::string, std::vector<int>>& generations) {
  ScoreTable out;
  out.reserve(generations.size());
  for (const auto& [id, bits] : generations) out.emplace(id, consistency_score(bits));
  return out;
}

double sample_difficulty(const SampleKey& key, std::span<const AnswerRecord> answers,
                         const DifficultyMetric& metric) {
  if (metric.precomputed()) return metric.lookup(key.sample_id);
  if (answers.empty()) throw EmptyInputError("no answers for sample '" + key.sample_id + "'");
  std::vector<const AnswerRecord*> ordered;
  ordered.reserve(answers.size());
  for (const auto& a : answers) ordered.push_back(&a);
  std::sort(ordered.begin(), ordered.end(),
            [](const AnswerRecord* a, const AnswerRecord* b) { return a->answer_index < b->answer_index; });
  std::vector<double> values;
  values.reserve(ordered.size());
  for (const auto* a : ordered) values.push_back(metric.per_answer(*a));
  return kernels::mean(values);
}

ScoreTable load_score_table(std::istream& in, TableOrientation orientation) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("score table: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("score table must be a JSON object");
  ScoreTable out;
  out.reserve(j.size());
  for (const auto& [id, v] : j.items()) {
    if (!v.is_number()) throw ConfigError("score table: value for '" + id + "' is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("score table: value for '" + id + "' is not finite");
    out.emplace(id, orientation == TableOrientation::higher_harder ? d : -d);
  }
  return out;
}

ScoreTable load_score_table_file(const std::string& path, TableOrientation orientation) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open score table: " + path);
  return load_score_table(in, orientation);
}

void save_score_table(std::ostream& out, const ScoreTable& table) {
  std::vector<const std::pair<const std::string, double>*> rows;
  rows.reserve(table.size());
  for (const auto& kv : table) rows.push_back(&kv);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->first < b->first; });
  out << '{';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ',';
    out << "\n  " << nlohmann::json(rows[i]->first).dump() << ": " << format_double(rows[i]->second);
  }
  out << (rows.empty() ? "}\n" : "\n}\n");
}

}  // namespace ugcs
