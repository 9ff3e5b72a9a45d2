#include "ugcs/log_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "ugcs/errors.hpp"
#include "ugcs/kernels.hpp"

namespace ugcs {
namespace {

using json = nlohmann::json;

enum class Field { none, step, sample_id, answer_index, reward, num_tokens, token_logprobs, sum_logprob, unknown };

constexpr const char* field_name(Field f) {
  switch (f) {
    case Field::step: return "step";
    case Field::sample_id: return "sample_id";
    case Field::answer_index: return "answer_index";
    case Field::reward: return "reward";
    case Field::num_tokens: return "num_tokens";
    case Field::token_logprobs: return "token_logprobs";
    case Field::sum_logprob: return "sum_logprob";
    default: return "?";
  }
}

Field lookup_field(std::string_view k) {
  if (k == "step") return Field::step;
  if (k == "sample_id") return Field::sample_id;
  if (k == "answer_index") return Field::answer_index;
  if (k == "reward") return Field::reward;
  if (k == "num_tokens") return Field::num_tokens;
  if (k == "token_logprobs") return Field::token_logprobs;
  if (k == "sum_logprob") return Field::sum_logprob;
  return Field::unknown;
}

// Fills one AnswerRecord straight from SAX events; no DOM is built.
class RecordSax {
 public:
  explicit RecordSax(AnswerRecord& out) : out_(out) { tokens_.clear(); }

  bool null() { return scalar_type_error("null"); }
  bool boolean(bool) { return scalar_type_error("a boolean"); }
  bool number_integer(json::number_integer_t v) { return integer(static_cast<std::int64_t>(v)); }
  bool number_unsigned(json::number_unsigned_t v) {
    if (v > static_cast<json::number_unsigned_t>(INT64_MAX)) {
      if (skipping()) return true;
      return integer_out_of_range();
    }
    return integer(static_cast<std::int64_t>(v));
  }
  bool number_float(json::number_float_t v, const std::string&) {
    if (skipping()) return true;
    if (in_tokens_) return push_token(v);
    switch (field_) {
      case Field::reward: return set_real(v, out_.reward, seen_reward_);
      case Field::sum_logprob: return set_real(v, sum_value_, seen_sum_);
      case Field::step:
      case Field::answer_index:
      case Field::num_tokens:
        return fail(std::string("field '") + field_name(field_) + "' must be an integer");
      default: return scalar_type_error("a number");
    }
  }
  bool string(std::string& s) {
    if (skipping()) return true;
    if (in_tokens_) return fail("token_logprobs must contain only numbers");
    if (field_ == Field::sample_id) {
      if (seen_id_) return duplicate();
      out_.sample_id = std::move(s);
      seen_id_ = true;
      field_ = Field::none;
      return true;
    }
    return scalar_type_error("a string");
  }
  bool binary(json::binary_t&) { return fail("binary values are not supported"); }

  bool start_object(std::size_t) {
    if (skip_depth_ > 0 || field_ == Field::unknown) {
      ++skip_depth_;
      return true;
    }
    if (depth_ == 0) {
      depth_ = 1;
      seen_any_object_ = true;
      return true;
    }
    return fail(field_ == Field::none ? "unexpected nested object"
                                      : std::string("field '") + field_name(field_) +
                                            "' must not be an object");
  }
  bool end_object() {
    if (skip_depth_ > 0) {
      if (--skip_depth_ == 0) field_ = Field::none;
      return true;
    }
    depth_ = 0;
    return true;
  }
  bool key(std::string& k) {
    if (skip_depth_ > 0) return true;
    field_ = lookup_field(k);
    return true;
  }
  bool start_array(std::size_t) {
    if (skip_depth_ > 0 || field_ == Field::unknown) {
      ++skip_depth_;
      return true;
    }
    if (depth_ == 0) return fail("a log line must be a JSON object");
    if (field_ == Field::token_logprobs && !in_tokens_) {
      if (seen_tokens_) return duplicate();
      in_tokens_ = true;
      return true;
    }
    if (in_tokens_) return fail("token_logprobs must be a flat array");
    return fail(std::string("field '") + field_name(field_) + "' must not be an array");
  }
  bool end_array() {
    if (skip_depth_ > 0) {
      if (--skip_depth_ == 0) field_ = Field::none;
      return true;
    }
    in_tokens_ = false;
    seen_tokens_ = true;
    field_ = Field::none;
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
    return fail(std::string("invalid JSON: ") + ex.what());
  }

  const std::string& error() const { return error_; }

  // Structural completeness; value invariants are checked by the caller.
  void finish(std::size_t line_no) {
    if (!error_.empty()) throw SchemaError(error_, line_no);
    if (!seen_any_object_) throw SchemaError("a log line must be a JSON object", line_no);
    auto require = [&](bool seen, Field f) {
      if (!seen) throw SchemaError(std::string("missing field '") + field_name(f) + "'", line_no);
    };
    require(seen_step_, Field::step);
    require(seen_id_, Field::sample_id);
    require(seen_answer_, Field::answer_index);
    require(seen_reward_, Field::reward);
    require(seen_tokens_count_, Field::num_tokens);
    if (seen_tokens_ == seen_sum_) {
      throw SchemaError("exactly one of 'token_logprobs' or 'sum_logprob' is required", line_no);
    }
    if (seen_tokens_) {
      out_.evidence = TokenLogprobs{std::move(tokens_)};
    } else {
      out_.evidence = SumLogprob{sum_value_};
    }
  }

 private:
  bool skipping() const { return skip_depth_ > 0 || (field_ == Field::unknown && !in_tokens_); }

  bool integer(std::int64_t v) {
    if (skipping()) {
      if (skip_depth_ == 0) field_ = Field::none;
      return true;
    }
    if (in_tokens_) return push_token(static_cast<double>(v));
    switch (field_) {
      case Field::step: return set_int(v, out_.step, seen_step_);
      case Field::answer_index: return set_int(v, out_.answer_index, seen_answer_);
      case Field::num_tokens: return set_int(v, out_.num_tokens, seen_tokens_count_);
      case Field::reward: return set_real(static_cast<double>(v), out_.reward, seen_reward_);
      case Field::sum_logprob: return set_real(static_cast<double>(v), sum_value_, seen_sum_);
      default: return scalar_type_error("a number");
    }
  }
  bool integer_out_of_range() { return fail(std::string("field '") + field_name(field_) + "' is out of range"); }

  bool set_int(std::int64_t v, std::int64_t& dst, bool& seen) {
    if (seen) return duplicate();
    dst = v;
    seen = true;
    field_ = Field::none;
    return true;
  }
  bool set_real(double v, double& dst, bool& seen) {
    if (seen) return duplicate();
    if (!std::isfinite(v)) return fail(std::string("field '") + field_name(field_) + "' is not finite");
    dst = v;
    seen = true;
    field_ = Field::none;
    return true;
  }
  bool push_token(double v) {
    if (!std::isfinite(v)) return fail("token_logprobs contains a non-finite value");
    tokens_.push_back(v);
    return true;
  }
  bool scalar_type_error(const char* what) {
    if (skipping()) {
      if (skip_depth_ == 0) field_ = Field::none;
      return true;
    }
    if (in_tokens_) return fail("token_logprobs must contain only numbers");
    if (depth_ == 0) return fail("a log line must be a JSON object");
    return fail(std::string("field '") + field_name(field_) + "' must not be " + what);
  }
  bool duplicate() { return fail(std::string("field '") + field_name(field_) + "' appears twice"); }
  bool fail(std::string msg) {
    if (error_.empty()) error_ = std::move(msg);
    return false;
  }

  AnswerRecord& out_;
  std::vector<double> tokens_;
  double sum_value_ = 0.0;
  std::string error_;
  Field field_ = Field::none;
  int depth_ = 0;
  int skip_depth_ = 0;
  bool in_tokens_ = false;
  bool seen_any_object_ = false;
  bool seen_step_ = false, seen_id_ = false, seen_answer_ = false, seen_reward_ = false;
  bool seen_tokens_count_ = false, seen_tokens_ = false, seen_sum_ = false;
};

void check_invariants(AnswerRecord& r, std::size_t line_no, const ParseOptions& opt) {
  if (r.step < 1) throw InvariantError("step must be >= 1", line_no);
  if (r.sample_id.empty()) throw InvariantError("sample_id must not be empty", line_no);
  if (r.answer_index < 0) throw InvariantError("answer_index must be >= 0", line_no);
  if (opt.n_per_question > 0 && r.answer_index >= opt.n_per_question) {
    throw InvariantError("answer_index " + std::to_string(r.answer_index) +
                             " not below n_per_question " + std::to_string(opt.n_per_question),
                         line_no);
  }
  if (r.num_tokens < 1) throw InvariantError("num_tokens must be >= 1", line_no);
  if (auto* tokens = std::get_if<TokenLogprobs>(&r.evidence)) {
    if (static_cast<std::int64_t>(tokens->values.size()) != r.num_tokens) {
      throw InvariantError("token_logprobs has " + std::to_string(tokens->values.size()) +
                               " entries but num_tokens is " + std::to_string(r.num_tokens),
                           line_no);
    }
    if (kernels::max_value(tokens->values) > opt.logprob_tolerance) {
      throw InvariantError("token log-probability above " + format_double(opt.logprob_tolerance),
                           line_no);
    }
    kernels::clamp_nonpositive(tokens->values);
  } else {
    double& s = std::get<SumLogprob>(r.evidence).value;
    if (s > opt.logprob_tolerance) {
      throw InvariantError("sum_logprob above " + format_double(opt.logprob_tolerance), line_no);
    }
    if (!(s < 0.0)) s = 0.0;
  }
}

}  // namespace

ParseOptions ParseOptions::for_manifest(const RunManifest& manifest) {
  ParseOptions o;
  o.n_per_question = manifest.n_per_question;
  return o;
}

AnswerRecord parse_record(std::string_view line, std::size_t line_no, const ParseOptions& options) {
  AnswerRecord r;
  RecordSax sax(r);
  json::sax_parse(line.begin(), line.end(), &sax);
  sax.finish(line_no);
  check_invariants(r, line_no, options);
  return r;
}

struct LogReader::DuplicateIndex {
  struct Key {
    Step step;
    std::string id;
    std::int64_t answer;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const noexcept {
      return SampleKeyHash{}(SampleKey{k.step, k.id}) * 31 + static_cast<std::size_t>(k.answer);
    }
  };
  std::unordered_set<Key, Hash> keys;
};

LogReader::LogReader(std::istream& in, ParseOptions options)
    : in_(in), options_(options), seen_(std::make_unique<DuplicateIndex>()) {}

LogReader::~LogReader() = default;

bool LogReader::next(AnswerRecord& out) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.find_first_not_of(" \t") == std::string::npos) continue;
    out = parse_record(line_, line_no_, options_);
    if (options_.check_duplicates) {
      if (!seen_->keys.insert({out.step, out.sample_id, out.answer_index}).second) {
        throw DuplicateKeyError("duplicate (step, sample_id, answer_index) = (" +
                                    std::to_string(out.step) + ", " + out.sample_id + ", " +
                                    std::to_string(out.answer_index) + ")",
                                line_no_);
      }
    }
    return true;
  }
  return false;
}

std::vector<AnswerRecord> parse_log_stream(std::istream& in, const ParseOptions& options) {
  std::vector<AnswerRecord> out;
  LogReader reader(in, options);
  AnswerRecord r;
  while (reader.next(r)) out.push_back(std::move(r));
  return out;
}

std::vector<AnswerRecord> parse_log_stream(std::istream& in, const RunManifest& manifest) {
  return parse_log_stream(in, ParseOptions::for_manifest(manifest));
}

std::vector<AnswerRecord> read_log_file(const std::filesystem::path& path,
                                        const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open log file: " + path.string());
  return parse_log_stream(in, options);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep integral values recognizably floating-point in JSON ("1.0", not "1").
  if (std::isfinite(v) && s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string serialize_record(const AnswerRecord& r) {
  std::string out;
  out.reserve(96);
  out += "{\"step\":";
  out += std::to_string(r.step);
  out += ",\"sample_id\":";
  out += json(r.sample_id).dump();
  out += ",\"answer_index\":";
  out += std::to_string(r.answer_index);
  out += ",\"reward\":";
  out += format_double(r.reward);
  out += ",\"num_tokens\":";
  out += std::to_string(r.num_tokens);
  if (const auto* tokens = std::get_if<TokenLogprobs>(&r.evidence)) {
    out += ",\"token_logprobs\":[";
    for (std::size_t i = 0; i < tokens->values.size(); ++i) {
      if (i) out += ',';
      out += format_double(tokens->values[i]);
    }
    out += ']';
  } else {
    out += ",\"sum_logprob\":";
    out += format_double(std::get<SumLogprob>(r.evidence).value);
  }
  out += '}';
  return out;
}

void write_log(std::ostream& out, std::span<const AnswerRecord> records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

RunManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  RunManifest m;
  try {
    m.n_per_question = j.value("n_per_question", m.n_per_question);
    m.batch_size = j.value("batch_size", m.batch_size);
    m.total_steps = j.value("total_steps", m.total_steps);
    m.save_every = j.value("save_every", m.save_every);
    m.max_response_len = j.value("max_response_len", m.max_response_len);
    if (j.contains("checkpoint_steps")) {
      m.checkpoint_steps = j.at("checkpoint_steps").get<std::vector<Step>>();
    } else {
      m.checkpoint_steps = RunManifest::default_checkpoints(m.total_steps, m.save_every);
    }
    if (j.contains("logprob_phase")) m.logprob_phase = j.at("logprob_phase").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

json manifest_to_json(const RunManifest& m) {
  json j = {{"n_per_question", m.n_per_question},   {"batch_size", m.batch_size},
            {"total_steps", m.total_steps},         {"save_every", m.save_every},
            {"max_response_len", m.max_response_len}, {"checkpoint_steps", m.checkpoint_steps}};
  if (m.logprob_phase) j["logprob_phase"] = *m.logprob_phase;
  return j;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest: " + path.string());
  out << manifest_to_json(manifest).dump(2) << '\n';
}

}  // namespace ugcs
