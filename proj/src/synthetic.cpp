#include "ugcs/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ugcs/errors.hpp"
#include "ugcs/log_io.hpp"

namespace ugcs {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

// Independent streams per purpose so that, e.g., changing the validation
// pool size leaves the training log untouched.
enum Stream : std::uint64_t { kPool = 1, kDynamics, kSampling, kAnswers, kValidation, kEval, kPre };

Rng stream(std::uint64_t seed, Stream s) { return Rng(seed * 0x2545f4914f6cdd1dULL + s); }

#define UGCS_SYNTHETIC_FIELDS(X) \
  X(seed)                        \
  X(total_steps)                 \
  X(batch_size)                  \
  X(n_per_question)              \
  X(save_every)                  \
  X(max_response_len)            \
  X(initial_ability)             \
  X(ability_drift)               \
  X(ability_noise_sd)            \
  X(difficulty_mean)             \
  X(difficulty_sd)               \
  X(eval_difficulty_shift)       \
  X(reward_sharpness)            \
  X(anll_noise_sd)               \
  X(pool_size)                   \
  X(eval_pool_size)              \
  X(val_pool_size)               \
  X(shortcut_onset)              \
  X(shortcut_drift)              \
  X(shortcut_noise_sd)           \
  X(shortcut_gain)               \
  X(shortcut_cost)               \
  X(shortcut_free_percent)       \
  X(shortcut_width_percent)      \
  X(memo_susceptible_fraction) \
  X(memo_strength)               \
  X(memo_scale)                  \
  X(label_noise_percent)         \
  X(label_noise_difficulty_shift) \
  X(piecewise_stationary)        \
  X(length_mean)                 \
  X(length_hardness_slope)       \
  X(length_noise_sd)             \
  X(token_evidence_fraction)     \
  X(pre_generations)

struct PoolItem {
  double difficulty;
  double shortcut_weight;
  bool label_noise;
  bool memorizable = false;
};

struct Answer {
  double reward;
  double anll;
  std::int64_t num_tokens;
};

class AnswerModel {
 public:
  explicit AnswerModel(const SyntheticRunConfig& c) : c_(c) {}

  Answer draw(Rng& rng, double ability, const PoolItem& item) const {
    const double gap = item.difficulty - ability;
    const bool correct = rng.bernoulli(sigmoid(-c_.reward_sharpness * gap));
    Answer a;
    a.reward = (correct && !item.label_noise) ? 1.0 : 0.0;
    a.anll = softplus(gap) + std::fabs(rng.normal()) * c_.anll_noise_sd;
    const double log_len = std::log(c_.length_mean) +
                           c_.length_hardness_slope * (softplus(gap) - std::log(2.0)) +
                           c_.length_noise_sd * rng.normal();
    const double len = std::round(std::exp(log_len));
    a.num_tokens = static_cast<std::int64_t>(std::clamp(len, 1.0, static_cast<double>(c_.max_response_len)));
    return a;
  }

  AnswerRecord record(Rng& rng, const Answer& a, Step step, std::string sample_id, std::int64_t index) const {
    AnswerRecord r;
    r.step = step;
    r.sample_id = std::move(sample_id);
    r.answer_index = index;
    r.reward = a.reward;
    r.num_tokens = a.num_tokens;
    const double total = a.anll * static_cast<double>(a.num_tokens);
    if (c_.token_evidence_fraction > 0.0 && rng.uniform() < c_.token_evidence_fraction) {
      std::vector<double> w(static_cast<std::size_t>(a.num_tokens));
      double sum = 0.0;
      for (auto& x : w) {
        x = -std::log(1.0 - rng.uniform());
        sum += x;
      }
      for (auto& x : w) x = -(total * x / sum);
      r.evidence = TokenLogprobs{std::move(w)};
    } else {
      r.evidence = SumLogprob{0.0 - total};
    }
    return r;
  }

 private:
  const SyntheticRunConfig& c_;
};

double percent_harder(const std::vector<double>& sorted_desc, double d) {
  // Share of pool items strictly harder than d, in percent.
  auto first_not_harder = std::partition_point(sorted_desc.begin(), sorted_desc.end(),
                                               [&](double x) { return x > d; });
  return 100.0 * static_cast<double>(first_not_harder - sorted_desc.begin()) /
         static_cast<double>(sorted_desc.size());
}

double shortcut_weight(const SyntheticRunConfig& c, double percentile) {
  if (c.shortcut_width_percent <= 0.0) return percentile >= c.shortcut_free_percent ? 1.0 : 0.0;
  return sigmoid((percentile - c.shortcut_free_percent) / c.shortcut_width_percent);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's rejection keeps the draw unbiased.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void SyntheticRunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("synthetic config: ") + what);
  };
  require(total_steps >= 1, "total_steps must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(n_per_question >= 1, "n_per_question must be >= 1");
  require(save_every >= 1 && save_every <= total_steps, "save_every must be in [1, total_steps]");
  require(max_response_len >= 1, "max_response_len must be >= 1");
  require(ability_noise_sd >= 0 && difficulty_sd >= 0 && anll_noise_sd >= 0 && shortcut_noise_sd >= 0 &&
              length_noise_sd >= 0,
          "standard deviations must be >= 0");
  require(reward_sharpness > 0, "reward_sharpness must be > 0");
  require(pool_size >= batch_size, "pool_size must be >= batch_size");
  require(eval_pool_size >= 1, "eval_pool_size must be >= 1");
  require(val_pool_size >= 0, "val_pool_size must be >= 0");
  require(shortcut_onset >= 0, "shortcut_onset must be >= 0");
  require(shortcut_gain >= 0 && shortcut_cost >= 0 && memo_strength >= 0, "gains must be >= 0");
  require(memo_scale > 0, "memo_scale must be > 0");
  require(memo_susceptible_fraction >= 0 && memo_susceptible_fraction <= 1,
          "memo_susceptible_fraction must be in [0, 1]");
  require(shortcut_free_percent >= 0 && shortcut_free_percent <= 100, "shortcut_free_percent must be in [0, 100]");
  require(label_noise_percent >= 0 && label_noise_percent < 100, "label_noise_percent must be in [0, 100)");
  require(length_mean >= 1, "length_mean must be >= 1");
  require(token_evidence_fraction >= 0 && token_evidence_fraction <= 1, "token_evidence_fraction must be in [0, 1]");
  require(pre_generations >= 2, "pre_generations must be >= 2");
  for (double v : {initial_ability, ability_drift, difficulty_mean, eval_difficulty_shift, shortcut_drift,
                   shortcut_width_percent, length_hardness_slope, label_noise_difficulty_shift}) {
    require(std::isfinite(v), "parameters must be finite");
  }
}

std::optional<double> SyntheticRunConfig::planted_p() const {
  if (label_noise_percent <= 0.0) return std::nullopt;
  return (label_noise_percent + shortcut_free_percent) / 2.0;
}

SyntheticRunConfig synthetic_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synthetic config must be a JSON object");
  SyntheticRunConfig c;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    try {
#define UGCS_READ(name)                        \
  if (key == #name) {                          \
    c.name = value.get<decltype(c.name)>();    \
    known = true;                              \
  }
      UGCS_SYNTHETIC_FIELDS(UGCS_READ)
#undef UGCS_READ
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("synthetic config: bad value for '" + key + "': " + e.what());
    }
    if (!known) throw ConfigError("synthetic config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

nlohmann::json synthetic_config_to_json(const SyntheticRunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
#define UGCS_WRITE(name) j[#name] = c.name;
  UGCS_SYNTHETIC_FIELDS(UGCS_WRITE)
#undef UGCS_WRITE
  return j;
}

SyntheticRunConfig synthetic_preset(const std::string& name) {
  SyntheticRunConfig c;
  if (name == "default") return c;
  if (name == "stationary") {
    c.piecewise_stationary = true;
    c.batch_size = 64;
    c.ability_drift = 0.0;
    c.ability_noise_sd = 0.2;
    c.shortcut_gain = 0.0;
    c.shortcut_cost = 0.0;
    c.memo_strength = 0.0;
    return c;
  }
  if (name == "planted_p") {
    c.piecewise_stationary = true;
    c.batch_size = 32;
    c.ability_noise_sd = 0.05;
    c.shortcut_onset = 0;
    c.shortcut_drift = 0.003;
    c.shortcut_cost = 0.3;
    c.memo_strength = 0.0;
    c.label_noise_percent = 7.0;
    c.shortcut_free_percent = 13.0;
    c.shortcut_width_percent = 0.5;
    return c;
  }
  throw ConfigError("unknown synthetic preset '" + name + "'");
}

SyntheticRun generate_run(const SyntheticRunConfig& config) {
  config.validate();
  const auto& c = config;
  SyntheticRun run;
  run.config = c;
  run.manifest.n_per_question = c.n_per_question;
  run.manifest.batch_size = c.batch_size;
  run.manifest.total_steps = c.total_steps;
  run.manifest.save_every = c.save_every;
  run.manifest.max_response_len = c.max_response_len;
  run.manifest.checkpoint_steps = RunManifest::default_checkpoints(c.total_steps, c.save_every);

  // Item pools.
  Rng pool_rng = stream(c.seed, kPool);
  const auto P = static_cast<std::size_t>(c.pool_size);
  std::vector<double> train_d(P);
  for (auto& d : train_d) d = c.difficulty_mean + c.difficulty_sd * pool_rng.normal();
  std::vector<double> sorted_desc = train_d;
  std::sort(sorted_desc.begin(), sorted_desc.end(), std::greater<double>());

  std::vector<PoolItem> pool(P);
  for (std::size_t i = 0; i < P; ++i) {
    const double pct = percent_harder(sorted_desc, train_d[i]);
    pool[i] = {train_d[i], shortcut_weight(c, pct), pct < c.label_noise_percent};
    if (pool[i].label_noise) pool[i].difficulty += c.label_noise_difficulty_shift;
  }
  // An unreachable label cannot be learned by rote either.
  for (auto& item : pool) item.memorizable = pool_rng.bernoulli(c.memo_susceptible_fraction) && !item.label_noise;

  std::vector<PoolItem> val_pool(static_cast<std::size_t>(c.val_pool_size));
  for (auto& v : val_pool) {
    v.difficulty = c.difficulty_mean + c.difficulty_sd * pool_rng.normal();
    const double pct = percent_harder(sorted_desc, v.difficulty);
    v.shortcut_weight = shortcut_weight(c, pct);
    v.label_noise = false;
  }

  Rng eval_rng = stream(c.seed, kEval);
  std::vector<double> eval_d(static_cast<std::size_t>(c.eval_pool_size));
  for (auto& d : eval_d) d = c.difficulty_mean + c.eval_difficulty_shift + c.difficulty_sd * eval_rng.normal();

  // Latent dynamics, index 0 is the base model.
  Rng dyn = stream(c.seed, kDynamics);
  const auto E = static_cast<std::size_t>(c.total_steps);
  std::vector<double> g(E + 1), m(E + 1);
  g[0] = c.initial_ability;
  m[0] = 0.0;
  const double S = static_cast<double>(c.save_every);
  for (std::size_t t = 1; t <= E; ++t) {
    g[t] = g[t - 1];
    m[t] = m[t - 1];
    const bool active = static_cast<Step>(t) >= c.shortcut_onset;
    if (c.piecewise_stationary) {
      // Intervals are [kS, (k+1)S), aligned with the scoring windows.
      if (t != 1 && t % static_cast<std::size_t>(c.save_every) != 0) continue;
      // Levels are drawn afresh around the drift line, not walked.
      const double elapsed = static_cast<double>(t - 1);
      g[t] = c.initial_ability + c.ability_drift * elapsed + c.ability_noise_sd * std::sqrt(S) * dyn.normal();
      const double since = static_cast<double>(static_cast<Step>(t) - c.shortcut_onset);
      const double level = c.shortcut_drift * since + c.shortcut_noise_sd * std::sqrt(S) * dyn.normal();
      m[t] = active ? std::max(0.0, level) : 0.0;
    } else {
      g[t] += c.ability_drift + c.ability_noise_sd * dyn.normal();
      const double dm = c.shortcut_drift + c.shortcut_noise_sd * dyn.normal();
      if (active) m[t] = std::max(0.0, m[t] + dm);
    }
  }
  auto general = [&](std::size_t t) { return g[t] - c.shortcut_cost * m[t]; };

  const AnswerModel model(c);
  const auto B = static_cast<std::size_t>(c.batch_size);
  const auto N = c.n_per_question;

  // Training log: B distinct items per step, drawn with replacement across steps.
  Rng pick = stream(c.seed, kSampling);
  Rng ans = stream(c.seed, kAnswers);
  std::vector<std::size_t> order(P);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> visits(P, 0);
  run.train.reserve(E * B * static_cast<std::size_t>(N));
  std::vector<std::size_t> batch(B);
  for (std::size_t t = 1; t <= E; ++t) {
    for (std::size_t i = 0; i < B; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(pick.below(P - i));
      std::swap(order[i], order[j]);
      batch[i] = order[i];
    }
    for (std::size_t s : batch) {
      const double memo = !pool[s].memorizable ? 0.0 : c.memo_strength * (1.0 - std::exp(-visits[s] / c.memo_scale));
      const double ability = general(t) + pool[s].shortcut_weight * c.shortcut_gain * m[t] + memo;
      const std::string id = "q" + std::to_string(s);
      for (int k = 0; k < N; ++k) {
        const Answer a = model.draw(ans, ability, pool[s]);
        run.train.push_back(model.record(ans, a, static_cast<Step>(t), id, k));
      }
    }
    for (std::size_t s : batch) ++visits[s];
  }

  // Validation log and ground truth at each checkpoint.
  Rng val = stream(c.seed, kValidation);
  for (Step cp : run.manifest.checkpoint_steps) {
    // A piecewise checkpoint is the policy of the interval it closes.
    const std::size_t t = static_cast<std::size_t>(cp) - (c.piecewise_stationary ? 1 : 0);
    for (std::size_t v = 0; v < val_pool.size(); ++v) {
      const double ability = general(t) + val_pool[v].shortcut_weight * c.shortcut_gain * m[t];
      const std::string id = "v" + std::to_string(v);
      for (int k = 0; k < N; ++k) {
        const Answer a = model.draw(val, ability, val_pool[v]);
        run.validation.push_back(model.record(val, a, cp, id, k));
      }
    }
    double acc = 0.0;
    for (double d : eval_d) acc += sigmoid(c.reward_sharpness * (general(t) - d));
    run.truth[cp] = acc / static_cast<double>(eval_d.size());
  }

  // Static tables from the base model.
  Rng pre = stream(c.seed, kPre);
  ScoreTable pre_anll, pre_nll, pre_cons;
  std::vector<int> bits(static_cast<std::size_t>(c.pre_generations));
  for (std::size_t s = 0; s < P; ++s) {
    double sa = 0.0, sn = 0.0;
    for (auto& b : bits) {
      const Answer a = model.draw(pre, general(0), pool[s]);
      sa += a.anll;
      sn += a.anll * static_cast<double>(a.num_tokens);
      b = a.reward > 0.5 ? 1 : 0;
    }
    const std::string id = "q" + std::to_string(s);
    pre_anll[id] = sa / static_cast<double>(bits.size());
    pre_nll[id] = sn / static_cast<double>(bits.size());
    pre_cons[id] = consistency_score(bits);
  }
  run.pre_tables[MetricKind::pre_anll] = std::move(pre_anll);
  run.pre_tables[MetricKind::pre_nll] = std::move(pre_nll);
  run.pre_tables[MetricKind::pre_consistency] = std::move(pre_cons);
  return run;
}

double selection_regret(const std::map<Step, double>& truth, Step winner) {
  auto it = truth.find(winner);
  if (it == truth.end()) throw ConfigError("no ground truth for checkpoint " + std::to_string(winner));
  double best = it->second;
  for (const auto& [step, v] : truth) best = std::max(best, v);
  return best - it->second;
}

void write_run_directory(const SyntheticRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("train.jsonl");
    write_log(out, run.train);
  }
  {
    auto out = open("val.jsonl");
    write_log(out, run.validation);
  }
  save_manifest(dir / "manifest.json", run.manifest);
  save_step_table_csv(dir / "truth.csv", run.truth, "true_generalization");
  {
    auto out = open("config.json");
    out << synthetic_config_to_json(run.config).dump(2) << '\n';
  }
  for (const auto& [kind, table] : run.pre_tables) {
    const std::string name = std::string(metric_id(kind)) + ".json";
    auto out = open(name.c_str());
    save_score_table(out, table);
  }
}

std::map<Step, double> load_step_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::map<Step, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw SchemaError("expected two comma-separated columns", line_no);
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    Step step = 0;
    auto [p1, e1] = std::from_chars(a.data(), a.data() + a.size(), step);
    if (e1 != std::errc() || p1 != a.data() + a.size()) {
      if (line_no == 1) continue;  // header
      throw SchemaError("bad checkpoint step '" + a + "'", line_no);
    }
    double value = 0.0;
    auto [p2, e2] = std::from_chars(b.data(), b.data() + b.size(), value);
    if (e2 != std::errc() || p2 != b.data() + b.size() || !std::isfinite(value)) {
      throw SchemaError("bad value '" + b + "'", line_no);
    }
    if (!out.emplace(step, value).second) {
      throw DuplicateKeyError("checkpoint " + a + " listed twice", line_no);
    }
  }
  return out;
}

void save_step_table_csv(const std::filesystem::path& path, const std::map<Step, double>& table,
                         const std::string& value_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "checkpoint_step," << value_column << '\n';
  for (const auto& [step, v] : table) out << step << ',' << format_double(v) << '\n';
}

}  // namespace ugcs
