#include "brute.hpp"
#include "doctest.h"
#include "fixture.hpp"
#include "ugcs/aggregate.hpp"
#include "ugcs/errors.hpp"
#include "ugcs/scoring.hpp"

using namespace ugcs;

namespace {

AggregatedSample sample(Step step, std::string id, double difficulty, double reward) {
  return AggregatedSample{{step, std::move(id)}, reward, difficulty, 1};
}

Window whole(const std::vector<AggregatedSample>& xs, Step checkpoint = 1000) {
  return extract_window(xs, checkpoint, checkpoint);
}

std::vector<AggregatedSample> per_step(Step steps, int batch) {
  std::vector<AggregatedSample> out;
  for (Step s = 1; s <= steps; ++s) {
    for (int q = 0; q < batch; ++q) out.push_back(sample(s, "q" + std::to_string(q), 0.0, 0.0));
  }
  return out;
}

}  // namespace

TEST_SUITE("window") {
  TEST_CASE("half-open window clamped at step 1") {
    const auto xs = per_step(600, 1);
    const Window w = extract_window(xs, 100, 100);
    CHECK(w.first_step() == 1);
    CHECK(w.size() == 99);
    CHECK(w.samples.front().key.step == 1);
    CHECK(w.samples.back().key.step == 99);
    const Window v = extract_window(xs, 500, 10);
    CHECK(v.samples.front().key.step == 490);
    CHECK(v.samples.back().key.step == 499);
    CHECK(v.size() == 10);
  }

  TEST_CASE("window cardinality matches a brute-force filter") {
    const auto xs = per_step(100, 8);  // 800 samples
    for (Step cp : {1, 2, 50, 99, 100}) {
      std::size_t expect = 0;
      for (const auto& s : xs) expect += (s.key.step >= std::max<Step>(1, cp - 100) && s.key.step < cp);
      if (expect == 0) {
        CHECK_THROWS_AS(extract_window(xs, cp, 100), EmptyWindowError);
      } else {
        CHECK(extract_window(xs, cp, 100).size() == expect);
      }
    }
  }

  TEST_CASE("delta beyond the run covers the whole prefix") {
    const auto xs = per_step(300, 2);
    CHECK(extract_window(xs, 300, 5000).size() == 299 * 2);
  }
}

TEST_SUITE("top_hard") {
  TEST_CASE("k from p") {
    CHECK(top_k_count(3, 800) == 24);
    CHECK(top_k_count(100, 800) == 800);
    CHECK(top_k_count(1, 10) == 1);
    CHECK(top_k_count(34, 3) == 2);
    CHECK(top_k_count(0.001, 5) == 1);
  }

  TEST_CASE("M=800, p=3 matches a full sort") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<AggregatedSample> xs;
    for (Step s = 1; s <= 100; ++s) {
      for (int q = 0; q < 8; ++q) xs.push_back(sample(s, "q" + std::to_string(q), std::floor(u(gen) * 50), u(gen)));
    }
    const Window w = extract_window(xs, 101, 100);
    REQUIRE(w.size() == 800);
    const auto keys = select_top_hard(w, 3);
    REQUIRE(keys.size() == 24);
    std::vector<brute::Sample> b;
    for (const auto& x : xs) b.push_back({x.key.step, x.key.sample_id, x.mean_reward, x.difficulty});
    const auto sorted = brute::hardest_first(b);
    for (std::size_t i = 0; i < 24; ++i) {
      CHECK(keys[i].step == sorted[i].step);
      CHECK(keys[i].sample_id == sorted[i].id);
    }
  }

  TEST_CASE("ties break by step then sample_id") {
    const std::vector<AggregatedSample> xs{sample(1, "b", 1.0, 0), sample(1, "a", 1.0, 0), sample(2, "a", 2.0, 0),
                                           sample(3, "a", 1.0, 0)};
    std::vector<AggregatedSample> sorted = xs;
    std::sort(sorted.begin(), sorted.end(), [](auto& l, auto& r) { return l.key < r.key; });
    const auto keys = select_top_hard(whole(sorted, 4), 100);
    REQUIRE(keys.size() == 4);
    CHECK(keys[0] == SampleKey{2, "a"});
    CHECK(keys[1] == SampleKey{1, "a"});
    CHECK(keys[2] == SampleKey{1, "b"});
    CHECK(keys[3] == SampleKey{3, "a"});
  }
}

TEST_SUITE("strategies") {
  TEST_CASE("ugcs over four samples") {
    const std::vector<AggregatedSample> xs{sample(1, "a", 4.0, 0.0), sample(1, "b", 3.0, 0.25), sample(1, "c", 2.0, 1.0),
                                           sample(1, "d", 1.0, 1.0)};
    const auto s = ugcs_score(whole(xs, 2), 50);
    CHECK(s.value == 0.125);
    CHECK(s.selected_keys == std::vector<SampleKey>{{1, "a"}, {1, "b"}});
  }

  TEST_CASE("constant rewards give that reward at any p") {
    std::vector<AggregatedSample> xs;
    for (int i = 0; i < 37; ++i) xs.push_back(sample(1 + i / 8, "q" + std::to_string(i), i * 0.37, 0.375));
    std::sort(xs.begin(), xs.end(), [](auto& l, auto& r) { return l.key < r.key; });
    const Window w = whole(xs);
    for (double p : {1.0, 3.0, 10.0, 50.0, 100.0}) {
      CHECK(ugcs_score(w, p).value == 0.375);
      CHECK(top_reward_score(w, p).value == 0.375);
    }
  }

  TEST_CASE("p=100 reduces to train reward") {
    const auto f = fixture::make_fixture(4, {.min_steps = 200, .max_steps = 200});
    const auto xs = aggregate_samples(f.train, DifficultyMetric{}).samples;
    for (Step cp : f.manifest.checkpoint_steps) {
      const Window w = extract_window(xs, cp, 100);
      CHECK(ugcs_score(w, 100).value == train_reward_score(w).value);
      CHECK(top_reward_score(w, 100).value == train_reward_score(w).value);
    }
  }

  TEST_CASE("train reward") {
    CHECK(train_reward_score(whole({sample(1, "a", 0, 0.0), sample(1, "b", 0, 1.0)})).value == 0.5);
    CHECK(train_reward_score(whole({sample(1, "a", 0, 0.7)})).value == 0.7);
  }

  TEST_CASE("top reward picks the highest rewards") {
    const std::vector<AggregatedSample> xs{sample(1, "a", 0, 1.0), sample(1, "b", 0, 0.5), sample(1, "c", 0, 0.0)};
    CHECK(top_reward_score(whole(xs), 34).value == 0.75);
  }

  TEST_CASE("val reward") {
    const std::vector<AggregatedSample> val{sample(100, "v1", 0, 0.25), sample(100, "v2", 0, 0.75), sample(200, "v1", 0, 1.0)};
    CHECK(val_reward_score(val, 100).value == 0.5);
    CHECK(val_reward_score(val, 200).value == 1.0);
    CHECK_THROWS_AS(val_reward_score(val, 300), MissingValidationError);
    CHECK(validation_size(val, 100) == 2);
    CHECK(validation_size(val, 300) == 0);
  }

  TEST_CASE("last checkpoint") {
    const RunManifest m = default_manifest();
    CHECK(last_checkpoint_score(m, 1000).value == 1.0);
    CHECK(last_checkpoint_score(m, 900).value == 0.0);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate({0.0, 100}), ConfigError);
    CHECK_THROWS_AS(validate({100.5, 100}), ConfigError);
    CHECK_THROWS_AS(validate({10, 0}), ConfigError);
    CHECK_THROWS_AS(validate({std::nan(""), 10}), ConfigError);
    CHECK_NOTHROW(validate({100, 1}));
  }

  TEST_CASE("strategy ids") {
    for (Strategy s : kAllStrategies) CHECK(parse_strategy(strategy_id(s)) == s);
    CHECK_FALSE(parse_strategy("best"));
  }

  TEST_CASE("fixture scores match the brute-force reference") {
    const auto f = fixture::make_fixture(11, {.min_steps = 400, .max_steps = 400});
    const auto xs = aggregate_samples(f.train, DifficultyMetric{}).samples;
    const auto val = aggregate_samples(f.validation, DifficultyMetric{}).samples;
    const auto bx = brute::group(f.train);
    const auto bv = brute::group(f.validation);
    const ScoringInputs in{xs, val, &f.manifest};
    for (Step cp : f.manifest.checkpoint_steps) {
      for (Step delta : {10, 100}) {
        const auto bw = brute::window(bx, cp, delta);
        for (double p : {1.0, 3.0, 10.0, 50.0}) {
          CHECK(score_checkpoint(Strategy::ugcs, in, cp, {p, delta}).value ==
                doctest::Approx(brute::ugcs(bw, p)).epsilon(1e-12));
          CHECK(score_checkpoint(Strategy::top_reward, in, cp, {p, delta}).value ==
                doctest::Approx(brute::top_reward(bw, p)).epsilon(1e-12));
        }
        CHECK(score_checkpoint(Strategy::train_reward, in, cp, {10, delta}).value ==
              doctest::Approx(brute::train_reward(bw)).epsilon(1e-12));
      }
      CHECK(score_checkpoint(Strategy::val_reward, in, cp, {}).value ==
            doctest::Approx(brute::val_reward(bv, cp)).epsilon(1e-12));
    }
  }
}
