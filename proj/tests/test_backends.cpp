#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "coevo/challenger_reward.hpp"
#include "coevo/curation.hpp"
#include "coevo/prompts.hpp"
#include "coevo/toy_world.hpp"

using namespace coevo;

TEST_CASE("solver prompt template is exact") {
  auto p = render_prompts(Role::solver, std::string("2+2?"));
  CHECK(p.system ==
        "Please reason step by step, and put your final answer within \\boxed{}.");
  CHECK(p.user == "2+2?");
}

TEST_CASE("challenger prompt template is exact") {
  auto p = render_prompts(Role::challenger);
  CHECK(p.user ==
        "Generate one new, challenging reasoning question now. Remember to format the "
        "output exactly as instructed.");
  CHECK(p.system.starts_with("You are an expert competition-math problem setter."));
  CHECK(p.system.find("<question>") != std::string::npos);
  CHECK(p.system.find("\\boxed{final_answer}") != std::string::npos);
  CHECK(p.system.ends_with("no extra markup."));
}

TEST_CASE("prompt preconditions") {
  CHECK_THROWS_AS(render_prompts(Role::solver), InvalidInputError);
  CHECK_THROWS_AS(render_prompts(Role::solver, std::string("")), InvalidInputError);
  CHECK_THROWS_AS(render_prompts(Role::challenger, std::string("oops")), InvalidInputError);
}

namespace {

ToyWorld standard_world() {
  ToyWorldConfig cfg;
  cfg.difficulty_levels = 4;
  return ToyWorld(cfg);
}

}  // namespace

TEST_CASE("toy questions are format-valid and parse back") {
  auto world = standard_world();
  Rng rng(1);
  for (int level = 0; level < world.levels(); ++level) {
    auto q = world.make_question(level, rng.derive(static_cast<uint64_t>(level)));
    auto raw = world.render_generation(q);
    auto format = check_format(raw);
    CHECK(format.ok);
    CHECK(format.question_text == q.text);
    REQUIRE(format.self_answer.has_value());
    CHECK(*format.self_answer == world.oracle_answer(q));
    auto parsed = world.parse_question(format.question_text);
    REQUIRE(parsed.has_value());
    CHECK(parsed->level == q.level);
    CHECK(parsed->a == q.a);
    CHECK(parsed->b == q.b);
  }
  CHECK_FALSE(world.parse_question("not a toy question").has_value());
  CHECK_FALSE(world.parse_question("Level 99: what is 1 plus 1?").has_value());
}

TEST_CASE("toy distractors are wrong and the oracle is unique") {
  ToyWorldConfig cfg;
  cfg.difficulty_levels = 5;
  cfg.shared_from_level = 2;
  cfg.sharing_fraction = 0.75;
  ToyWorld world(cfg);
  Rng rng(2);
  for (int level = 0; level < world.levels(); ++level) {
    for (int trial = 0; trial < 10; ++trial) {
      auto q = world.make_question(level, rng.derive(static_cast<uint64_t>(level * 100 + trial)));
      std::string oracle = world.oracle_answer(q);
      CHECK(world.procedure_answer(q, 0) == oracle);
      for (int k = 1; k < world.procedure_count(level); ++k)
        CHECK(world.procedure_answer(q, k) != oracle);
    }
  }
  // levels below shared_from_level have no shared distractors
  CHECK(world.shared_distractors(0) == 0);
  CHECK(world.shared_distractors(1) == 0);
  CHECK(world.shared_distractors(4) > 0);
}

TEST_CASE("toy sampling determinism: same seed, same output") {
  auto world = standard_world();
  auto challenger = world.initial_challenger_policy();
  auto solver = world.initial_solver_policy();
  Rng rng(77);

  auto a = toy_sample_questions(world, challenger, 50, rng);
  auto b = toy_sample_questions(world, challenger, 50, rng);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].raw == b[i].raw);
    CHECK(a[i].action_path == b[i].action_path);
    CHECK(a[i].logprob == b[i].logprob);
  }

  auto q = check_format(a[0].raw).question_text;
  auto x = toy_sample_answers(world, solver, q, 20, rng.derive("ans"));
  auto y = toy_sample_answers(world, solver, q, 20, rng.derive("ans"));
  for (size_t i = 0; i < x.size(); ++i) CHECK(x[i].text == y[i].text);
}

TEST_CASE("toy sampling honors the requested counts") {
  auto world = standard_world();
  auto challenger = world.initial_challenger_policy();
  auto solver = world.initial_solver_policy();
  Rng rng(5);
  for (int n : {0, 1, 7, 40}) {
    CHECK(toy_sample_questions(world, challenger, n, rng).size() == static_cast<size_t>(n));
    auto q = world.make_question(1, rng.derive("q"));
    CHECK(toy_sample_answers(world, solver, q.text, n, rng).size() == static_cast<size_t>(n));
  }
}

TEST_CASE("uniform challenger covers levels within binomial bounds") {
  auto world = standard_world();
  auto challenger = world.initial_challenger_policy();  // uniform over 4 levels
  Rng rng(123);
  const int n = 4000;
  auto gens = toy_sample_questions(world, challenger, n, rng);
  std::vector<int> counts(world.levels(), 0);
  for (const auto& g : gens) ++counts[g.action_path.front().action];
  double expect = n / 4.0;
  double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - expect) <= 3.0 * sigma);
}

TEST_CASE("one-hot challenger saturates a single level") {
  auto world = standard_world();
  CategoricalPolicy p;
  std::vector<double> logits(world.levels(), 0.0);
  logits[2] = 20.0;
  p.add_state(ToyWorld::kChallengerState, logits);
  Rng rng(9);
  for (const auto& g : toy_sample_questions(world, p, 200, rng))
    CHECK(g.action_path.front().action == 2);
}

TEST_CASE("toy solver with forced accuracy: all answers equal the oracle") {
  auto world = standard_world();
  std::vector<double> accs{0.999999, 0.999999, 0.999999, 0.999999};
  auto solver = world.solver_policy_with_accuracies(accs);
  Rng rng(31);
  auto q = world.make_question(2, rng.derive("q"));
  auto answers = toy_sample_answers(world, solver, q.text, 12, rng);
  std::string boxed_oracle = "\\boxed{" + world.oracle_answer(q) + "}";
  for (const auto& a : answers) CHECK(a.text == boxed_oracle);
  std::vector<std::string> texts;
  for (const auto& a : answers) texts.push_back(a.text);
  CHECK(majority_vote(texts, 12).p_hat == 1.0);
}

TEST_CASE("empirical accuracy converges to the policy's correct probability") {
  auto world = standard_world();
  Rng seed_battery(2025);
  const int m = 10000;
  for (int s = 0; s < 20; ++s) {
    Rng t = seed_battery.derive(static_cast<uint64_t>(s));
    double target = 0.5;
    std::vector<double> accs(world.levels(), target);
    auto solver = world.solver_policy_with_accuracies(accs);
    auto q = world.make_question(1, t.derive("q"));
    auto answers = toy_sample_answers(world, solver, q.text, m, t.derive("a"));
    int correct = 0;
    std::string oracle = world.oracle_answer(q);
    for (const auto& a : answers)
      if (normalize_answer(a.text).canonical == oracle) ++correct;
    double p_emp = static_cast<double>(correct) / m;
    CHECK(std::abs(p_emp - target) <= 0.02);
  }
}

TEST_CASE("solver accuracy decreases with level for the initial policy") {
  ToyWorldConfig cfg;
  cfg.difficulty_levels = 6;
  ToyWorld world(cfg);
  auto accs = world.solver_accuracy_per_level(world.initial_solver_policy());
  for (size_t i = 1; i < accs.size(); ++i) CHECK(accs[i] < accs[i - 1]);
  // ln 4 bias: level 0 has 2 procedures -> 4/(4+1) = 0.8
  CHECK(accs[0] == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("solver_policy_with_accuracies hits the requested accuracies") {
  ToyWorldConfig cfg;
  cfg.difficulty_levels = 7;
  ToyWorld world(cfg);
  std::vector<double> want{0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95};
  auto got = world.solver_accuracy_per_level(world.solver_policy_with_accuracies(want));
  for (size_t i = 0; i < want.size(); ++i)
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-6));
}

TEST_CASE("backend interface contract: counts returned == counts requested") {
  auto world = standard_world();
  auto challenger = world.initial_challenger_policy();
  auto solver = world.initial_solver_policy();
  ToyGeneratorBackend gen(world, &challenger);
  ToySolverBackend sol(world, &solver);
  CHECK(gen.trainable());
  CHECK(sol.trainable());
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    Rng t = rng.derive(static_cast<uint64_t>(trial));
    int n = static_cast<int>(t.next_int(1, 64));
    auto gens = gen.sample_questions(n, t.derive("g"));
    CHECK(gens.size() == static_cast<size_t>(n));
    auto question = check_format(gens[0].raw).question_text;
    int m = static_cast<int>(t.next_int(1, 32));
    CHECK(sol.sample_answers(question, m, t.derive("s")).size() == static_cast<size_t>(m));
  }
}

TEST_CASE("toy solver rejects unknown questions") {
  auto world = standard_world();
  auto solver = world.initial_solver_policy();
  Rng rng(3);
  CHECK_THROWS_AS(toy_sample_answers(world, solver, "What is love?", 3, rng),
                  InvalidInputError);
}
