#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coevo/challenger_reward.hpp"
#include "coevo/rng.hpp"

using namespace coevo;

TEST_CASE("check_format accepts the well-formed template") {
  auto r = check_format("<question>What is 2+2?</question>\n\\boxed{4}");
  CHECK(r.ok);
  CHECK(r.question_text == "What is 2+2?");
  REQUIRE(r.self_answer.has_value());
  CHECK(*r.self_answer == "4");
}

TEST_CASE("check_format rejects missing and duplicated blocks") {
  CHECK_FALSE(check_format("What is 2+2?").ok);
  CHECK_FALSE(check_format("<question>a</question><question>b</question>").ok);
  CHECK_FALSE(check_format("<question>only opened").ok);
  CHECK_FALSE(check_format("never opened</question>").ok);
  CHECK_FALSE(check_format("</question>backwards<question>").ok);
  CHECK_FALSE(check_format("<question>   \n </question>\\boxed{1}").ok);
  CHECK_FALSE(check_format("").ok);
}

TEST_CASE("check_format details") {
  SUBCASE("self answer is optional") {
    auto r = check_format("<question>Find x.</question>");
    CHECK(r.ok);
    CHECK_FALSE(r.self_answer.has_value());
  }
  SUBCASE("interior is trimmed, inner content preserved") {
    auto r = check_format("<question>\n  Compute 3*3.  \n</question>\n\\boxed{9}");
    CHECK(r.ok);
    CHECK(r.question_text == "Compute 3*3.");
  }
  SUBCASE("boxed inside the question is not a self answer") {
    auto r = check_format("<question>Show \\boxed{x}=1.</question>");
    CHECK(r.ok);
    CHECK_FALSE(r.self_answer.has_value());
  }
  SUBCASE("nested braces in the self answer survive") {
    auto r = check_format("<question>Simplify.</question>\n\\boxed{\\frac{1}{2}}");
    CHECK(r.ok);
    CHECK(*r.self_answer == "\\frac{1}{2}");
  }
}

TEST_CASE("uncertainty_reward formula") {
  CHECK(uncertainty_reward(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uncertainty_reward(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(uncertainty_reward(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(uncertainty_reward(0.3) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_THROWS_AS(uncertainty_reward(-0.01), InvalidInputError);
  CHECK_THROWS_AS(uncertainty_reward(1.01), InvalidInputError);
}

TEST_CASE("uncertainty_reward is symmetric about one half") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    double p = rng.next_double();
    CHECK(std::abs(uncertainty_reward(p) - uncertainty_reward(1.0 - p)) <= 1e-12);
  }
}

TEST_CASE("uncertainty_reward grid argmax sits nearest one half") {
  // the testable face of the variance bound: p(1-p) and this reward share
  // their argmax at 1/2
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  double best = -1.0;
  size_t best_idx = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    double u = uncertainty_reward(grid[i]);
    if (u > best) {
      best = u;
      best_idx = i;
    }
  }
  CHECK(grid[best_idx] == 0.5);
  // unique maximum on this grid
  for (size_t i = 0; i < grid.size(); ++i)
    if (i != best_idx) CHECK(uncertainty_reward(grid[i]) < best);
}

TEST_CASE("uncertainty_reward orders like bernoulli variance on the grid") {
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      double pa = a / 10.0, pb = b / 10.0;
      double va = pa * (1 - pa), vb = pb * (1 - pb);
      double ua = uncertainty_reward(pa), ub = uncertainty_reward(pb);
      if (va < vb) CHECK(ua < ub);
      if (va > vb) CHECK(ua > ub);
      if (va == vb) CHECK(ua == doctest::Approx(ub).epsilon(1e-12));
    }
  }
}

TEST_CASE("repetition_penalty arithmetic") {
  SUBCASE("cluster sizes 2,1,1 at B=4") {
    ClusterAssignment a;
    a.labels = {1, 1, 2, 3};
    a.cluster_sizes = {{1, 2}, {2, 1}, {3, 1}};
    auto p = repetition_penalty(a, 1.0, 4);
    CHECK(p == std::vector<double>{0.5, 0.5, 0.25, 0.25});
  }
  SUBCASE("all singletons at B=8") {
    ClusterAssignment a;
    for (int i = 0; i < 8; ++i) {
      a.labels.push_back(i + 1);
      a.cluster_sizes[i + 1] = 1;
    }
    auto p = repetition_penalty(a, 1.0, 8);
    for (double x : p) CHECK(x == doctest::Approx(0.125).epsilon(1e-12));
  }
  SUBCASE("lambda zero") {
    ClusterAssignment a;
    a.labels = {1, 1};
    a.cluster_sizes = {{1, 2}};
    auto p = repetition_penalty(a, 0.0, 2);
    CHECK(p == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("size mismatch rejected") {
    ClusterAssignment a;
    a.labels = {1};
    a.cluster_sizes = {{1, 1}};
    CHECK_THROWS_AS(repetition_penalty(a, 1.0, 2), InvalidInputError);
  }
}

TEST_CASE("composite_reward") {
  CHECK(composite_reward(true, 0.6, 0.25) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(composite_reward(true, 0.1, 0.5) == 0.0);
  CHECK(composite_reward(false, 1.0, 0.0) == 0.0);
}

namespace {

std::string wrap(const std::string& q) { return "<question>" + q + "</question>"; }

}  // namespace

TEST_CASE("score_batch: identical questions saturate the penalty") {
  std::vector<std::string> raws(4, wrap("What is 2+2?"));
  std::vector<std::optional<double>> accs(4, 0.5);
  auto out = score_batch(raws, accs, 1.0, 0.5);
  REQUIRE(out.size() == 4);
  for (const auto& b : out) {
    CHECK(b.format_ok);
    CHECK(b.r_uncertainty == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.r_rep == doctest::Approx(1.0).epsilon(1e-12));  // |C|=B=4
    CHECK(b.composite == 0.0);
  }
}

TEST_CASE("score_batch: dissimilar pair keeps singleton penalties") {
  std::vector<std::string> raws{wrap("What is 2+2?"),
                                wrap("Evaluate the integral of cos over zero to pi.")};
  std::vector<std::optional<double>> accs{0.5, 0.9};
  auto out = score_batch(raws, accs, 1.0, 0.5);
  REQUIRE(out.size() == 2);
  CHECK(out[0].r_rep == doctest::Approx(0.5).epsilon(1e-12));  // singleton, B=2
  CHECK(out[1].r_rep == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out[0].composite == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out[1].composite == 0.0);  // max(0, 0.2 - 0.5)
}

TEST_CASE("score_batch: single malformed generation") {
  auto out = score_batch({"no tags here"}, {std::nullopt}, 1.0, 0.5);
  REQUIRE(out.size() == 1);
  CHECK_FALSE(out[0].format_ok);
  CHECK(out[0].composite == 0.0);
}

TEST_CASE("score_batch: malformed items do not influence valid clustering") {
  // two identical valid questions + junk between them; valid subset B=2
  std::vector<std::string> raws{wrap("Count to ten."), "garbage", wrap("Count to ten.")};
  std::vector<std::optional<double>> accs{0.5, std::nullopt, 0.5};
  auto out = score_batch(raws, accs, 1.0, 0.5);
  CHECK(out[0].r_rep == doctest::Approx(1.0).epsilon(1e-12));  // cluster of 2, B=2
  CHECK(out[2].r_rep == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(out[1].format_ok);
  // output order matches input order
  CHECK(out[0].format_ok);
  CHECK(out[2].format_ok);
}

TEST_CASE("score_batch: wiring violations throw") {
  CHECK_THROWS_AS(score_batch({wrap("q")}, {std::nullopt}, 1.0, 0.5), PipelineError);
  CHECK_THROWS_AS(score_batch({"junk"}, {0.5}, 1.0, 0.5), PipelineError);
  CHECK_THROWS_AS(score_batch({wrap("q"), wrap("r")}, {0.5}, 1.0, 0.5), PipelineError);
}

TEST_CASE("score_batch composites stay in [0,1]") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Rng t = rng.derive(static_cast<uint64_t>(trial));
    int n = static_cast<int>(t.next_int(1, 12));
    std::vector<std::string> raws;
    std::vector<std::optional<double>> accs;
    for (int i = 0; i < n; ++i) {
      if (t.next_double() < 0.25) {
        raws.push_back("malformed " + std::to_string(i));
        accs.push_back(std::nullopt);
      } else {
        raws.push_back(wrap("question variant " + std::to_string(t.next_int(0, 3))));
        accs.push_back(t.next_double());
      }
    }
    for (const auto& b : score_batch(raws, accs, 1.0, 0.5)) {
      CHECK(b.composite >= 0.0);
      CHECK(b.composite <= 1.0);
      if (!b.format_ok) CHECK(b.composite == 0.0);
    }
  }
}
