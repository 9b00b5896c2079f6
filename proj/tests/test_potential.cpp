#include "dalpha/diagnostics.hpp"
#include "dalpha/instances.hpp"
#include "dalpha/potential.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dalpha;
using dalpha::testing::random_labeled;

namespace {

Dataset points2d(std::initializer_list<std::pair<double, double>> xy, std::vector<int> labels) {
  PointMatrix p(static_cast<Index>(xy.size()), 2);
  Index i = 0;
  for (const auto& [x, y] : xy) {
    p(i, 0) = x;
    p(i++, 1) = y;
  }
  return Dataset(std::move(p), std::move(labels));
}

SeedingTrace trace_of(const Dataset& ds, std::vector<Index> points) {
  SeedingTrace t;
  for (Index p : points) t.steps.push_back({p, ds.label(p), false});
  return t;
}

const ClassState& by_i(const PotentialState& s, int i) {
  for (const auto& c : s.classes)
    if (c.i == i) return c;
  throw std::out_of_range("no class");
}

}  // namespace

TEST(InitState, Examples) {
  const Dataset ds = random_labeled(1, 4, 40, 2, 20.0, 10);
  const PotentialState s = init_state(ds, 4.0);
  EXPECT_EQ(s.phi_total, 0.0);
  ASSERT_EQ(s.classes.size(), 1u);
  EXPECT_EQ(s.classes[0].undiscovered.size(), 4u);

  const Dataset two = points2d({{0, 0}, {0, 1}, {5, 0}, {5, 1}, {5, 2}, {5, 3}, {5, 4}}, {0, 0, 1, 1, 1, 1, 1});
  const PotentialState t = init_state(two, 3.0);
  ASSERT_EQ(t.classes.size(), 2u);
  EXPECT_EQ(by_i(t, 1).undiscovered, (std::vector<int>{0}));
  EXPECT_EQ(by_i(t, 2).undiscovered, (std::vector<int>{1}));
  for (const auto& c : t.classes) {
    EXPECT_EQ(c.tau, 0);
    EXPECT_EQ(c.w, 0);
  }
  EXPECT_THROW(init_state(two, 1.0), UsageError);
}

TEST(Advance, HandSimulatedCounterTable) {
  // Cluster sizes 2, 2, 4: classes i=1 {0, 1} and i=2 {2}.
  const Dataset ds = points2d({{0, 0}, {0, 1}, {10, 0}, {10, 1}, {20, 0}, {20, 1}, {21, 0}, {21, 1}},
                              {0, 0, 1, 1, 2, 2, 2, 2});
  const double alpha = 4.0;
  const auto states = replay(ds, trace_of(ds, {0, 1, 4, 5}), alpha);
  struct Row {
    Index tau1, w1, tau2, w2;
    std::size_t u1, u2;
  };
  const Row expect[] = {{1, 0, 0, 0, 1, 1}, {2, 1, 1, 1, 1, 1}, {2, 1, 1, 1, 1, 0}, {2, 1, 1, 1, 1, 0}};
  for (std::size_t t = 0; t < 4; ++t) {
    const auto& c1 = by_i(states[t], 1);
    const auto& c2 = by_i(states[t], 2);
    EXPECT_EQ(c1.tau, expect[t].tau1) << t;
    EXPECT_EQ(c1.w, expect[t].w1) << t;
    EXPECT_EQ(c2.tau, expect[t].tau2) << t;
    EXPECT_EQ(c2.w, expect[t].w2) << t;
    EXPECT_EQ(c1.undiscovered.size(), expect[t].u1) << t;
    EXPECT_EQ(c2.undiscovered.size(), expect[t].u2) << t;
    check_counters(states[t]);
  }
  // phi_1 after step 2: w=1, U={1}, cost of cluster 1 about centers {(0,0),(0,1)}.
  const double d0 = 100.0, d1 = 100.0;  // (10,0) -> (0,0), (10,1) -> (0,1)
  const double root = std::sqrt(d0 * d0 + d1 * d1);
  EXPECT_NEAR(by_i(states[1], 1).phi, std::pow(2.0, 0.5) * root, 1e-12 * root);
  EXPECT_EQ(by_i(states[2], 2).phi, 0.0);
  EXPECT_EQ(by_i(states[3], 2).phi, 0.0);
}

TEST(Advance, FirstCenterLeavesWeightsZero) {
  const Dataset ds = random_labeled(2, 5, 100, 2);
  for (Index p = 0; p < 10; ++p) {
    const auto states = replay(ds, trace_of(ds, {p}), 5.0);
    for (const auto& c : states[0].classes) EXPECT_EQ(c.w, 0);
    EXPECT_EQ(states[0].phi_total, 0.0);
  }
}

TEST(Advance, ContradictoryStateIsInvariantError) {
  const Dataset ds = points2d({{0, 0}, {1, 0}}, {0, 1});
  PotentialState s = init_state(ds, 4.0);
  s.hit[0] = 1;
  EXPECT_THROW(advance(s, 0, {0.0, 1.0}), InvariantError);
  EXPECT_THROW(advance(s, 7, {0.0, 1.0}), UsageError);
}

TEST(VerifyRun, AllDiscoveredAndAdversarialTraces) {
  const Dataset ds = random_labeled(3, 6, 120, 2, 50.0);
  // One center in every cluster.
  std::vector<Index> cover;
  for (const auto& m : ds.members()) cover.push_back(m[0]);
  const LemmaReport a = verify_run(ds, trace_of(ds, cover), 4.0);
  EXPECT_EQ(a.violations(), 0);

  // Every center in cluster 0.
  std::vector<Index> same(ds.members()[0].begin(), ds.members()[0].begin() + 6);
  const SeedingTrace t = trace_of(ds, same);
  const LemmaReport b = verify_run(ds, t, 4.0);
  EXPECT_EQ(b.violations(), 0);
  const auto states = replay(ds, t, 4.0);
  for (const auto& c : states.back().classes) {
    EXPECT_EQ(c.tau, c.k_i);
    EXPECT_GE(c.w, static_cast<Index>(c.undiscovered.size()));
  }
}

TEST(VerifyRun, Errors) {
  const Dataset ds = random_labeled(4, 3, 30, 2);
  EXPECT_THROW(verify_run(ds, trace_of(ds, {0, 1}), 4.0), UsageError);
  SeedingTrace bad = trace_of(ds, {0, 1, 2});
  bad.steps[1].cluster = (bad.steps[1].cluster + 1) % 3;
  EXPECT_THROW(verify_run(ds, bad, 4.0), UsageError);
}

TEST(VerifyRun, RandomGaussianRunsHaveNoViolations) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const int k = 2 + static_cast<int>(s % 9);
    const Dataset ds = random_labeled(s, k, 40 + static_cast<Index>(s * 7), 2, 15.0, 1);
    Philox rng(s);
    for (double alpha : {3.0, 4.0, 8.0}) {
      const SeedingResult r = dalpha_seed(ds, k, alpha, rng);
      const LemmaReport rep = verify_run(ds, r.trace, alpha);
      ASSERT_EQ(rep.violations(), 0) << to_json(rep).dump();
      for (const auto& st : replay(ds, r.trace, alpha)) check_counters(st);
    }
  }
}

TEST(ExpectedDecrease, SingleUndiscoveredClusterDropsToZero) {
  const Dataset ds = points2d({{0, 0}, {0, 1}, {7, 0}, {7, 2}}, {0, 0, 1, 1});
  const double alpha = 4.0;
  const auto states = replay(ds, trace_of(ds, {0, 1}), alpha);
  const PotentialState& s = states.back();
  ASSERT_EQ(by_i(s, 1).w, 1);
  ASSERT_GT(s.phi_total, 0.0);
  const ExpectedChange e = expected_decrease_check(ds, make_center_set(ds, std::vector<Index>{0, 1}), s, 1);
  EXPECT_NEAR(e.max_change, -s.phi_total, 1e-12 * s.phi_total);
  EXPECT_LT(e.max_change, 0.0);
}

TEST(ExpectedDecrease, SymmetricPairClosedForm) {
  // Clusters {p0, p1} (class 1) and singletons p2, p3 (class 0) on either side of p0.
  const Dataset ds = points2d({{0, 0}, {0, 1}, {5, 0}, {-5, 0}}, {0, 0, 1, 2});
  const auto states = replay(ds, trace_of(ds, {0, 1}), 4.0);
  const PotentialState& s = states.back();
  const ClassState& c0 = by_i(s, 0);
  ASSERT_EQ(c0.w, 1);
  ASSERT_EQ(c0.undiscovered.size(), 2u);
  // phi_0 = (1/2) (25 + 25); either draw leaves one singleton at cost 25 with w = 1.
  EXPECT_DOUBLE_EQ(c0.phi, 25.0);
  const ExpectedChange e = expected_decrease_check(ds, make_center_set(ds, std::vector<Index>{0, 1}), s, 0);
  EXPECT_EQ(e.per_class.size(), 2u);
  EXPECT_NEAR(e.max_change, 0.0, 1e-12);
  EXPECT_THROW(expected_decrease_check(ds, make_center_set(ds, std::vector<Index>{0, 1}), s, 5), UsageError);
}

TEST(ExpectedDecrease, RandomMidRunStates) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int k = 3 + static_cast<int>(s % 6);
    const Dataset ds = random_labeled(s + 500, k, 60 + static_cast<Index>(s * 5), 2, 12.0, 1);
    Philox rng(s);
    const double alpha = s % 2 ? 3.0 : 6.0;
    const SeedingResult r = dalpha_seed(ds, k, alpha, rng);
    const auto states = replay(ds, r.trace, alpha);
    const auto pts = r.trace.points();
    for (std::size_t t = 1; t < pts.size(); ++t) {
      const CenterSet cs = make_center_set(ds, std::span<const Index>(pts.data(), t));
      for (const auto& c : states[t - 1].classes) {
        if (c.undiscovered.empty()) continue;
        const ExpectedChange e = expected_decrease_check(ds, cs, states[t - 1], c.i);
        EXPECT_LE(e.max_change, 1e-9 * std::abs(e.phi_before));
      }
    }
  }
}

TEST(HitCost, Examples) {
  const double alpha = 4.0;
  // Cluster 1 at a single location.
  const Dataset same = points2d({{0, 0}, {9, 9}, {9, 9}}, {0, 1, 1});
  const HitCheck h0 = hit_cost_check(same, make_center_set(same, std::vector<Index>{0}), 1, alpha);
  EXPECT_EQ(h0.lhs, 0.0);
  EXPECT_TRUE(h0.holds());

  // Two points at distance 2, far from and symmetric about the only center.
  const Dataset pair = points2d({{0, 0}, {100, -1}, {100, 1}}, {0, 1, 1});
  const HitCheck h = hit_cost_check(pair, make_center_set(pair, std::vector<Index>{0}), 1, alpha);
  EXPECT_DOUBLE_EQ(h.lhs, 4.0);
  EXPECT_NEAR(h.rhs, (4 * std::exp(1.0) + 25 * std::sqrt(8.0)) * 2.0, 1e-12);
  EXPECT_TRUE(h.holds());

  const HitCheck deg = hit_cost_check(pair, make_center_set(pair, std::vector<Index>{1, 2}), 1, alpha);
  EXPECT_TRUE(deg.degenerate);
  EXPECT_TRUE(deg.holds());
}

TEST(AlphaHitCost, Examples) {
  const Dataset single = points2d({{0, 0}, {3, 0}}, {0, 1});
  const auto [s0, u0] = alpha_hit_cost_checks(single, make_center_set(single, std::vector<Index>{0}), 1, 4.0);
  EXPECT_EQ(s0.lhs, 0.0);
  EXPECT_EQ(s0.rhs, 0.0);
  EXPECT_EQ(u0.lhs, 0.0);
  EXPECT_EQ(u0.rhs, 0.0);

  // In units of |x - y|^alpha: uniform E = 1 against 2^alpha * 2 * (1/2)^alpha = 2.
  const Dataset pair = points2d({{0, 0}, {1000, -1}, {1000, 1}}, {0, 1, 1});
  for (double alpha : {3.0, 4.0, 10.0}) {
    const auto [s, u] = alpha_hit_cost_checks(pair, make_center_set(pair, std::vector<Index>{0}), 1, alpha);
    EXPECT_DOUBLE_EQ(u.lhs, 1.0);
    EXPECT_DOUBLE_EQ(u.rhs, 2.0);
    EXPECT_DOUBLE_EQ(s.lhs, 1.0);
    EXPECT_DOUBLE_EQ(s.rhs, std::pow(2.0, alpha + 1));
    EXPECT_TRUE(s.holds());
    EXPECT_TRUE(u.holds());
  }
}

TEST(HitCost, RandomTriples) {
  Index checked = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    const int k = 3 + static_cast<int>(s % 5);
    const Dataset ds = random_labeled(s + 900, k, 50 + static_cast<Index>(s), 1 + static_cast<Index>(s % 3), 10.0);
    Philox rng(s);
    const double alpha = 2.5 + static_cast<double>(s % 7);
    const SeedingResult r = dalpha_seed(ds, k, alpha, rng);
    const auto pts = r.trace.points();
    const std::size_t t = 1 + rng.uniform_index(pts.size() - 1);
    const CenterSet cs = make_center_set(ds, std::span<const Index>(pts.data(), t));
    for (int c = 0; c < k; ++c) {
      const HitCheck h = hit_cost_check(ds, cs, c, alpha);
      EXPECT_TRUE(h.holds()) << h.lhs << " " << h.rhs;
      const auto [sa, un] = alpha_hit_cost_checks(ds, cs, c, alpha);
      EXPECT_TRUE(sa.holds()) << sa.lhs << " " << sa.rhs;
      EXPECT_TRUE(un.holds()) << un.lhs << " " << un.rhs;
      ++checked;
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(LemmaStat, SlackAndViolations) {
  LemmaStat s{"x"};
  s.record(1.0, 2.0);
  EXPECT_DOUBLE_EQ(s.max_slack, -0.5);
  s.record(2.0, 2.0 - 1e-12);
  EXPECT_EQ(s.violations, 0);
  s.record(3.0, 2.0);
  EXPECT_EQ(s.violations, 1);
  EXPECT_EQ(s.checked, 3);
  s.record_scaled(1.0, 0.0, 0.0);
  EXPECT_TRUE(std::isinf(s.max_slack));
  EXPECT_EQ(s.violations, 2);

  LemmaReport r;
  r.get("a").record(0, 1);
  LemmaReport o;
  o.get("a").record(2, 1);
  o.get("b").record(0, 1);
  r.merge(o);
  EXPECT_EQ(r.violations(), 1);
  const auto j = to_json(r);
  EXPECT_EQ(j["lemmas"][0]["name"], "a");
  EXPECT_EQ(j["lemmas"][0]["checked"], 2);
  EXPECT_EQ(j["violations"], 1);
}

TEST(LemmaSuite, GaussianMixtureIsClean) {
  const Dataset ds = gen_gaussian_mixture(preset_components("D1"), 400, 3);
  LemmaSuiteOptions opt;
  opt.runs = 20;
  opt.seed = 1;
  LemmaReport r = run_lemma_suite(ds, 4.0, opt);
  EXPECT_EQ(r.violations(), 0) << to_json(r).dump(1);
  EXPECT_EQ(r.lemmas.size(), 8u);
  for (const char* name : {lemma::kTries, lemma::kPotential, lemma::kCounters, lemma::kNewCluster, lemma::kHitCost,
                           lemma::kHitAlphaDalpha, lemma::kHitAlphaUniform, lemma::kCentroidAlpha})
    EXPECT_GT(r.get(name).checked, 0) << name;
}
