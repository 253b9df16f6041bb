#include <catch2/catch_amalgamated.hpp>

#include <covertsense/discriminate.hpp>
#include <covertsense/scenario_io.hpp>

#include <map>

using namespace covertsense;

namespace {

CMat diag2(double a, double b) {
  CMat m(2, 2);
  m.setZero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

CMat pure_qubit(double angle) {
  CVec v(2);
  v << std::cos(angle), std::sin(angle);
  return v * v.adjoint();
}

// scenario whose probe outputs are nearly orthogonal, so the multi-state
// bound drops below one at short block lengths
CqScenario make_sharp() {
  CqScenario s;
  s.params = {"t0", "t1"};
  s.alphabet = {"idle", "probe"};
  s.innocent = 0;
  auto D = [](const CMat& m) { return DensityOperator(m); };
  s.bob = {{D(diag2(0.5, 0.5)), D(diag2(0.999, 0.001))},
           {D(diag2(0.5, 0.5)), D(diag2(0.001, 0.999))}};
  s.willie = {{D(diag2(0.6, 0.4)), D(diag2(0.55, 0.45))},
              {D(diag2(0.6, 0.4)), D(diag2(0.55, 0.45))}};
  return s;
}

}  // namespace

TEST_CASE("binary optimal error matches the pure-state closed form", "[discriminate]") {
  // the closed form bounds the equal-prior average error, so compare averages;
  // the reported headline number is the max over parameter values
  auto g = task_engine(0xD15C, 1);
  for (int rep = 0; rep < 200; ++rep) {
    double a1 = draw_unit(g) * M_PI, a2 = draw_unit(g) * M_PI;
    CMat r0 = pure_qubit(a1), r1 = pure_qubit(a2);
    double c = std::abs(std::cos(a1 - a2));  // overlap of the two kets
    double want = 0.5 * (1.0 - std::sqrt(1.0 - c * c));
    auto r = helstrom(r0, r1);
    double avg = 0.5 * (r.per_param_error[0] + r.per_param_error[1]);
    REQUIRE(avg == Catch::Approx(want).margin(1e-10));
    REQUIRE(r.error >= avg - 1e-12);
    // the reported measurement reproduces the reported per-parameter errors
    validate_povm(r.povm);
    REQUIRE(1.0 - (r.povm.elements[0] * r0).trace().real() ==
            Catch::Approx(r.per_param_error[0]).margin(1e-10));
    REQUIRE(1.0 - (r.povm.elements[1] * r1).trace().real() ==
            Catch::Approx(r.per_param_error[1]).margin(1e-10));
  }
}

TEST_CASE("identical and orthogonal ensembles sit at the error extremes", "[discriminate]") {
  CMat rho = diag2(0.3, 0.7);
  auto same = helstrom(rho, rho);
  REQUIRE(0.5 * (same.per_param_error[0] + same.per_param_error[1]) ==
          Catch::Approx(0.5).margin(1e-12));
  REQUIRE(pgm({rho, rho, rho}).error == Catch::Approx(2.0 / 3.0).margin(1e-10));
  auto twin = pgm({rho, rho});
  REQUIRE(twin.per_param_error[0] == Catch::Approx(0.5).margin(1e-10));
  REQUIRE(twin.per_param_error[1] == Catch::Approx(0.5).margin(1e-10));
  REQUIRE(helstrom(diag2(1.0, 0.0), diag2(0.0, 1.0)).error == Catch::Approx(0.0).margin(1e-12));
  auto orth = pgm({diag2(1.0, 0.0), diag2(0.0, 1.0)});
  REQUIRE(orth.error == Catch::Approx(0.0).margin(1e-10));
  // |0> against the uniform superposition: overlap 1/sqrt(2)
  CMat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  auto mixed = helstrom(diag2(1.0, 0.0), plus);
  REQUIRE(0.5 * (mixed.per_param_error[0] + mixed.per_param_error[1]) ==
          Catch::Approx(0.5 * (1.0 - 1.0 / std::sqrt(2.0))).margin(1e-10));
}

TEST_CASE("pretty good measurement loses at most a factor of two", "[discriminate]") {
  auto g = task_engine(0xD15C, 2);
  for (int rep = 0; rep < 1000; ++rep) {
    CMat r0 = random_density(3, g), r1 = random_density(3, g);
    auto opt = helstrom(r0, r1);
    auto pg = pgm({r0, r1});
    validate_povm(pg.povm);
    double avg_opt = 0.5 * (opt.per_param_error[0] + opt.per_param_error[1]);
    double avg_pg = 0.5 * (pg.per_param_error[0] + pg.per_param_error[1]);
    // the optimal average error has a trace-norm closed form
    REQUIRE(avg_opt == Catch::Approx(0.5 * (1.0 - 0.5 * trace_norm(r0 - r1))).margin(1e-10));
    REQUIRE(avg_pg <= 2.0 * avg_opt + 1e-10);
    REQUIRE(avg_pg >= avg_opt - 1e-10);
  }
}

TEST_CASE("multi-state bound dominates the measured error when informative", "[discriminate]") {
  auto g = task_engine(0xD15C, 3);
  for (int rep = 0; rep < 50; ++rep) {
    int m = 2 + static_cast<int>(draw_below(g, 3));
    std::vector<CMat> states;
    for (int i = 0; i < m; ++i) states.push_back(random_density(2, g));
    double bound = multi_chernoff_bound(states);
    REQUIRE(bound >= 0.0);
    if (bound <= 1.0) REQUIRE(pgm(states).error <= bound + 1e-10);
  }
  // nearly orthogonal pair: the bound is small and still valid
  std::vector<CMat> sharp = {diag2(1.0 - 1e-5, 1e-5), diag2(1e-5, 1.0 - 1e-5)};
  double b = multi_chernoff_bound(sharp);
  REQUIRE(b <= 1.0);
  REQUIRE(pgm(sharp).error <= b);
}

TEST_CASE("multi-state bound reduces to its closed formula", "[discriminate]") {
  // exactly orthogonal states have infinite pairwise exponents: the bound is 0
  REQUIRE(multi_chernoff_bound({diag2(1.0, 0.0), diag2(0.0, 1.0)}) == 0.0);
  // identical pairs: both ordered pairs contribute exp(0), and the
  // degeneracy factor counts distinct eigenvalues
  CMat flat = diag2(0.5, 0.5);
  REQUIRE(multi_chernoff_bound({flat, flat}) == Catch::Approx(20.0).margin(1e-12));
  CMat skew = diag2(0.3, 0.7);
  REQUIRE(multi_chernoff_bound({skew, skew}) == Catch::Approx(40.0).margin(1e-12));
  REQUIRE(multi_chernoff_bound({flat, flat, flat}) == Catch::Approx(240.0).margin(1e-12));
  // generic pair: 10 (m-1)^2 max_nu sum over ordered pairs of exp(-C)
  auto g = task_engine(0xD15C, 7);
  for (int rep = 0; rep < 50; ++rep) {
    CMat r0 = random_density(2, g), r1 = random_density(2, g);
    double want = 10.0 * 2.0 * 2.0 * std::exp(-chernoff(r0, r1).value);
    REQUIRE(multi_chernoff_bound({r0, r1}) == Catch::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("strategy error equals the per-sequence measurement average", "[discriminate]") {
  CqScenario s = make_sharp();
  auto law = build_input_law({0.5, 0.5}, 0, 0.5, 0.5, 4);
  auto rep = exact_strategy_error(s, law);

  // oracle: walk every sequence of the conditioned law directly
  std::vector<double> per(2, 0.0);
  double union_acc = 0.0;
  long seqs = 0;
  std::vector<int> seq(4, 0);
  while (true) {
    std::vector<int> counts(2, 0);
    double p = 1.0;
    for (int i = 0; i < 4; ++i) {
      ++counts[seq[i]];
      p *= 0.5;
    }
    bool in_ball = true;
    for (int u = 0; u < 2; ++u)
      if (std::abs(counts[u] / 4.0 - 0.5) > 0.25 + 1e-15) in_ball = false;
    if (in_ball) {
      std::vector<CMat> states;
      for (int t = 0; t < 2; ++t) {
        CMat prod = s.bob[t][seq[0]].mat();
        for (int i = 1; i < 4; ++i) prod = tensor(prod, s.bob[t][seq[i]].mat());
        states.push_back(prod);
      }
      auto r = pgm(states);
      for (int t = 0; t < 2; ++t) per[t] += p / law.mass_A * r.per_param_error[t];
      union_acc += p / law.mass_A * multi_chernoff_bound(states);
      ++seqs;
    }
    int pos = 3;
    while (pos >= 0 && seq[pos] == 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  REQUIRE(rep.sequences == seqs);
  REQUIRE(rep.per_param_error[0] == Catch::Approx(per[0]).margin(1e-12));
  REQUIRE(rep.per_param_error[1] == Catch::Approx(per[1]).margin(1e-12));
  REQUIRE(rep.error == Catch::Approx(std::max(per[0], per[1])).margin(1e-12));
  REQUIRE(rep.union_bound == Catch::Approx(union_acc).margin(1e-10));
}

TEST_CASE("an all-innocent strategy carries no signal", "[discriminate]") {
  // hand-built degenerate law: every letter is the innocent symbol, so the
  // receiver sees the same product state under both parameter values
  CqScenario s = make_sharp();
  ConstrainedInputLaw law;
  law.P = {1.0, 0.0};
  law.innocent = 0;
  law.alpha = 0.0;
  law.zeta = 1.0;
  law.n = 3;
  law.types = {InputType{{3, 0}, 1.0, 1.0}};
  law.mass_A = 1.0;
  auto rep = exact_strategy_error(s, law);
  REQUIRE(rep.sequences == 1);
  REQUIRE(rep.per_param_error[0] == Catch::Approx(0.5).margin(1e-10));
  REQUIRE(rep.per_param_error[1] == Catch::Approx(0.5).margin(1e-10));
  REQUIRE(rep.error == Catch::Approx(0.5).margin(1e-10));
  // both joint states are the 8-dim maximally mixed state: one flat cluster
  REQUIRE(rep.union_bound == Catch::Approx(20.0).margin(1e-10));
}

TEST_CASE("strategy error is bounded by its union bound at informative scale", "[discriminate]") {
  CqScenario s = make_sharp();
  auto law = build_input_law({0.5, 0.5}, 0, 0.5, 0.5, 6);
  auto rep = exact_strategy_error(s, law);
  REQUIRE(rep.union_bound <= 1.0);
  REQUIRE(rep.error <= rep.union_bound + 1e-12);
  REQUIRE_THROWS_AS(exact_strategy_error(s, build_input_law({0.5, 0.5}, 0, 0.5, 0.5, 20), 1000),
                    ScaleExceededError);
}

TEST_CASE("error exponent regression runs on commuting ensembles only", "[discriminate]") {
  CqScenario s = load_scenario(FIXTURE_DIR "/classical_pair.json").cq.value();
  auto rep = exponent_regression(s, {0.0, 1.0, 0.0}, {0.25}, {8, 16}, 4000, 0x5EED);
  REQUIRE(rep.points.size() == 2);
  for (const auto& pt : rep.points) {
    REQUIRE(pt.trials == 4000);
    REQUIRE(pt.error >= 0.0);
    REQUIRE(pt.error <= 1.0);
    REQUIRE(pt.ci_low <= pt.error);
    REQUIRE(pt.ci_high >= pt.error);
    REQUIRE(pt.per_param_error.size() == 2);
  }
  // longer blocks with the same alpha should not look worse
  REQUIRE(rep.points[1].error <= rep.points[0].error + 0.05);
  REQUIRE(rep.fit_points >= 1);

  CqScenario q = load_scenario(FIXTURE_DIR "/quantum_pair.json").cq.value();
  REQUIRE_THROWS_AS(exponent_regression(q, {0.0, 1.0, 0.0}, {0.25}, {8}, 100, 1),
                    NotClassicalError);
}

TEST_CASE("regression slope vanishes when the parameters are indistinguishable", "[discriminate]") {
  CqScenario s = make_sharp();
  s.bob[1] = s.bob[0];  // both hypotheses now produce the same receiver outputs
  auto rep = exponent_regression(s, {0.0, 1.0}, {0.5}, {8, 16}, 4000, 0xFEED);
  REQUIRE(rep.fit_points == 2);
  for (const auto& pt : rep.points) {
    REQUIRE(pt.error > 0.45);
    REQUIRE(pt.error < 0.55);
  }
  REQUIRE(std::abs(rep.slope) < 0.1);
}
