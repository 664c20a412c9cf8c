// Unit tests for the Monte Carlo estimator: plan arithmetic, per-event shot
// budgets, seeded event drawing, the full pipelines in exact-expectation and
// finite-shot modes, the Hermitized two-stage scheme, and the empirical
// additive-error guarantee.
#include <cmath>

#include "doctest.h"
#include "quditmc/estimator.hpp"
#include "quditmc/fidelity.hpp"

using namespace quditmc;

namespace {

Mat fourier3() {
  const QupitDims dims = QupitDims::make(3, 1);
  Mat F(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      F(j, k) = omega_pow(dims, static_cast<long long>(j) * k) / std::sqrt(3.0);
  return F;
}

Mat phase3() {
  const QupitDims dims = QupitDims::make(3, 1);
  Mat S = Mat::Zero(3, 3);
  for (int j = 0; j < 3; ++j)
    S(j, j) = omega_pow(dims, static_cast<long long>(j) * (j - 1) / 2);
  return S;
}

}  // namespace

TEST_CASE("shot-mode names round trip and accept short spellings") {
  CHECK(shot_mode_from_name(shot_mode_name(ShotMode::kFiniteShots)) ==
        ShotMode::kFiniteShots);
  CHECK(shot_mode_from_name(shot_mode_name(ShotMode::kExactExpectation)) ==
        ShotMode::kExactExpectation);
  CHECK(shot_mode_from_name("exact") == ShotMode::kExactExpectation);
  CHECK(shot_mode_from_name("finite") == ShotMode::kFiniteShots);
  CHECK_THROWS(shot_mode_from_name("sometimes"));
}

TEST_CASE("plans derive the draw count as the ceiling of one over eps^2 delta") {
  const SamplingPlan a = SamplingPlan::make(0.1, 0.1, 1u);
  CHECK(a.L == 1000);  // exactly 1000, not inflated by float round-off
  const SamplingPlan b = SamplingPlan::make(0.05, 0.05, 1u);
  CHECK(b.L == 8000);
  const SamplingPlan c = SamplingPlan::make(0.3, 0.2, 1u);
  CHECK(c.L == 56);  // ceil(55.55...)
  CHECK_THROWS_AS(SamplingPlan::make(0.0, 0.1, 1u), std::invalid_argument);
  CHECK_THROWS_AS(SamplingPlan::make(0.1, 1.5, 1u), std::invalid_argument);
}

TEST_CASE("per-event shot budgets scale inversely with the event weight") {
  const SamplingPlan plan = SamplingPlan::make(0.1, 0.1, 1u);
  CHECK(shot_count(1.0, plan) == 2);  // ceil(0.4 ln 40)
  CHECK(shot_count(0.01, plan) == 148);
  const SamplingPlan tight = SamplingPlan::make(0.05, 0.05, 1u);
  CHECK(shot_count(1.0, tight) == 1);
  CHECK_THROWS_AS(shot_count(0.0, plan), std::invalid_argument);
}

TEST_CASE("worst-case shot bounds match the closed-form budget expressions") {
  // 1 + 1/(eps^2 delta) + (4 C / eps^2) ln(4 / delta), C = 1 or d^2.
  const SamplingPlan plan = SamplingPlan::make(0.05, 0.05, 1u);
  CHECK(shot_bound_clifford(plan) ==
        doctest::Approx(1.0 + 8000.0 + 1600.0 * std::log(80.0)).epsilon(1e-12));
  CHECK(shot_bound_clifford(plan) == doctest::Approx(15012.2426).epsilon(1e-8));
  const SamplingPlan loose = SamplingPlan::make(0.1, 0.1, 1u);
  CHECK(shot_bound_clifford(loose) ==
        doctest::Approx(1.0 + 1000.0 + 400.0 * std::log(40.0)).epsilon(1e-12));
  CHECK(shot_bound_generic(plan, 3) ==
        doctest::Approx(1.0 + 8000.0 + 9.0 * 1600.0 * std::log(80.0)).epsilon(1e-12));
}

TEST_CASE("event drawing is seed deterministic and confined to the support") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  const Channel chan = compose(unitary_channel(F), depolarizing(0.1, basis.dims));
  const CharacteristicTable table =
      characteristic_table(Protocol::kEntanglement, F, chan, basis);
  const RelevanceDistribution dist = relevance_distribution(table);

  SamplingPlan plan = SamplingPlan::make(0.1, 0.1, 77u);
  const auto events = draw_events(dist, plan);
  REQUIRE(static_cast<long long>(events.size()) == plan.L);
  for (const auto& ev : events) {
    CHECK(dist.probs(ev.input, ev.meas) > 0.0);
    CHECK(std::norm(ev.beta) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ev.m_l == 2);
  }
  const auto events2 = draw_events(dist, plan);
  for (std::size_t l = 0; l < events.size(); ++l) {
    CHECK(events[l].input == events2[l].input);
    CHECK(events[l].meas == events2[l].meas);
  }
  SamplingPlan other = plan;
  other.seed = 78u;
  const auto events3 = draw_events(dist, other);
  int differing = 0;
  for (std::size_t l = 0; l < events.size(); ++l)
    if (events[l].input != events3[l].input || events[l].meas != events3[l].meas)
      ++differing;
  CHECK(differing > 0);
}

TEST_CASE("a noiseless unitary estimates to one in exact-expectation mode") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  const Channel chan = unitary_channel(F);
  SamplingPlan plan = SamplingPlan::make(0.1, 0.1, 5u, Protocol::kEntanglement,
                                         ShotMode::kExactExpectation);
  const EstimateResult res = run_estimate(F, chan, basis, nullptr, plan);
  CHECK(std::abs(res.y_tilde - Cx(1.0, 0.0)) < 1e-12);
  CHECK(res.estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.fav_estimate == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(res.oracle_value.has_value());
  CHECK(*res.oracle_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact-expectation estimates concentrate on the fidelity oracle") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  const Channel chan = compose(unitary_channel(F), depolarizing(0.1, basis.dims));
  const double fe = entanglement_fidelity(chan, F, basis);
  CHECK(fe == doctest::Approx(0.9111111111).epsilon(1e-9));

  SamplingPlan plan = SamplingPlan::make(0.1, 0.1, 11u, Protocol::kEntanglement,
                                         ShotMode::kExactExpectation);
  const EstimateResult res = run_estimate(F, chan, basis, nullptr, plan);
  REQUIRE(res.oracle_value.has_value());
  CHECK(*res.oracle_value == doctest::Approx(fe).epsilon(1e-12));
  CHECK(std::abs(res.estimate - fe) < plan.epsilon);
  CHECK(res.fav_estimate ==
        doctest::Approx(fe_to_fav(res.fe_estimate, 3)).epsilon(1e-12));
}

TEST_CASE("finite-shot runs respect the Clifford shot budget and the oracle") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  const Channel chan = compose(unitary_channel(F), depolarizing(0.1, basis.dims));
  SamplingPlan plan = SamplingPlan::make(0.1, 0.1, 21u);
  const EstimateResult res = run_estimate(F, chan, basis, nullptr, plan);
  CHECK(res.total_shots == 2000);  // L = 1000 events, 2 shots each
  CHECK(static_cast<double>(res.total_shots) <= shot_bound_clifford(plan));
  REQUIRE(res.oracle_value.has_value());
  CHECK(std::abs(res.estimate - *res.oracle_value) < plan.epsilon);

  // Bit-identical repetition under the same plan; sensitivity to the seed.
  const EstimateResult res2 = run_estimate(F, chan, basis, nullptr, plan);
  CHECK(res.y_tilde == res2.y_tilde);
  CHECK(res.total_shots == res2.total_shots);
  SamplingPlan other = plan;
  other.seed = 22u;
  const EstimateResult res3 = run_estimate(F, chan, basis, nullptr, other);
  CHECK(res.y_tilde != res3.y_tilde);
}

TEST_CASE("the state protocols estimate average and classical fidelities") {
  OperatorBasis basis = gen_pauli_single(3);
  MubSet mubs = mubs_from_partition(basis);
  const Mat F = fourier3();
  const Channel chan = compose(unitary_channel(F), depolarizing(0.1, basis.dims));

  SamplingPlan plan_2d = SamplingPlan::make(0.1, 0.1, 31u, Protocol::kTwoDesign);
  const EstimateResult res_2d = run_estimate(F, chan, basis, &mubs, plan_2d);
  REQUIRE(res_2d.oracle_value.has_value());
  CHECK(*res_2d.oracle_value ==
        doctest::Approx(average_fidelity(chan, F, basis)).epsilon(1e-10));
  CHECK(std::abs(res_2d.estimate - *res_2d.oracle_value) < plan_2d.epsilon);
  CHECK(res_2d.fav_estimate == doctest::Approx(res_2d.estimate).epsilon(1e-12));
  CHECK(res_2d.fe_estimate ==
        doctest::Approx(fav_to_fe(res_2d.estimate, 3)).epsilon(1e-12));

  SamplingPlan plan_cls = SamplingPlan::make(0.1, 0.1, 41u, Protocol::kClassical);
  const EstimateResult res_cls = run_estimate(F, chan, basis, &mubs, plan_cls);
  const ClassicalFidelities cf =
      classical_fidelities(chan, F, mubs.bases[0], mubs.bases[1]);
  REQUIRE(res_cls.oracle_value.has_value());
  CHECK(*res_cls.oracle_value ==
        doctest::Approx(0.5 * (cf.f1 + cf.f2)).epsilon(1e-10));
  CHECK(std::abs(res_cls.estimate - *res_cls.oracle_value) < plan_cls.epsilon);
  CHECK(std::isnan(res_cls.fe_estimate));
  CHECK(std::isnan(res_cls.fav_estimate));

  CHECK_THROWS_AS(run_estimate(F, chan, basis, nullptr, plan_2d),
                  std::invalid_argument);
}

TEST_CASE("the two-stage scheme estimates Hermitized-basis fidelities") {
  OperatorBasis herm = hermitize(gen_pauli_single(3));
  const Mat S = phase3();
  const QupitDims dims = herm.dims;
  const Channel chan = compose(unitary_channel(S), dephasing(0.1, dims));
  const double fe = 1.0 - 0.1 + 0.1 / 3.0;  // 0.9333...

  SamplingPlan exact = SamplingPlan::make(0.1, 0.1, 51u, Protocol::kEntanglement,
                                          ShotMode::kExactExpectation);
  const EstimateResult res_exact = run_estimate_hermitized(S, chan, herm, exact);
  REQUIRE(res_exact.oracle_value.has_value());
  CHECK(*res_exact.oracle_value == doctest::Approx(fe).epsilon(1e-10));
  CHECK(std::abs(res_exact.estimate - fe) < exact.epsilon);

  SamplingPlan finite = SamplingPlan::make(0.1, 0.1, 52u);
  const EstimateResult res_fin = run_estimate_hermitized(S, chan, herm, finite);
  CHECK(std::abs(res_fin.estimate - fe) < finite.epsilon);
  CHECK(res_fin.total_shots == 2000);  // unit pair weights keep m = 2
  const EstimateResult res_fin2 = run_estimate_hermitized(S, chan, herm, finite);
  CHECK(res_fin.y_tilde == res_fin2.y_tilde);

  // The scheme needs a Hermitized basis and a Clifford target.
  OperatorBasis pauli = gen_pauli_single(3);
  CHECK_THROWS(run_estimate_hermitized(S, chan, pauli, finite));
  Mat skew = Mat::Identity(3, 3);
  skew(2, 2) = std::polar(1.0, 0.7);
  CHECK_THROWS(run_estimate_hermitized(skew, chan, herm, finite));
}

TEST_CASE("repeated runs meet the additive-error guarantee empirically") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  const Channel chan = compose(unitary_channel(F), depolarizing(0.1, basis.dims));
  SamplingPlan plan = SamplingPlan::make(0.15, 0.15, 61u);
  const GuaranteeReport rep = verify_guarantee(F, chan, basis, nullptr, plan, 40);
  CHECK(rep.runs == 40);
  CHECK(rep.threshold ==
        doctest::Approx(0.15 + 2.0 * std::sqrt(0.15 / 40.0)).epsilon(1e-12));
  CHECK(rep.ok);
  CHECK(rep.failure_fraction <= rep.threshold);
  // Failures are counted in average-fidelity units for this protocol.
  CHECK(rep.oracle_value ==
        doctest::Approx(average_fidelity(chan, F, basis)).epsilon(1e-10));
  CHECK(std::abs(rep.mean_estimate - rep.oracle_value) < 0.1);
  CHECK(rep.sample_sd < 0.2);
  CHECK(rep.mean_total_shots > 0.0);
  CHECK_THROWS_AS(verify_guarantee(F, chan, basis, nullptr, plan, 0),
                  std::invalid_argument);
}

TEST_CASE("the two-stage guarantee holds for a dephased Clifford target") {
  OperatorBasis herm = hermitize(gen_pauli_single(3));
  const Mat S = phase3();
  const Channel chan = compose(unitary_channel(S), dephasing(0.1, herm.dims));
  SamplingPlan plan = SamplingPlan::make(0.15, 0.15, 71u);
  const GuaranteeReport rep = verify_guarantee_hermitized(S, chan, herm, plan, 30);
  CHECK(rep.runs == 30);
  CHECK(rep.ok);
  // Oracle reported in average-fidelity units: Fav = (d Fe + 1)/(d + 1) = 0.95.
  CHECK(rep.oracle_value == doctest::Approx(0.95).epsilon(1e-9));
}
