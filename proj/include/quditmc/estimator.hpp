// Monte Carlo fidelity estimation: event sampling over a relevance
// distribution, per-event shot budgets, assembly of the complex estimator
// Y = (1/L) sum X_l, the two-stage scheme for Hermitized bases, and an
// empirical check of the additive-error guarantee.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quditmc/channel.hpp"
#include "quditmc/dims.hpp"
#include "quditmc/mub.hpp"
#include "quditmc/operator_basis.hpp"
#include "quditmc/relevance.hpp"

namespace quditmc {

// exact_expectation replaces every per-event shot average by its exact mean
// alpha/beta — a testing instrument that isolates event-sampling error from
// shot noise.  finite_shots simulates the physical single-shot protocol.
enum class ShotMode { kExactExpectation, kFiniteShots };

std::string shot_mode_name(ShotMode m);
ShotMode shot_mode_from_name(const std::string& name);

struct SamplingPlan {
  double epsilon = 0.05;  // additive error target
  double delta = 0.05;    // failure probability
  long long L = 0;        // event draws; make() sets ceil(1 / (eps^2 delta))
  std::uint64_t seed = 1;
  Protocol protocol = Protocol::kEntanglement;
  ShotMode shot_mode = ShotMode::kFiniteShots;

  static SamplingPlan make(double epsilon, double delta, std::uint64_t seed,
                           Protocol protocol = Protocol::kEntanglement,
                           ShotMode mode = ShotMode::kFiniteShots);
  void validate() const;
};

// Per-event repetitions m = ceil(4 ln(4/delta) / (chi2 L eps^2)) with
// chi2 = |beta|^2 of the drawn event (natural log; Hoeffding-based budget).
long long shot_count(double chi2, const SamplingPlan& plan);

// Worst-case realized total-shot bounds: 1 + 1/(eps^2 delta) +
// (4 C / eps^2) ln(4/delta) with C = 1 on uniform Clifford supports and
// C = d^2 in general.
double shot_bound_clifford(const SamplingPlan& plan);
double shot_bound_generic(const SamplingPlan& plan, int d);

struct EventDraw {
  int input = 0;      // i_l
  int meas = 0;       // k_l
  Cx beta;            // chi_U at the drawn event
  long long m_l = 0;  // repetitions for this event
  Cx x_tilde;         // assembled per-event estimate (1/(beta m)) sum A
};

struct EstimateResult {
  Cx y_tilde;                 // (1/L) sum X_l
  double estimate = 0.0;      // Re(y_tilde): Fe (entanglement), Fav
                              // (two_design), (F1+F2)/2 (classical)
  double fe_estimate = 0.0;   // NaN for the classical protocol
  double fav_estimate = 0.0;  // NaN for the classical protocol
  long long total_shots = 0;  // sum of m_l
  SamplingPlan plan;
  std::vector<EventDraw> events;
  std::optional<double> oracle_value;  // exact estimand, same units as estimate
};

// L independent draws by inverse-CDF over the support; uniform (Clifford)
// distributions short-cut to a single uniform index draw.  Each event l uses
// a private stream derived from (seed, l).
std::vector<EventDraw> draw_events(const RelevanceDistribution& dist,
                                   const SamplingPlan& plan);

// Full pipeline for the pure-Pauli protocols.  Operator (entanglement)
// protocol: per shot, draw an eigenstate of W_i uniformly, pass it through
// the channel, measure the eigenbasis of W_k, record (lambda*) w.  State
// protocols: prepare the drawn MUB projector instead (mubs required).
EstimateResult run_estimate(const Mat& target_U, const Channel& channel,
                            const OperatorBasis& basis, const MubSet* mubs,
                            const SamplingPlan& plan, bool with_oracle = true);

// Two-stage scheme for a Hermitized basis: stage 1 draws the input index
// uniformly from d^2; stage 2 picks between the pair (k, k_bar) with
// probabilities c_k^2 / c_k_bar^2; shots proceed with real eigenvalues.
// The target must act as a Clifford on the parent Pauli basis.
EstimateResult run_estimate_hermitized(const Mat& target_clifford,
                                       const Channel& channel,
                                       const OperatorBasis& hermitized_basis,
                                       const SamplingPlan& plan,
                                       bool with_oracle = true);

struct GuaranteeReport {
  int runs = 0;
  int failures = 0;               // #{ |estimate - oracle| >= epsilon }
  double failure_fraction = 0.0;
  double threshold = 0.0;         // delta + 2 sqrt(delta / runs)
  double epsilon = 0.0;
  double oracle_value = 0.0;
  double mean_estimate = 0.0;
  double sample_sd = 0.0;         // sd of the per-run estimates
  double mean_total_shots = 0.0;
  bool ok = false;                // failure_fraction <= threshold
};

// R independent runs (seeds derived from plan.seed and the run index).
// Failures are counted in average-fidelity units for the entanglement and
// two_design protocols (Fav is a contraction of Y, so the Y-level guarantee
// transfers) and in raw-estimate units for the classical protocol.
GuaranteeReport verify_guarantee(const Mat& target_U, const Channel& channel,
                                 const OperatorBasis& basis, const MubSet* mubs,
                                 const SamplingPlan& plan, int runs);

GuaranteeReport verify_guarantee_hermitized(const Mat& target_clifford,
                                            const Channel& channel,
                                            const OperatorBasis& hermitized_basis,
                                            const SamplingPlan& plan, int runs);

}  // namespace quditmc
