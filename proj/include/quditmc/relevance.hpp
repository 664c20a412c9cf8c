// Characteristic functions chi_U / chi_D for the three sampling protocols,
// the relevance distributions P = |chi_U|^2 / N they induce, Clifford
// detection with its uniform-sampling shortcut, the pairwise distribution of
// the Hermitized two-stage scheme, and expected-experiment accounting.
#pragma once

#include <string>
#include <vector>

#include "quditmc/channel.hpp"
#include "quditmc/operator_basis.hpp"
#include "quditmc/mub.hpp"

namespace quditmc {

struct SamplingPlan;  // defined in estimator.hpp

enum class Protocol { kEntanglement, kTwoDesign, kClassical };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

// chi_U(i,k) and chi_D(i,k) for T inputs against d^2 measurement operators.
// Operator inputs (entanglement protocol): chi are the Appendix-style
// beta/alpha values with the 1/d normalization.  State inputs (two_design,
// classical): chi(i,k) = Tr[W_k sigma] for the ideal/actual output states.
struct CharacteristicTable {
  Protocol protocol = Protocol::kEntanglement;
  Mat chi_U;  // T x d^2
  Mat chi_D;  // T x d^2
  int T = 0;
  bool state_inputs = false;
};

// P(i,k) = |chi_U(i,k)|^2 / N with N = d^2 (entanglement), d^2(d+1)
// (two_design), or 2d^2 (classical; two bases of d states each).
struct RelevanceDistribution {
  Protocol protocol = Protocol::kEntanglement;
  Eigen::MatrixXd probs;  // T x d^2
  double normalization = 0.0;
  struct Event {
    int input = 0;
    int meas = 0;
    double prob = 0.0;
    Cx chi;  // chi_U(input, meas); event sampling needs its phase
  };
  std::vector<Event> support;
  bool uniform_flag = false;
};

// Conjugation action of a Clifford unitary on a Pauli-type basis:
// U W_k U^dag = phase[k] * W_{image[k]}, phases being p-th roots of unity for
// odd p and fourth roots at p = 2.  not-Clifford is a verdict, not an error.
struct CliffordMap {
  bool is_clifford = false;
  std::vector<int> image;
  std::vector<Cx> phase;
  std::vector<int> phase_exp;  // exponent of omega (odd p) or of i (p = 2)
  int phase_order = 0;         // p for odd p, 4 for p = 2
  double worst_residual = 0.0;
};

// Pairwise output distribution of the Hermitized two-stage scheme: for each
// input index the two candidate measurement indices and their probabilities
// (Re^2 / Im^2 of the Clifford phase, summing to 1).
struct HermitizedRelevance {
  struct PairRow {
    int input = 0;
    int k = 0;
    int k_bar = 0;
    double c_k = 0.0;      // signed real coefficient on ops[k]
    double c_k_bar = 0.0;  // signed real coefficient on ops[k_bar]
    double p_k = 0.0;      // = c_k^2
    double p_k_bar = 0.0;  // = c_k_bar^2
  };
  std::vector<PairRow> rows;  // one row per basis index, including identity
};

CharacteristicTable characteristic_table(Protocol protocol, const Mat& target_U,
                                         const Channel& channel,
                                         const OperatorBasis& basis,
                                         const MubSet* mubs = nullptr);

RelevanceDistribution relevance_distribution(const CharacteristicTable& table);

CliffordMap clifford_map(const Mat& target_U, const OperatorBasis& basis);

HermitizedRelevance hermitized_relevance(const Mat& target_clifford,
                                         const OperatorBasis& hermitized_basis);

// Expected total measurement count L * sum P(i,k) m(i,k), with the per-event
// repetition m(i,k) = ceil(4 ln(4/delta) / (|chi|^2 L epsilon^2)).  For
// Clifford targets this is bounded by 1 + 1/(eps^2 delta) + (4/eps^2) ln(4/delta).
double expected_experiments(const RelevanceDistribution& dist,
                            const SamplingPlan& plan);

// Audit export: one line per support event with i, k, Re chi, Im chi, P.
void write_distribution_csv(const std::string& path,
                            const CharacteristicTable& table,
                            const RelevanceDistribution& dist);

}  // namespace quditmc
