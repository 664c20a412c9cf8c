// Exact brute-force fidelity oracles: entanglement fidelity from the
// characteristic-function double sum, average fidelity via the standard
// conversion, the 2-design route over d(d+1) MUB state fidelities, and the
// two classical fidelities whose combination brackets the average fidelity.
// These are the ground truth the Monte Carlo estimators are judged against.
#pragma once

#include "quditmc/channel.hpp"
#include "quditmc/mub.hpp"
#include "quditmc/operator_basis.hpp"

namespace quditmc {

// F_e = (1/d^2) sum_ik alpha_ik conj(beta_ik) with
// alpha_ik = (1/d) Tr[D(W_i)^dag W_k] and beta_ik = (1/d) Tr[U W_i^dag U^dag W_k].
double entanglement_fidelity(const Channel& channel, const Mat& target_U,
                             const OperatorBasis& basis);

// F_av = (d F_e + 1)/(d + 1).
double average_fidelity(const Channel& channel, const Mat& target_U,
                        const OperatorBasis& basis);
inline double fe_to_fav(double fe, int d) {
  return (d * fe + 1.0) / (d + 1.0);
}
inline double fav_to_fe(double fav, int d) {
  return ((d + 1.0) * fav - 1.0) / d;
}

// F_av as the uniform average of Tr[rho_ideal rho_actual] over all d(d+1)
// MUB projector states; agrees with average_fidelity within 1e-9.
double average_fidelity_2design(const Channel& channel, const Mat& target_U,
                                const MubSet& mubs);

// The two classical fidelities over a pair of mutually unbiased eigenbases.
// They bracket the entanglement fidelity, f1 + f2 - 1 <= Fe <= min(f1, f2);
// the stored bounds are those limits mapped into average-fidelity units, so
// lower_bound <= Fav <= upper_bound.
struct ClassicalFidelities {
  double f1 = 0.0;
  double f2 = 0.0;
  double lower_bound = 0.0;  // fe_to_fav(f1 + f2 - 1)
  double upper_bound = 0.0;  // fe_to_fav(min(f1, f2))
};
ClassicalFidelities classical_fidelities(const Channel& channel,
                                         const Mat& target_U, const Mat& basisA,
                                         const Mat& basisB);

// (1/d^4) sum_ik |Tr[W_k^dag D(W_i)]|^2, bounded by 1 for trace-preserving
// channels (process purity).
double process_purity(const Channel& channel, const OperatorBasis& basis);

}  // namespace quditmc
