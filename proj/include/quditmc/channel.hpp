// Quantum states, Kraus-form channels, and projective measurement of basis
// operators whose eigenvalues may be complex (roots of unity).  Measurement is
// abstracted as projection in a fixed eigenbasis returning the complex
// eigenvalue; both exact expectations and seeded finite-shot sampling are
// provided.
#pragma once

#include <string>
#include <vector>

#include "quditmc/operator_basis.hpp"
#include "quditmc/rng.hpp"

namespace quditmc {

// A density matrix.  validate() enforces Hermiticity, unit trace, and
// positive semidefiniteness.
struct StateDM {
  Mat rho;

  StateDM() = default;
  explicit StateDM(Mat r) : rho(std::move(r)) {}
  static StateDM pure(const Vec& psi) { return StateDM(psi * psi.adjoint()); }
  static StateDM maximally_mixed(int d) {
    return StateDM(Mat::Identity(d, d) / static_cast<double>(d));
  }
  void validate() const;
};

// A trace-preserving channel in Kraus form.
struct Channel {
  std::vector<Mat> kraus;
  std::string label;
  void validate() const;  // sum K^dag K = 1 within kChannelTol
};

// A measurable basis operator with its eigen-decomposition: eigenvalues[a]
// belongs to the eigenvector in column a of eigenvectors.  Degeneracies are
// resolved by the joint-eigenbasis conventions of the operator-basis module.
struct MeasurementOp {
  Mat op;
  Vec eigenvalues;
  Mat eigenvectors;
};

// One projective shot: input index, measured index, drawn input eigenstate,
// its eigenvalue lambda, the measured outcome w, and A = conj(lambda) * w.
struct ShotRecord {
  int input_index = 0;
  int meas_index = 0;
  int eigenstate_index = 0;
  Cx input_eigenvalue;
  Cx outcome;
  Cx product;
};

// Kraus application sum_m K rho K^dag, with invariants revalidated.
StateDM apply(const Channel& channel, const StateDM& state);

Channel unitary_channel(const Mat& U, const std::string& label = "unitary");

// (1-q) rho + q * 1/d, as Kraus operators sqrt(1-q) 1 and (sqrt(q)/d) W_k over
// a complete unitary operator basis for the given dimensions.
Channel depolarizing(double q, const QupitDims& dims);

// Kraus set {sqrt(1-q) 1} plus {sqrt(q/d) Z_a} over all d diagonal Pauli
// operators (the a = 0 identity term included), which damps off-diagonal
// elements in the computational basis.
Channel dephasing(double q, const QupitDims& dims);

// Apply first, then second.
Channel compose(const Channel& first, const Channel& second);

// A random trace-preserving channel: Gaussian draws G_m right-normalized by
// (sum G^dag G)^{-1/2}.  Deterministic for a fixed stream state.
Channel random_channel(const QupitDims& dims, int kraus_count, Stream& rng);

// Eigen-decompose operator k of a basis using its commuting set's joint
// eigenbasis when a partition is stored, and a deterministic dense
// decomposition otherwise.
MeasurementOp measurement_op(const OperatorBasis& basis, int k);

// Tr[rho W]; complex in general, real for Hermitian W.
Cx expectation(const MeasurementOp& meas, const StateDM& state);
Cx expectation(const Mat& op, const StateDM& state);

// Projective sampling in meas's eigenbasis with Born probabilities
// <v_a|rho|v_a>; outcomes are the (complex) eigenvalues.  Fills only the
// measurement-side fields of the records.
std::vector<ShotRecord> measure_shots(const MeasurementOp& meas,
                                      const StateDM& state, int count,
                                      Stream& rng);

// Process matrix chi of a channel over a basis: D(O) = sum_nm chi_nm W_m O
// W_n^dag.  Trace 1; purity sum |chi|^2 <= 1 with equality for unitary
// channels.
Mat process_matrix(const Channel& channel, const OperatorBasis& basis);

}  // namespace quditmc
