// Operator bases for n qupits of prime level p: generalized Pauli construction,
// tensor assembly, partitioning into d+1 commuting sets, joint eigenbases with
// deterministic degeneracy resolution, Hermitization, the Gell-Mann basis, and
// the measurement-hierarchy classifier.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quditmc/dims.hpp"

namespace quditmc {

// Exponent labels of a Pauli-type operator: W = prod_j X^{x[j]} Z^{z[j]} on
// factor j.  Empty for bases without Weyl structure (Gell-Mann, Hermitized).
struct PauliLabel {
  std::vector<int> x;
  std::vector<int> z;
};

struct BasisFlags {
  bool unitary = false;
  bool hermitian = false;
  bool tensor_local = false;
};

// Where a Hermitized operator came from: the skew part H = (U - U^dag)/(sqrt2 i),
// the symmetric part Hbar = (U + U^dag)/sqrt2, or the retained identity.
struct HermMeta {
  enum Kind { kIdentity, kH, kHBar };
  Kind kind = kIdentity;
  int source = 0;   // index of U in the parent unitary basis
  int partner = 0;  // index of the companion operator of the pair
};

// Spectra of each commuting set in its joint eigenbasis.  lambda[j] is d x d:
// row 0 is the all-ones identity row, row i >= 1 the spectrum of the i-th set
// operator, column a the joint eigenvector index.  s_k are the exponent sums
// s_k = sum_{i=k}^{d} i used by the explicit MUB construction.
struct SpectralTable {
  std::vector<Mat> lambda;
  std::vector<long long> s_k;
};

// Outcome of a partition attempt.  On failure the fields describe how far the
// grouping got, which the classifier consumes as evidence.
struct PartitionResult {
  bool ok = false;
  std::vector<std::vector<int>> sets;  // operator indices, identity excluded
  int sets_built = 0;
  std::vector<int> set_sizes;
  int blocking_index = -1;  // first operator that could not be placed
  std::string message;
};

struct HierarchyClass {
  char label = '?';  // one of A, B, C, D, E
  std::vector<std::pair<std::string, bool>> evidence;
};

// A complete orthonormal operator basis: d^2 dense matrices with ops[0] = 1
// and (1/d) Tr[W_i^dag W_k] = delta_ik.  Partition and spectral data are
// attached after partition_commuting succeeds.
struct OperatorBasis {
  QupitDims dims;
  std::vector<Mat> ops;
  BasisFlags flags;
  std::string kind;  // "pauli", "gellmann", "hermitized", ...
  std::vector<PauliLabel> labels;                   // empty if not Pauli-type
  std::vector<HermMeta> herm;                       // empty if not Hermitized
  std::optional<PartitionResult> partition;
  std::optional<SpectralTable> spectral_table;
  std::shared_ptr<const OperatorBasis> single_factor;  // set by tensor_basis
};

// ---------------------------------------------------------------- construction

// The generalized Pauli basis {X^a Z^b : a,b in [0,p)} for one qupit, ordered
// with a major and b minor so that index 0 is the identity.
OperatorBasis gen_pauli_single(int p);

// All n-fold tensor products of a single-qupit basis, ordered lexicographically
// in the single-factor indices.  tensor_basis(base, 1) returns base itself.
OperatorBasis tensor_basis(const OperatorBasis& base, int n);

// The identity plus the 8 standard SU(3) generators, rescaled so that
// (1/3) Tr[W_i^dag W_k] = delta_ik.
OperatorBasis gell_mann_basis();

// Hermitian basis from a unitary one: each conjugate pair {U, U^dag} is
// replaced by {H, Hbar} per HermMeta.  Requires odd p (at p = 2 every Pauli is
// Hermitian and H degenerates to zero).
OperatorBasis hermitize(const OperatorBasis& basis);

// ------------------------------------------------------------------ validation

// Largest deviation of (1/d) Tr[W_i^dag W_k] from delta_ik.
double orthonormality_deviation(const OperatorBasis& basis);

// True iff [A, B] vanishes within tol (Frobenius norm of the commutator).
bool commutes(const Mat& A, const Mat& B, double tol = kOrthoTol);

// ------------------------------------------------------------------- partition

// Group the non-identity operators into d+1 pairwise-commuting sets of d-1
// operators each.  Pauli-type bases use exact symplectic arithmetic on the
// labels; other bases use numeric commutators.  Greedy placement with
// backtracking: the plain greedy sweep can wedge (p = 2, n = 2 does), and a
// failed attempt must mean no partition exists, not that the sweep got
// unlucky.  On success the partition and spectral table are stored on the
// basis.
PartitionResult partition_commuting(OperatorBasis& basis);

// Joint eigenbasis of a pairwise-commuting operator set, as columns of a d x d
// unitary.  Deterministic: eigenspaces are refined operator by operator,
// columns are sorted by the per-operator eigenvalue signature (root-of-unity
// exponents for unitary sets, descending real eigenvalues for Hermitian ones)
// and each column's phase is gauged so its largest-modulus entry is real
// positive.  Throws if the set leaves any joint eigenspace degenerate.
Mat joint_eigenbasis(const std::vector<Mat>& set, const QupitDims& dims);

// Convenience overload operating on stored operator indices of a basis.
Mat joint_eigenbasis(const OperatorBasis& basis, const std::vector<int>& set);

// The phase c that makes spectrum(op)/c a subset of the p-th roots of unity,
// canonicalized to arg(c) in [0, 2*pi/p).  For odd-p Pauli operators c = 1;
// at p = 2 the product XZ has c = i.
Cx canonical_phase(const Mat& op, const QupitDims& dims);

// -------------------------------------------------------------- classification

// Measurement-resource class of a basis:
//   A - Hermitian, no maximal partition into commuting sets (or eigenbases not
//       mutually unbiased),
//   B - Hermitian and tensor-local; the single-factor basis partitions with
//       identical spectral rows, but the assembled multi-qupit basis does not
//       partition,
//   C - Hermitian with a maximal multi-qupit partition and identical spectral
//       rows (never assumed; reported only if the predicates genuinely pass),
//   D - unitary with a maximal partition (tensor structure preserved),
//   E - Hermitization of a class-D basis.
// Evidence records every predicate evaluated, pass or fail.
HierarchyClass classify_hierarchy(OperatorBasis& basis);

// Max deviation of |<e_a|f_b>| from 1/sqrt(d) over two eigenbases; the
// unbiasedness witness used by the classifier and its tests.
double unbiasedness_deviation(const Mat& eigA, const Mat& eigB);

}  // namespace quditmc
