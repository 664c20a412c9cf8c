// Mutually unbiased bases: derivation from a maximal partition, the explicit
// single-qupit family for odd primes, and the basis-change unitaries that
// permute the family.  For the odd-prime single-qupit family the transition
// operators between twisted bases collapse to powers of one diagonal matrix,
// forming an exact cyclic group of order p that shifts the d twisted bases
// uniformly while fixing the computational anchor.
#pragma once

#include <string>
#include <vector>

#include "quditmc/operator_basis.hpp"

namespace quditmc {

// d+1 orthonormal bases (columns of unitaries) with all cross-basis overlap
// moduli equal to 1/sqrt(d).  bases[0] is the computational-anchor basis;
// when cyclic is true, bases[1..d] carry the twist-cycle labeling under which
// the transition group acts by index shifts mod p.
struct MubSet {
  QupitDims dims;
  std::vector<Mat> bases;
  std::string origin;   // "partition" or "explicit"
  bool cyclic = false;
};

// A unitary mapping basis j onto basis j' of a family, column k of the source
// onto column perm[k] of the target.
struct BasisChange {
  Mat matrix;
  int source = 0;
  int target = 0;
  int delta = 0;           // cyclic displacement when both bases are twists
  std::vector<int> perm;
};

// How a basis change acts on the family: per-basis image indices, whether the
// twist cycle shifts uniformly by delta with the anchor fixed, and the worst
// vector-level deviation observed.
struct FamilyActionReport {
  bool ok = false;
  int delta = 0;
  std::vector<int> image_of;   // family index -> image family index, -1 if none
  double max_dev = 0.0;
  std::vector<std::string> violations;
};

struct GroupLawReport {
  bool ok = false;
  double max_dev = 0.0;
  std::vector<std::pair<std::string, bool>> checks;
};

// Joint eigenbases of the d+1 commuting sets of a maximally partitioning
// basis.  Runs the partition if absent; throws if none exists.  For odd-prime
// single-qupit bases the family is canonicalized onto the explicit
// construction (bases reindexed and columns rephased), which activates the
// cyclic labeling.
MubSet mubs_from_partition(OperatorBasis& basis);

// The explicit odd-prime family: the computational anchor plus p twisted
// Fourier bases B_t with entries omega^{l(d-k)} omega^{t s_k} / sqrt(d),
// where s_k = sum_{i=k}^{d} i.  Rejects p = 2 (the construction degenerates).
MubSet mubs_explicit(int p);

// Largest deviation of any cross-basis overlap modulus from 1/sqrt(d).
double max_overlap_deviation(const MubSet& mubs);

// Whether two families contain the same bases up to re-indexing and
// per-vector phases.  On success, mapping[j] gives the index in B of basis j
// of A; max_dev receives the worst entry-level deviation.
bool mub_sets_match(const MubSet& A, const MubSet& B, std::vector<int>* mapping,
                    double* max_dev);

// The transition unitary sum_k |target_{perm(k)}><source_k|.  An empty perm
// means the identity assignment.
BasisChange u_delta(const MubSet& mubs, int source, int target,
                    const std::vector<int>& perm = {});

// Classify the set-wise action of a basis change on every family member.
FamilyActionReport verify_family_action(const MubSet& mubs, const BasisChange& bc);

// The cyclic structure of the twist transitions: anchor-pair independence
// (U depends only on delta), composition U_a U_b = U_{a+b mod p}, inverses,
// and exact identity after a full cycle.  Requires a cyclic family.
GroupLawReport verify_group_law(const MubSet& mubs);

}  // namespace quditmc
