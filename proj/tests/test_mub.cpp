// Unit tests for the MUB module: explicit odd-prime families, families derived
// from maximal partitions, cross-family matching, basis-change construction,
// the set-wise action of transitions on the family, and the cyclic group law
// of the twist transitions.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "quditmc/mub.hpp"

using namespace quditmc;

namespace {

double matdiff(const Mat& A, const Mat& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("the explicit family gives d+1 mutually unbiased bases for odd primes") {
  for (int p : {3, 5, 7}) {
    CAPTURE(p);
    const MubSet mubs = mubs_explicit(p);
    CHECK(static_cast<int>(mubs.bases.size()) == p + 1);
    CHECK(mubs.cyclic);
    CHECK(mubs.origin == "explicit");
    CHECK(matdiff(mubs.bases[0], Mat::Identity(p, p)) == 0.0);
    for (const Mat& B : mubs.bases)
      CHECK(matdiff(B.adjoint() * B, Mat::Identity(p, p)) < 1e-12);
    CHECK(max_overlap_deviation(mubs) < kOverlapTol);
  }
  CHECK_THROWS_AS(mubs_explicit(2), std::invalid_argument);
}

TEST_CASE("partition-derived families are mutually unbiased for every tested system") {
  struct Case {
    int p, n;
  };
  for (Case c : {Case{2, 1}, Case{3, 1}, Case{5, 1}, Case{2, 2}, Case{3, 2}}) {
    CAPTURE(c.p);
    CAPTURE(c.n);
    OperatorBasis basis = tensor_basis(gen_pauli_single(c.p), c.n);
    MubSet mubs = mubs_from_partition(basis);
    CHECK(static_cast<int>(mubs.bases.size()) == basis.dims.d + 1);
    CHECK(max_overlap_deviation(mubs) < kOverlapTol);
    for (const Mat& B : mubs.bases)
      CHECK(matdiff(B.adjoint() * B,
                    Mat::Identity(basis.dims.d, basis.dims.d)) < 1e-12);
  }
}

TEST_CASE("partition-derived single-qupit families canonicalize onto the explicit one") {
  for (int p : {3, 5}) {
    CAPTURE(p);
    OperatorBasis basis = gen_pauli_single(p);
    MubSet from_part = mubs_from_partition(basis);
    const MubSet ex = mubs_explicit(p);
    CHECK(from_part.cyclic);
    REQUIRE(from_part.bases.size() == ex.bases.size());
    // After canonicalization the bases agree entry by entry, not merely ray-wise.
    for (std::size_t j = 0; j < ex.bases.size(); ++j)
      CHECK(matdiff(from_part.bases[j], ex.bases[j]) < 1e-9);
    std::vector<int> mapping;
    double dev = 0.0;
    CHECK(mub_sets_match(from_part, ex, &mapping, &dev));
    for (std::size_t j = 0; j < mapping.size(); ++j)
      CHECK(mapping[j] == static_cast<int>(j));
  }
}

TEST_CASE("family matching is invariant to reindexing and per-vector phases") {
  const MubSet ex = mubs_explicit(3);
  MubSet shuffled = ex;
  std::swap(shuffled.bases[1], shuffled.bases[3]);
  shuffled.bases[2] = shuffled.bases[2] * Cx(0.0, 1.0);  // global column phase
  std::vector<int> mapping;
  double dev = 0.0;
  REQUIRE(mub_sets_match(shuffled, ex, &mapping, &dev));
  CHECK(mapping[1] == 3);
  CHECK(mapping[3] == 1);
  CHECK(mapping[2] == 2);
  CHECK(dev < 1e-10);
  // A family with one basis replaced by a non-member cannot match.
  MubSet broken = ex;
  broken.bases[2] = Mat::Identity(3, 3);
  CHECK_FALSE(mub_sets_match(broken, ex, nullptr, nullptr));
}

TEST_CASE("basis changes map source columns onto permuted target columns") {
  const MubSet mubs = mubs_explicit(3);
  const std::vector<int> perm = {2, 0, 1};
  const BasisChange bc = u_delta(mubs, 1, 2, perm);
  CHECK(matdiff(bc.matrix * bc.matrix.adjoint(), Mat::Identity(3, 3)) < 1e-12);
  for (int k = 0; k < 3; ++k) {
    const Vec img = bc.matrix * mubs.bases[1].col(k);
    const Cx overlap = mubs.bases[2].col(perm[k]).dot(img);
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-12);
  }
  CHECK(bc.delta == 1);
  CHECK_THROWS_AS(u_delta(mubs, 0, 9), std::invalid_argument);
}

TEST_CASE("twist transitions shift the cycle uniformly while fixing the anchor") {
  for (int p : {3, 5}) {
    CAPTURE(p);
    const MubSet mubs = mubs_explicit(p);
    for (int source = 1; source <= p; ++source)
      for (int target = 1; target <= p; ++target) {
        const BasisChange bc = u_delta(mubs, source, target);
        const FamilyActionReport rep = verify_family_action(mubs, bc);
        CHECK(rep.ok);
        CHECK(rep.delta == ((target - source) % p + p) % p);
        CHECK(rep.image_of[0] == 0);  // anchor fixed
        for (int j = 1; j <= p; ++j)
          CHECK(rep.image_of[j] == 1 + (j - 1 + rep.delta) % p);
        CHECK(rep.violations.empty());
      }
  }
}

TEST_CASE("transitions involving the anchor do not act as cycle shifts") {
  const MubSet mubs = mubs_explicit(3);
  const BasisChange bc = u_delta(mubs, 0, 1);
  const FamilyActionReport rep = verify_family_action(mubs, bc);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.violations.empty());
}

TEST_CASE("twist transitions form an exact cyclic group of order p") {
  for (int p : {3, 5}) {
    CAPTURE(p);
    const MubSet mubs = mubs_explicit(p);
    const GroupLawReport rep = verify_group_law(mubs);
    CHECK(rep.ok);
    CHECK(rep.max_dev < kOverlapTol);
    CHECK_FALSE(rep.checks.empty());
    for (const auto& check : rep.checks) CHECK(check.second);
  }
  // And the partition-derived family inherits the structure once canonicalized.
  OperatorBasis basis = gen_pauli_single(3);
  MubSet from_part = mubs_from_partition(basis);
  REQUIRE(from_part.cyclic);
  CHECK(verify_group_law(from_part).ok);
}

TEST_CASE("the unit-shift transition is one diagonal matrix generating the cycle") {
  // U_delta = T^delta for the diagonal twist generator T: transitions between
  // twisted bases collapse to powers of a single matrix.
  const int p = 5;
  const MubSet mubs = mubs_explicit(p);
  const Mat T = u_delta(mubs, 1, 2).matrix;
  Mat offdiag = T;
  offdiag.diagonal().setZero();
  CHECK(offdiag.cwiseAbs().maxCoeff() < 1e-12);
  Mat power = Mat::Identity(p, p);
  for (int delta = 0; delta < p; ++delta) {
    int target = 1 + delta;
    CHECK(matdiff(u_delta(mubs, 1, target > p ? target - p : target).matrix,
                  power) < 1e-12);
    power = T * power;
  }
  CHECK(matdiff(power, Mat::Identity(p, p)) < 1e-12);  // T^p = 1 exactly
}

TEST_CASE("multi-qupit partition families carry no cyclic labeling") {
  OperatorBasis basis = tensor_basis(gen_pauli_single(2), 2);
  MubSet mubs = mubs_from_partition(basis);
  CHECK_FALSE(mubs.cyclic);
  CHECK_THROWS_AS(verify_group_law(mubs), std::invalid_argument);
}
