// Unit tests for the operator-basis module: generalized Pauli construction,
// Weyl commutation, tensor assembly, partitioning into commuting sets, joint
// eigenbases, canonical phases, Hermitization, the Gell-Mann basis, and the
// measurement-hierarchy classifier.
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "quditmc/operator_basis.hpp"

using namespace quditmc;

namespace {

// Largest |entry| of A - B.
double matdiff(const Mat& A, const Mat& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("qupit dimensions require a prime level and reject huge systems") {
  CHECK_THROWS_AS(QupitDims::make(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(QupitDims::make(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(QupitDims::make(3, 0), std::invalid_argument);
  const QupitDims dims = QupitDims::make(3, 2);
  CHECK(dims.d == 9);
  CHECK(std::abs(dims.omega - Cx(-0.5, std::sqrt(3.0) / 2.0)) < 1e-15);
  CHECK(std::abs(omega_pow(dims, 3) - Cx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(omega_pow(dims, -1) - omega_pow(dims, 2)) < 1e-15);
}

TEST_CASE("the generalized Pauli basis is orthonormal and unitary for small primes") {
  for (int p : {2, 3, 5}) {
    CAPTURE(p);
    OperatorBasis basis = gen_pauli_single(p);
    CHECK(static_cast<int>(basis.ops.size()) == p * p);
    CHECK(basis.kind == "pauli");
    CHECK(basis.flags.unitary);
    CHECK(matdiff(basis.ops[0], Mat::Identity(p, p)) < 1e-14);
    CHECK(orthonormality_deviation(basis) < kOrthoTol);
    for (const Mat& W : basis.ops)
      CHECK(matdiff(W * W.adjoint(), Mat::Identity(p, p)) < 1e-12);
  }
}

TEST_CASE("Pauli operators obey the Weyl commutation relation") {
  // W_{(a,b)} W_{(a',b')} = omega^{a' b - a b'} W_{(a',b')} W_{(a,b)}.
  for (int p : {2, 3}) {
    CAPTURE(p);
    const QupitDims dims = QupitDims::make(p, 1);
    OperatorBasis basis = gen_pauli_single(p);
    for (std::size_t i = 0; i < basis.ops.size(); ++i)
      for (std::size_t k = 0; k < basis.ops.size(); ++k) {
        const int a = basis.labels[i].x[0], b = basis.labels[i].z[0];
        const int ap = basis.labels[k].x[0], bp = basis.labels[k].z[0];
        const Cx phase = omega_pow(dims, static_cast<long long>(ap) * b -
                                             static_cast<long long>(a) * bp);
        CHECK(matdiff(basis.ops[i] * basis.ops[k],
                      phase * (basis.ops[k] * basis.ops[i])) < 1e-12);
      }
  }
}

TEST_CASE("Pauli labels reproduce the operators as X^a Z^b") {
  const int p = 3;
  const QupitDims dims = QupitDims::make(p, 1);
  Mat X = Mat::Zero(p, p), Z = Mat::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    X((j + 1) % p, j) = 1.0;
    Z(j, j) = omega_pow(dims, j);
  }
  OperatorBasis basis = gen_pauli_single(p);
  for (std::size_t i = 0; i < basis.ops.size(); ++i) {
    Mat expect = Mat::Identity(p, p);
    for (int r = 0; r < basis.labels[i].x[0]; ++r) expect = X * expect;
    for (int r = 0; r < basis.labels[i].z[0]; ++r) expect = expect * Z;
    CHECK(matdiff(basis.ops[i], expect) < 1e-13);
  }
}

TEST_CASE("tensor assembly preserves orthonormality and label structure") {
  OperatorBasis single = gen_pauli_single(2);
  OperatorBasis pair = tensor_basis(single, 2);
  CHECK(pair.dims.d == 4);
  CHECK(pair.ops.size() == 16);
  CHECK(orthonormality_deviation(pair) < kOrthoTol);
  CHECK(pair.flags.tensor_local);
  CHECK(pair.single_factor != nullptr);
  // Index (i1, i2) = i1 * p^2 + i2 must be the Kronecker product of factors.
  for (int i1 = 0; i1 < 4; ++i1)
    for (int i2 = 0; i2 < 4; ++i2) {
      const Mat& A = single.ops[i1];
      const Mat& B = single.ops[i2];
      Mat kron(4, 4);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) kron.block(2 * r, 2 * c, 2, 2) = A(r, c) * B;
      CHECK(matdiff(pair.ops[i1 * 4 + i2], kron) < 1e-13);
      CHECK(pair.labels[i1 * 4 + i2].x[0] == single.labels[i1].x[0]);
      CHECK(pair.labels[i1 * 4 + i2].x[1] == single.labels[i2].x[0]);
    }
  OperatorBasis same = tensor_basis(single, 1);
  CHECK(same.ops.size() == single.ops.size());
  CHECK(matdiff(same.ops[3], single.ops[3]) == 0.0);
}

TEST_CASE("maximal partitions exist for single qupits and Pauli tensor powers") {
  struct Case {
    int p, n;
  };
  for (Case c : {Case{2, 1}, Case{3, 1}, Case{5, 1}, Case{2, 2}, Case{3, 2},
                 Case{2, 3}}) {
    CAPTURE(c.p);
    CAPTURE(c.n);
    OperatorBasis basis = tensor_basis(gen_pauli_single(c.p), c.n);
    const int d = basis.dims.d;
    PartitionResult part = partition_commuting(basis);
    REQUIRE(part.ok);
    CHECK(part.sets_built == d + 1);
    std::set<int> seen;
    for (const auto& set : part.sets) {
      CHECK(static_cast<int>(set.size()) == d - 1);
      for (std::size_t a = 0; a < set.size(); ++a) {
        CHECK(seen.insert(set[a]).second);  // disjoint cover
        for (std::size_t b = a + 1; b < set.size(); ++b)
          CHECK(commutes(basis.ops[set[a]], basis.ops[set[b]]));
      }
    }
    CHECK(static_cast<int>(seen.size()) == d * d - 1);
    CHECK(basis.partition.has_value());
    CHECK(basis.spectral_table.has_value());
  }
}

TEST_CASE("the spectral table stores identity rows, set spectra, and twist exponents") {
  OperatorBasis basis = gen_pauli_single(3);
  partition_commuting(basis);
  REQUIRE(basis.spectral_table.has_value());
  const SpectralTable& table = *basis.spectral_table;
  CHECK(table.lambda.size() == 4);
  for (const Mat& lam : table.lambda) {
    CHECK(lam.rows() == 3);
    CHECK(lam.cols() == 3);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(lam(0, a) - 1.0) < 1e-14);
    // Non-identity Pauli spectra are full sets of p-th roots of unity.
    for (int r = 1; r < 3; ++r) {
      Cx sum = 0.0;
      for (int a = 0; a < 3; ++a) {
        CHECK(std::abs(std::abs(lam(r, a)) - 1.0) < 1e-12);
        sum += lam(r, a);
      }
      CHECK(std::abs(sum) < 1e-12);  // roots of unity sum to zero
    }
  }
  REQUIRE(table.s_k.size() == 3);
  CHECK(table.s_k[0] == 6);  // 1 + 2 + 3
  CHECK(table.s_k[1] == 5);  // 2 + 3
  CHECK(table.s_k[2] == 3);  // 3
}

TEST_CASE("joint eigenbases are unitary, diagonalizing, and deterministic") {
  OperatorBasis basis = tensor_basis(gen_pauli_single(2), 2);
  PartitionResult part = partition_commuting(basis);
  REQUIRE(part.ok);
  for (const auto& set : part.sets) {
    const Mat V = joint_eigenbasis(basis, set);
    CHECK(matdiff(V.adjoint() * V, Mat::Identity(4, 4)) < 1e-12);
    for (int idx : set) {
      const Mat D = V.adjoint() * basis.ops[idx] * V;
      Mat offdiag = D;
      offdiag.diagonal().setZero();
      CHECK(offdiag.cwiseAbs().maxCoeff() < 1e-10);
    }
    const Mat V2 = joint_eigenbasis(basis, set);
    CHECK(matdiff(V, V2) == 0.0);  // bit-identical on repeat
  }
}

TEST_CASE("canonical phases make every Pauli power of the identity explicit") {
  // W^p equals canonical_phase(W)^p times the identity: the phase is 1 for
  // odd p and a fourth root of unity at p = 2 (XZ squares to -1).
  for (int p : {2, 3, 5}) {
    CAPTURE(p);
    const QupitDims dims = QupitDims::make(p, 1);
    OperatorBasis basis = gen_pauli_single(p);
    for (std::size_t i = 0; i < basis.ops.size(); ++i) {
      const Cx c = canonical_phase(basis.ops[i], dims);
      Mat power = Mat::Identity(p, p);
      for (int r = 0; r < p; ++r) power = power * basis.ops[i];
      CHECK(matdiff(power, std::pow(c, p) * Mat::Identity(p, p)) < 1e-11);
      if (p != 2) CHECK(std::abs(c - 1.0) < 1e-12);
    }
  }
  // The qubit XZ product specifically needs the quarter phase.
  const QupitDims dims2 = QupitDims::make(2, 1);
  OperatorBasis qubit = gen_pauli_single(2);
  bool found_quarter = false;
  for (const Mat& W : qubit.ops) {
    const Cx c = canonical_phase(W, dims2);
    if (std::abs(c - Cx(0.0, 1.0)) < 1e-12) found_quarter = true;
  }
  CHECK(found_quarter);
}

TEST_CASE("Hermitization yields an orthonormal Hermitian basis for odd primes") {
  OperatorBasis pauli = gen_pauli_single(3);
  OperatorBasis herm = hermitize(pauli);
  CHECK(herm.kind == "hermitized");
  CHECK(herm.ops.size() == 9);
  CHECK(herm.flags.hermitian);
  CHECK_FALSE(herm.flags.unitary);
  CHECK(orthonormality_deviation(herm) < kOrthoTol);
  REQUIRE(herm.herm.size() == 9);
  CHECK(herm.herm[0].kind == HermMeta::kIdentity);
  int n_h = 0, n_hbar = 0;
  for (std::size_t i = 1; i < herm.ops.size(); ++i) {
    CHECK(matdiff(herm.ops[i], herm.ops[i].adjoint()) < 1e-12);
    const HermMeta& meta = herm.herm[i];
    CHECK(herm.herm[meta.partner].partner == static_cast<int>(i));
    if (meta.kind == HermMeta::kH) ++n_h;
    if (meta.kind == HermMeta::kHBar) ++n_hbar;
    // Rebuild from the recorded source pair of the parent basis.
    const Mat& U = pauli.ops[meta.source];
    const Mat expect = (meta.kind == HermMeta::kH)
                           ? Mat(((U - U.adjoint()) / Cx(0.0, std::sqrt(2.0))))
                           : Mat(((U + U.adjoint()) / std::sqrt(2.0)));
    CHECK(matdiff(herm.ops[i], expect) < 1e-12);
  }
  CHECK(n_h == 4);
  CHECK(n_hbar == 4);
  CHECK_THROWS(hermitize(gen_pauli_single(2)));
}

TEST_CASE("the Gell-Mann basis is orthonormal but admits no maximal partition") {
  OperatorBasis gm = gell_mann_basis();
  CHECK(gm.ops.size() == 9);
  CHECK(gm.flags.hermitian);
  CHECK(orthonormality_deviation(gm) < kOrthoTol);
  CHECK(matdiff(gm.ops[0], Mat::Identity(3, 3)) < 1e-14);
  // Among the 8 generators only three pairs commute, all involving the last
  // diagonal generator, so 4 disjoint commuting pairs cannot exist.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < 9; ++i)
    for (int k = i + 1; k < 9; ++k)
      if (commutes(gm.ops[i], gm.ops[k])) pairs.emplace_back(i, k);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0] == std::make_pair(1, 8));
  CHECK(pairs[1] == std::make_pair(2, 8));
  CHECK(pairs[2] == std::make_pair(3, 8));
  PartitionResult part = partition_commuting(gm);
  CHECK_FALSE(part.ok);
  CHECK(part.sets_built < 4);
  CHECK_FALSE(part.message.empty());
}

TEST_CASE("unbiasedness deviation separates unbiased pairs from aligned ones") {
  const int d = 3;
  const QupitDims dims = QupitDims::make(3, 1);
  Mat F(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      F(j, k) = omega_pow(dims, static_cast<long long>(j) * k) / std::sqrt(3.0);
  const Mat I = Mat::Identity(d, d);
  CHECK(unbiasedness_deviation(I, F) < 1e-12);
  CHECK(unbiasedness_deviation(I, I) > 0.4);  // 1 - 1/sqrt(3)
}

TEST_CASE("the hierarchy classifier assigns the expected class labels") {
  OperatorBasis pauli = gen_pauli_single(3);
  HierarchyClass cls_pauli = classify_hierarchy(pauli);
  CHECK(cls_pauli.label == 'D');
  CHECK_FALSE(cls_pauli.evidence.empty());

  OperatorBasis gm = gell_mann_basis();
  HierarchyClass cls_gm = classify_hierarchy(gm);
  CHECK(cls_gm.label == 'A');

  OperatorBasis herm = hermitize(gen_pauli_single(3));
  HierarchyClass cls_herm = classify_hierarchy(herm);
  CHECK(cls_herm.label == 'E');

  OperatorBasis pair = tensor_basis(gen_pauli_single(2), 2);
  HierarchyClass cls_pair = classify_hierarchy(pair);
  CHECK(cls_pair.label == 'D');
}
