// Unit tests for the exact fidelity oracles: entanglement fidelity, the
// average-fidelity conversion, the 2-design route over MUB states, classical
// fidelity bounds, process purity, and basis invariance of the double-sum
// formula.  Closed-form reference values:
//   depolarizing(q):            Fe = 1 - q + q/d^2
//   dephasing(q), d = 3:        Fe = 1 - q + q/d      (identity Kraus terms)
//   unitary V against target U: Fe = |Tr[U^dag V]|^2 / d^2
#include <cmath>

#include "doctest.h"
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

TEST_CASE("a noiseless unitary achieves unit fidelity against itself") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  const Channel chan = unitary_channel(F);
  CHECK(entanglement_fidelity(chan, F, basis) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(average_fidelity(chan, F, basis) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mismatched unitaries score the phase-overlap fidelity") {
  OperatorBasis basis = gen_pauli_single(2);
  Mat X = Mat::Zero(2, 2);
  X(0, 1) = X(1, 0) = 1.0;
  const Channel ident = unitary_channel(Mat::Identity(2, 2));
  // Tr[X^dag] = 0, so Fe = 0 and Fav = 1/(d+1).
  CHECK(entanglement_fidelity(ident, X, basis) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(average_fidelity(ident, X, basis) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("depolarized and dephased qutrit targets match closed-form fidelities") {
  const QupitDims dims = QupitDims::make(3, 1);
  OperatorBasis basis = gen_pauli_single(3);
  const double q = 0.1;

  const Mat F = fourier3();
  const Channel noisy_f = compose(unitary_channel(F), depolarizing(q, dims));
  const double fe_depol = 1.0 - q + q / 9.0;  // 0.9111...
  CHECK(entanglement_fidelity(noisy_f, F, basis) ==
        doctest::Approx(fe_depol).epsilon(1e-10));
  CHECK(average_fidelity(noisy_f, F, basis) ==
        doctest::Approx(fe_to_fav(fe_depol, 3)).epsilon(1e-10));
  CHECK(fe_to_fav(fe_depol, 3) == doctest::Approx(0.9333333333333333).epsilon(1e-12));

  const Mat S = phase3();
  const Channel noisy_s = compose(unitary_channel(S), dephasing(q, dims));
  const double fe_deph = 1.0 - q + q / 3.0;  // 0.9333...
  CHECK(entanglement_fidelity(noisy_s, S, basis) ==
        doctest::Approx(fe_deph).epsilon(1e-10));
  CHECK(average_fidelity(noisy_s, S, basis) == doctest::Approx(0.95).epsilon(1e-10));
}

TEST_CASE("fidelity conversions are mutually inverse") {
  for (int d : {2, 3, 9, 25}) {
    CAPTURE(d);
    for (double fe : {0.0, 0.3, 0.911, 1.0}) {
      CHECK(fav_to_fe(fe_to_fav(fe, d), d) == doctest::Approx(fe).epsilon(1e-12));
    }
    CHECK(fe_to_fav(1.0, d) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the 2-design route over MUB states reproduces the average fidelity") {
  OperatorBasis basis = gen_pauli_single(3);
  MubSet mubs = mubs_from_partition(basis);
  Stream rng(17u, {3u});
  const Channel chan = random_channel(basis.dims, 5, rng);
  const Mat target = fourier3();
  const double direct = average_fidelity(chan, target, basis);
  const double via_states = average_fidelity_2design(chan, target, mubs);
  CHECK(std::abs(direct - via_states) < 1e-9);
}

TEST_CASE("classical fidelities over unbiased bases bracket the average fidelity") {
  OperatorBasis basis = gen_pauli_single(3);
  MubSet mubs = mubs_from_partition(basis);
  const QupitDims dims = basis.dims;
  const double q = 0.1;
  const Channel chan = depolarizing(q, dims);
  const Mat target = Mat::Identity(3, 3);
  const ClassicalFidelities cf =
      classical_fidelities(chan, target, mubs.bases[0], mubs.bases[1]);
  // Depolarizing is basis independent: F1 = F2 = 1 - q + q/d.
  const double f_cls = 1.0 - q + q / 3.0;
  CHECK(cf.f1 == doctest::Approx(f_cls).epsilon(1e-10));
  CHECK(cf.f2 == doctest::Approx(f_cls).epsilon(1e-10));
  // The entanglement-fidelity limits f1+f2-1 and min(f1,f2) arrive mapped
  // into average-fidelity units.
  CHECK(cf.lower_bound ==
        doctest::Approx(fe_to_fav(2.0 * f_cls - 1.0, 3)).epsilon(1e-10));
  CHECK(cf.upper_bound == doctest::Approx(fe_to_fav(f_cls, 3)).epsilon(1e-10));
  const double fav = average_fidelity(chan, target, basis);
  CHECK(cf.lower_bound <= fav + 1e-12);
  CHECK(fav <= cf.upper_bound + 1e-12);
  // A non-trivial random channel sits strictly inside the bracket.
  Stream rng(5u, {0x636c73u});
  const Channel noisy = random_channel(dims, 3, rng);
  const Mat V = fourier3();
  const ClassicalFidelities cf2 =
      classical_fidelities(noisy, V, mubs.bases[0], mubs.bases[1]);
  const double fav2 = average_fidelity(noisy, V, basis);
  CHECK(cf2.lower_bound <= fav2 + 1e-12);
  CHECK(fav2 <= cf2.upper_bound + 1e-12);
}

TEST_CASE("process purity is one for unitary channels and below one for noise") {
  OperatorBasis basis = gen_pauli_single(3);
  const Mat F = fourier3();
  CHECK(process_purity(unitary_channel(F), basis) ==
        doctest::Approx(1.0).epsilon(1e-10));
  const double p_noisy = process_purity(depolarizing(0.3, basis.dims), basis);
  CHECK(p_noisy < 1.0);
  CHECK(p_noisy > 0.0);
}

TEST_CASE("the entanglement-fidelity double sum is basis invariant") {
  Stream rng(23u, {11u});
  const QupitDims dims = QupitDims::make(3, 1);
  const Channel chan = random_channel(dims, 3, rng);
  const Mat target = phase3();

  OperatorBasis pauli = gen_pauli_single(3);
  OperatorBasis herm = hermitize(gen_pauli_single(3));
  OperatorBasis gm = gell_mann_basis();
  const double via_pauli = entanglement_fidelity(chan, target, pauli);
  const double via_herm = entanglement_fidelity(chan, target, herm);
  const double via_gm = entanglement_fidelity(chan, target, gm);
  CHECK(std::abs(via_pauli - via_herm) < 1e-10);
  CHECK(std::abs(via_pauli - via_gm) < 1e-10);
}
