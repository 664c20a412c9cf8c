// Basic dimensional bookkeeping for systems of n qupits with prime level p,
// shared numeric typedefs, and the tolerance constants used across the library.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace quditmc {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Tolerances, named by what they gate rather than by magnitude.
inline constexpr double kOrthoTol = 1e-10;      // operator-basis orthonormality
inline constexpr double kOverlapTol = 1e-10;    // MUB overlap moduli
inline constexpr double kStateTol = 1e-9;       // density-matrix invariants
inline constexpr double kChannelTol = 1e-9;     // trace preservation
inline constexpr double kCliffordTol = 1e-9;    // Clifford detection overlap
inline constexpr double kUniformTol = 1e-12;    // uniform-distribution entries
inline constexpr double kProbTol = 1e-9;        // probability normalization
inline constexpr double kEigenClusterTol = 1e-8;  // eigenvalue clustering

inline bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

// Dimensions of an n-qupit system: local level p (prime), Hilbert dimension
// d = p^n, and the primitive p-th root of unity omega = exp(2*pi*i/p).
struct QupitDims {
  int p = 0;
  int n = 0;
  int d = 0;
  Cx omega;

  static QupitDims make(int p, int n) {
    if (!is_prime(p))
      throw std::invalid_argument("QupitDims: level p = " + std::to_string(p) +
                                  " is not prime");
    if (n < 1)
      throw std::invalid_argument("QupitDims: need at least one qupit");
    QupitDims dm;
    dm.p = p;
    dm.n = n;
    dm.d = 1;
    for (int i = 0; i < n; ++i) {
      if (dm.d > (1 << 20) / p)
        throw std::invalid_argument("QupitDims: dimension p^n too large");
      dm.d *= p;
    }
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    dm.omega = std::polar(1.0, kTwoPi / p);
    return dm;
  }

  friend bool operator==(const QupitDims& a, const QupitDims& b) {
    return a.p == b.p && a.n == b.n;
  }
};

// omega^e with e reduced mod p; avoids accumulating phase error from repeated
// multiplication.
inline Cx omega_pow(const QupitDims& dims, long long e) {
  long long r = e % dims.p;
  if (r < 0) r += dims.p;
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / dims.p);
}

}  // namespace quditmc
