#include "quditmc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace quditmc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_hermitian(const Mat& M, double tol = kOrthoTol) {
  return (M - M.adjoint()).cwiseAbs().maxCoeff() < tol;
}

// Dense eigen-decomposition of a normal operator with the library's
// deterministic conventions (canonical ordering, phase gauge), tolerating
// degenerate operators — the basis inside a degenerate eigenspace is whatever
// the self-adjoint solver produces, which is orthonormal and deterministic.
// Non-Hermitian normal operators are diagonalized through a generic weighted
// combination of their Hermitian and anti-Hermitian parts; that keeps the
// accurate self-adjoint solver on the job where the general complex
// eigensolver would return poorly separated, non-orthogonal vectors.
void eigen_decompose(const Mat& M, const QupitDims& dims, Vec& vals_out,
                     Mat& vecs_out) {
  const int d = static_cast<int>(M.rows());
  Mat vecs(d, d);
  Vec vals(d);
  const bool herm = is_hermitian(M);
  if (herm) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    vecs = es.eigenvectors();
    vals = es.eigenvalues().cast<Cx>();
  } else {
    const Mat P = (M + M.adjoint()) * 0.5;
    const Mat Q = (M - M.adjoint()) * Cx(0.0, -0.5);
    bool diagonalized = false;
    for (std::uint64_t attempt = 0; attempt < 8 && !diagonalized; ++attempt) {
      Stream coeffs(0x65646563u, {attempt});
      const Mat H = (1.0 + coeffs.uniform()) * P + (1.0 + coeffs.uniform()) * Q;
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      vecs = es.eigenvectors();
      // An unlucky weight pair can collide distinct eigenvalues of M; detect
      // the off-diagonal residue and retry.
      const Mat D = vecs.adjoint() * M * vecs;
      double off = 0.0;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          if (r != c) off = std::max(off, std::abs(D(r, c)));
      diagonalized = off < 1e-8;
      if (diagonalized)
        for (int i = 0; i < d; ++i) vals(i) = D(i, i);
    }
    if (!diagonalized)
      throw std::invalid_argument(
          "eigen_decompose: operator is not normal enough to diagonalize");
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  // Hermitian: descending real eigenvalues.  Unitary-like: ascending
  // root-of-unity exponent relative to the canonical phase.
  std::vector<double> key(d);
  if (herm) {
    for (int i = 0; i < d; ++i) key[i] = -vals(i).real();
  } else {
    const Cx c = canonical_phase(M, dims);
    for (int i = 0; i < d; ++i) {
      if (std::abs(vals(i)) < 1e-9) {
        key[i] = -1.0;  // zero eigenvalues (non-unitary ops) sort first
      } else {
        double ang = std::arg(vals(i) / c) / (kTwoPi / dims.p);
        long long e = std::llround(ang);
        key[i] = static_cast<double>(((e % dims.p) + dims.p) % dims.p);
      }
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return key[a] < key[b]; });
  Mat sorted_vecs(d, d);
  Vec sorted_vals(d);
  for (int i = 0; i < d; ++i) {
    sorted_vecs.col(i) = vecs.col(order[i]);
    sorted_vals(i) = vals(order[i]);
  }
  // Phase gauge: largest-modulus entry real positive.
  for (int c2 = 0; c2 < d; ++c2) {
    int arg_max = 0;
    double best = 0.0;
    for (int r = 0; r < d; ++r) {
      const double a = std::abs(sorted_vecs(r, c2));
      if (a > best + 1e-12) {
        best = a;
        arg_max = r;
      }
    }
    const Cx ph = sorted_vecs(arg_max, c2) / std::abs(sorted_vecs(arg_max, c2));
    sorted_vecs.col(c2) *= std::conj(ph);
  }
  vals_out = std::move(sorted_vals);
  vecs_out = std::move(sorted_vecs);
}

}  // namespace

void StateDM::validate() const {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("StateDM: density matrix must be square");
  const double herm_dev = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10)
    throw std::invalid_argument("StateDM: not Hermitian (deviation " +
                                std::to_string(herm_dev) + ")");
  const double tr_dev = std::abs(rho.trace() - Cx(1, 0));
  if (tr_dev > 1e-10)
    throw std::invalid_argument("StateDM: trace differs from 1 by " +
                                std::to_string(tr_dev));
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTol)
    throw std::invalid_argument("StateDM: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
}

void Channel::validate() const {
  if (kraus.empty()) throw std::invalid_argument("Channel: no Kraus operators");
  const int d = static_cast<int>(kraus.front().rows());
  Mat sum = Mat::Zero(d, d);
  for (const Mat& K : kraus) {
    if (K.rows() != d || K.cols() != d)
      throw std::invalid_argument("Channel: Kraus dimension mismatch");
    sum += K.adjoint() * K;
  }
  const double dev = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > kChannelTol)
    throw std::invalid_argument("Channel '" + label +
                                "': trace preservation violated by " +
                                std::to_string(dev));
}

StateDM apply(const Channel& channel, const StateDM& state) {
  const int d = static_cast<int>(state.rho.rows());
  if (channel.kraus.front().cols() != d)
    throw std::invalid_argument("apply: channel/state dimension mismatch");
  Mat out = Mat::Zero(d, d);
  for (const Mat& K : channel.kraus) out += K * state.rho * K.adjoint();
  StateDM result(std::move(out));
  result.validate();
  return result;
}

Channel unitary_channel(const Mat& U, const std::string& label) {
  const int d = static_cast<int>(U.rows());
  if ((U * U.adjoint() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("unitary_channel: matrix is not unitary");
  Channel c;
  c.kraus.push_back(U);
  c.label = label;
  return c;
}

Channel depolarizing(double q, const QupitDims& dims) {
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument("depolarizing: q must lie in [0, 1]");
  OperatorBasis basis = tensor_basis(gen_pauli_single(dims.p), dims.n);
  Channel c;
  c.label = "depolarizing(q=" + std::to_string(q) + ")";
  const int d = dims.d;
  c.kraus.push_back(std::sqrt(1.0 - q) * Mat::Identity(d, d));
  const double w = std::sqrt(q) / static_cast<double>(d);
  for (const Mat& W : basis.ops) c.kraus.push_back(w * W);
  c.validate();
  return c;
}

Channel dephasing(double q, const QupitDims& dims) {
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument("dephasing: q must lie in [0, 1]");
  Channel c;
  c.label = "dephasing(q=" + std::to_string(q) + ")";
  const int d = dims.d;
  c.kraus.push_back(std::sqrt(1.0 - q) * Mat::Identity(d, d));
  // All d diagonal Pauli operators Z_a, a in Z_p^n (a = 0 included).
  const double w = std::sqrt(q / static_cast<double>(d));
  std::vector<int> a(dims.n, 0);
  for (int count = 0; count < d; ++count) {
    Mat Z = Mat::Zero(d, d);
    for (int m = 0; m < d; ++m) {
      long long phase = 0;
      int mm = m;
      for (int j = dims.n - 1; j >= 0; --j) {
        phase += static_cast<long long>(a[j]) * (mm % dims.p);
        mm /= dims.p;
      }
      Z(m, m) = omega_pow(dims, phase);
    }
    c.kraus.push_back(w * Z);
    for (int j = dims.n - 1; j >= 0; --j) {
      if (++a[j] < dims.p) break;
      a[j] = 0;
    }
  }
  c.validate();
  return c;
}

Channel compose(const Channel& first, const Channel& second) {
  Channel c;
  c.label = second.label + " after " + first.label;
  for (const Mat& K2 : second.kraus)
    for (const Mat& K1 : first.kraus) c.kraus.push_back(K2 * K1);
  c.validate();
  return c;
}

Channel random_channel(const QupitDims& dims, int kraus_count, Stream& rng) {
  if (kraus_count < 1)
    throw std::invalid_argument("random_channel: need at least one Kraus op");
  const int d = dims.d;
  std::vector<Mat> raw;
  raw.reserve(kraus_count);
  Mat S = Mat::Zero(d, d);
  for (int m = 0; m < kraus_count; ++m) {
    Mat G(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        G(r, c) = Cx(normal(rng), normal(rng)) / std::sqrt(2.0);
    S += G.adjoint() * G;
    raw.push_back(std::move(G));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const Vec scale =
      es.eigenvalues().cwiseSqrt().cwiseInverse().cast<Cx>();
  const Mat inv_sqrt =
      es.eigenvectors() * scale.asDiagonal() * es.eigenvectors().adjoint();
  Channel c;
  c.label = "random";
  for (const Mat& G : raw) c.kraus.push_back(G * inv_sqrt);
  c.validate();
  return c;
}

MeasurementOp measurement_op(const OperatorBasis& basis, int k) {
  if (k < 0 || k >= static_cast<int>(basis.ops.size()))
    throw std::invalid_argument("measurement_op: index out of range");
  MeasurementOp m;
  m.op = basis.ops[k];
  const int d = basis.dims.d;
  if (k == 0) {
    m.eigenvalues = Vec::Ones(d);
    m.eigenvectors = Mat::Identity(d, d);
    return m;
  }
  if (basis.partition && basis.partition->ok) {
    for (const auto& set : basis.partition->sets) {
      if (std::find(set.begin(), set.end(), k) == set.end()) continue;
      m.eigenvectors = joint_eigenbasis(basis, set);
      m.eigenvalues = Vec(d);
      const Mat D = m.eigenvectors.adjoint() * basis.ops[k] * m.eigenvectors;
      for (int a = 0; a < d; ++a) m.eigenvalues(a) = D(a, a);
      return m;
    }
  }
  eigen_decompose(basis.ops[k], basis.dims, m.eigenvalues, m.eigenvectors);
  return m;
}

Cx expectation(const MeasurementOp& meas, const StateDM& state) {
  return (state.rho * meas.op).trace();
}

Cx expectation(const Mat& op, const StateDM& state) {
  return (state.rho * op).trace();
}

std::vector<ShotRecord> measure_shots(const MeasurementOp& meas,
                                      const StateDM& state, int count,
                                      Stream& rng) {
  if (count < 1) throw std::invalid_argument("measure_shots: count must be >= 1");
  const int d = static_cast<int>(meas.eigenvectors.cols());
  std::vector<double> probs(d);
  double total = 0.0;
  for (int a = 0; a < d; ++a) {
    const Vec v = meas.eigenvectors.col(a);
    const double pr = std::max(0.0, v.dot(state.rho * v).real());
    probs[a] = pr;
    total += pr;
  }
  if (std::abs(total - 1.0) > kProbTol)
    throw std::runtime_error("measure_shots: Born probabilities sum to " +
                             std::to_string(total));
  std::vector<ShotRecord> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int pick = d - 1;
    for (int a = 0; a < d; ++a) {
      acc += probs[a];
      if (u < acc) {
        pick = a;
        break;
      }
    }
    ShotRecord rec;
    rec.eigenstate_index = pick;
    rec.outcome = meas.eigenvalues(pick);
    out.push_back(rec);
  }
  return out;
}

Mat process_matrix(const Channel& channel, const OperatorBasis& basis) {
  const int m = static_cast<int>(basis.ops.size());
  const int d = basis.dims.d;
  Mat chi = Mat::Zero(m, m);
  for (const Mat& K : channel.kraus) {
    Vec c(m);
    for (int i = 0; i < m; ++i)
      c(i) = (basis.ops[i].adjoint() * K).trace() / static_cast<double>(d);
    chi += c.conjugate() * c.transpose();  // chi(n, m) += conj(c_n) c_m
  }
  return chi;
}

}  // namespace quditmc
