#include "quditmc/mub.hpp"

#include <cmath>
#include <sstream>

namespace quditmc {

namespace {

// Test whether the columns of U span the same set of rays as the columns of
// B: |B^dag U| must be a permutation matrix.  Returns the permutation through
// perm (source column k maps to target column perm[k]) and the worst modulus
// deviation through dev; a negative return means no match.
bool rays_match(const Mat& B, const Mat& U, std::vector<int>* perm,
                double* dev) {
  const int d = static_cast<int>(B.cols());
  const Eigen::MatrixXd G = (B.adjoint() * U).cwiseAbs();
  std::vector<int> map(d, -1);
  std::vector<char> used(d, 0);
  double worst = 0.0;
  for (int k = 0; k < d; ++k) {
    int row = -1;
    for (int r = 0; r < d; ++r) {
      if (G(r, k) > 0.5) {
        row = r;
        break;
      }
    }
    if (row < 0 || used[row]) return false;
    used[row] = 1;
    map[k] = row;
    worst = std::max(worst, std::abs(G(row, k) - 1.0));
    for (int r = 0; r < d; ++r)
      if (r != row) worst = std::max(worst, G(r, k));
  }
  if (worst > 1e-6) return false;
  if (perm) *perm = map;
  if (dev) *dev = worst;
  return true;
}

// Index of the family basis matching U set-wise, or -1.
int family_image(const MubSet& mubs, const Mat& U, std::vector<int>* perm,
                 double* dev) {
  for (std::size_t j = 0; j < mubs.bases.size(); ++j)
    if (rays_match(mubs.bases[j], U, perm, dev)) return static_cast<int>(j);
  return -1;
}

}  // namespace

MubSet mubs_explicit(int p) {
  if (p == 2)
    throw std::invalid_argument(
        "mubs_explicit: the explicit family needs an odd prime (at p = 2 the "
        "twisted bases coincide); use mubs_from_partition");
  const QupitDims dims = QupitDims::make(p, 1);
  const int d = dims.d;
  MubSet out;
  out.dims = dims;
  out.origin = "explicit";
  out.cyclic = true;
  out.bases.push_back(Mat::Identity(d, d));
  // s_k = sum_{i=k}^{d} i, the twist exponents.
  std::vector<long long> s(d + 1, 0);
  for (int k = 1; k <= d; ++k)
    for (int i = k; i <= d; ++i) s[k] += i;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int t = 0; t < p; ++t) {
    Mat B(d, d);
    for (int k = 1; k <= d; ++k)
      for (int l = 1; l <= d; ++l)
        B(k - 1, l - 1) =
            norm * omega_pow(dims, static_cast<long long>(l) * (d - k) +
                                       static_cast<long long>(t) * s[k]);
    out.bases.push_back(std::move(B));
  }
  return out;
}

MubSet mubs_from_partition(OperatorBasis& basis) {
  if (!basis.partition) partition_commuting(basis);
  if (!basis.partition->ok)
    throw std::invalid_argument(
        "mubs_from_partition: basis has no maximal partition (" +
        basis.partition->message + ")");
  MubSet out;
  out.dims = basis.dims;
  out.origin = "partition";
  for (const auto& set : basis.partition->sets)
    out.bases.push_back(joint_eigenbasis(basis, set));

  // The first partition set is diagonal (it contains the Z-type operators),
  // so its eigenbasis is already the computational anchor.  For odd-prime
  // single-qupit bases, canonicalize the rest onto the explicit family:
  // re-index the bases to the twist order and rephase/reorder columns to the
  // explicit representatives.  This makes the transition group literal powers
  // of one diagonal matrix for either origin.
  if (basis.dims.n == 1 && basis.dims.p > 2) {
    const MubSet ex = mubs_explicit(basis.dims.p);
    std::vector<Mat> reordered(out.bases.size());
    std::vector<char> taken(out.bases.size(), 0);
    bool all = true;
    for (std::size_t t = 0; t < ex.bases.size() && all; ++t) {
      bool hit = false;
      for (std::size_t j = 0; j < out.bases.size() && !hit; ++j) {
        if (taken[j]) continue;
        std::vector<int> perm;
        if (rays_match(out.bases[j], ex.bases[t], &perm, nullptr)) {
          // Column perm[k] of ours matches column k of the explicit basis;
          // adopt the explicit column order and phase.
          Mat canon(out.dims.d, out.dims.d);
          for (int k = 0; k < out.dims.d; ++k) {
            const Vec& v = out.bases[j].col(perm[k]);
            Cx ph = ex.bases[t].col(k).dot(v);  // conj(explicit) . ours
            ph /= std::abs(ph);
            canon.col(k) = v * std::conj(ph);
          }
          reordered[t] = std::move(canon);
          taken[j] = 1;
          hit = true;
        }
      }
      all = hit;
    }
    if (all) {
      out.bases = std::move(reordered);
      out.cyclic = true;
    }
  }
  return out;
}

double max_overlap_deviation(const MubSet& mubs) {
  const double target = 1.0 / std::sqrt(static_cast<double>(mubs.dims.d));
  double worst = 0.0;
  for (std::size_t a = 0; a < mubs.bases.size(); ++a)
    for (std::size_t b = a + 1; b < mubs.bases.size(); ++b) {
      const Mat G = (mubs.bases[a].adjoint() * mubs.bases[b]).cwiseAbs();
      worst = std::max(worst, (G.array() - target).abs().maxCoeff());
    }
  return worst;
}

bool mub_sets_match(const MubSet& A, const MubSet& B, std::vector<int>* mapping,
                    double* max_dev) {
  if (A.bases.size() != B.bases.size() || !(A.dims == B.dims)) return false;
  std::vector<int> map(A.bases.size(), -1);
  std::vector<char> used(B.bases.size(), 0);
  double worst = 0.0;
  for (std::size_t j = 0; j < A.bases.size(); ++j) {
    bool hit = false;
    for (std::size_t t = 0; t < B.bases.size() && !hit; ++t) {
      if (used[t]) continue;
      double dev = 0.0;
      if (rays_match(B.bases[t], A.bases[j], nullptr, &dev)) {
        map[j] = static_cast<int>(t);
        used[t] = 1;
        worst = std::max(worst, dev);
        hit = true;
      }
    }
    if (!hit) return false;
  }
  if (mapping) *mapping = map;
  if (max_dev) *max_dev = worst;
  return true;
}

BasisChange u_delta(const MubSet& mubs, int source, int target,
                    const std::vector<int>& perm) {
  const int nb = static_cast<int>(mubs.bases.size());
  if (source < 0 || source >= nb || target < 0 || target >= nb)
    throw std::invalid_argument("u_delta: basis index out of range");
  const int d = mubs.dims.d;
  std::vector<int> pi = perm;
  if (pi.empty()) {
    pi.resize(d);
    for (int k = 0; k < d; ++k) pi[k] = k;
  }
  if (static_cast<int>(pi.size()) != d)
    throw std::invalid_argument("u_delta: permutation size mismatch");
  Mat P = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) P(pi[k], k) = 1.0;
  BasisChange bc;
  bc.matrix = mubs.bases[target] * P * mubs.bases[source].adjoint();
  bc.source = source;
  bc.target = target;
  bc.perm = pi;
  if (mubs.cyclic && source >= 1 && target >= 1) {
    const int p = mubs.dims.p;
    bc.delta = ((target - source) % p + p) % p;
  }
  return bc;
}

FamilyActionReport verify_family_action(const MubSet& mubs, const BasisChange& bc) {
  FamilyActionReport rep;
  rep.delta = bc.delta;
  const int nb = static_cast<int>(mubs.bases.size());
  rep.image_of.assign(nb, -1);
  bool anchor_fixed = false;
  bool cycle_uniform = mubs.cyclic;
  for (int j = 0; j < nb; ++j) {
    double dev = 0.0;
    const Mat img = bc.matrix * mubs.bases[j];
    rep.image_of[j] = family_image(mubs, img, nullptr, &dev);
    rep.max_dev = std::max(rep.max_dev, dev);
    if (rep.image_of[j] < 0) {
      std::ostringstream os;
      os << "image of basis " << j << " is not a family member";
      rep.violations.push_back(os.str());
      cycle_uniform = false;
      continue;
    }
    if (j == 0) {
      anchor_fixed = rep.image_of[j] == 0;
      if (!anchor_fixed)
        rep.violations.push_back("anchor basis is not fixed");
    } else if (mubs.cyclic) {
      const int p = mubs.dims.p;
      const int expect = 1 + ((j - 1 + bc.delta) % p + p) % p;
      if (rep.image_of[j] != expect) {
        std::ostringstream os;
        os << "twist basis " << j << " maps to " << rep.image_of[j]
           << ", expected " << expect;
        rep.violations.push_back(os.str());
        cycle_uniform = false;
      }
    }
  }
  rep.ok = mubs.cyclic && anchor_fixed && cycle_uniform &&
           rep.max_dev < kOverlapTol * 1e2;
  return rep;
}

GroupLawReport verify_group_law(const MubSet& mubs) {
  if (!mubs.cyclic)
    throw std::invalid_argument(
        "verify_group_law: family has no cyclic twist labeling");
  const int p = mubs.dims.p;
  GroupLawReport rep;
  rep.ok = true;
  auto note = [&rep](const std::string& what, bool pass, double dev) {
    rep.checks.emplace_back(what, pass);
    rep.ok = rep.ok && pass;
    rep.max_dev = std::max(rep.max_dev, dev);
  };

  // Canonical transition for each displacement, built from the first twist.
  std::vector<Mat> U(p);
  for (int delta = 0; delta < p; ++delta) {
    const int target = 1 + delta;
    U[delta] = u_delta(mubs, 1, target > p ? target - p : target).matrix;
  }

  // Anchor independence: the transition from twist j to twist j + delta is
  // the same matrix for every j ("depends only on delta").
  for (int delta = 1; delta < p; ++delta) {
    double dev = 0.0;
    for (int j = 1; j <= p; ++j) {
      int t = j + delta;
      if (t > p) t -= p;
      const Mat Ujt = u_delta(mubs, j, t).matrix;
      dev = std::max(dev, (Ujt - U[delta]).cwiseAbs().maxCoeff());
    }
    std::ostringstream os;
    os << "transition for delta = " << delta << " independent of source twist";
    note(os.str(), dev < kOverlapTol, dev);
  }

  // Composition and inverse laws.
  double comp_dev = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      const Mat lhs = U[a] * U[b];
      const Mat& rhs = U[(a + b) % p];
      comp_dev = std::max(comp_dev, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  note("composition U_a U_b = U_{a+b mod p}", comp_dev < kOverlapTol, comp_dev);

  double inv_dev = 0.0;
  for (int a = 1; a < p; ++a) {
    const Mat prod = U[a] * U[p - a];
    inv_dev = std::max(
        inv_dev, (prod - Mat::Identity(mubs.dims.d, mubs.dims.d)).cwiseAbs().maxCoeff());
  }
  note("inverses U_a U_{p-a} = 1", inv_dev < kOverlapTol, inv_dev);

  // Full cycle: p-fold composition of the unit shift returns the identity
  // exactly (not merely up to a global phase).
  Mat cyc = Mat::Identity(mubs.dims.d, mubs.dims.d);
  for (int i = 0; i < p; ++i) cyc = U[1] * cyc;
  const double cyc_dev =
      (cyc - Mat::Identity(mubs.dims.d, mubs.dims.d)).cwiseAbs().maxCoeff();
  note("full-cycle composition U_1^p = 1", cyc_dev < kOverlapTol, cyc_dev);

  return rep;
}

}  // namespace quditmc
