#include "quditmc/relevance.hpp"

#include <cmath>
#include <fstream>

#include "quditmc/estimator.hpp"

namespace quditmc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// (1/d) Tr[A^dag B] without forming the product.
Cx hs_inner(const Mat& A, const Mat& B) {
  return A.conjugate().cwiseProduct(B).sum() / static_cast<double>(A.rows());
}

// Tr[A B] without forming the product.
Cx trace_product(const Mat& A, const Mat& B) {
  return A.cwiseProduct(B.transpose()).sum();
}

Mat conjugate_by(const Mat& U, const Mat& W) { return U * W * U.adjoint(); }

Mat channel_of(const Channel& channel, const Mat& O) {
  Mat out = Mat::Zero(O.rows(), O.cols());
  for (const Mat& K : channel.kraus) out += K * O * K.adjoint();
  return out;
}

}  // namespace

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kEntanglement: return "entanglement";
    case Protocol::kTwoDesign: return "two_design";
    case Protocol::kClassical: return "classical";
  }
  return "?";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "entanglement") return Protocol::kEntanglement;
  if (name == "two_design") return Protocol::kTwoDesign;
  if (name == "classical") return Protocol::kClassical;
  throw std::invalid_argument("unknown protocol '" + name +
                              "' (expected entanglement|two_design|classical)");
}

CharacteristicTable characteristic_table(Protocol protocol, const Mat& target_U,
                                         const Channel& channel,
                                         const OperatorBasis& basis,
                                         const MubSet* mubs) {
  const int d = basis.dims.d;
  const int nops = static_cast<int>(basis.ops.size());
  CharacteristicTable table;
  table.protocol = protocol;
  if (protocol == Protocol::kEntanglement) {
    table.T = nops;
    table.state_inputs = false;
    table.chi_U = Mat(nops, nops);
    table.chi_D = Mat(nops, nops);
    for (int i = 0; i < nops; ++i) {
      const Mat ideal = conjugate_by(target_U, basis.ops[i]);
      const Mat actual = channel_of(channel, basis.ops[i]);
      for (int k = 0; k < nops; ++k) {
        table.chi_U(i, k) = hs_inner(ideal, basis.ops[k]);
        table.chi_D(i, k) = hs_inner(actual, basis.ops[k]);
      }
    }
    return table;
  }
  if (!mubs)
    throw std::invalid_argument(
        "characteristic_table: state protocols need a MubSet");
  // State inputs: MUB projectors.  two_design uses all d(d+1) states, the
  // classical protocol the 2d states of the first two bases.
  std::vector<Vec> inputs;
  const std::size_t nbases =
      protocol == Protocol::kTwoDesign ? mubs->bases.size() : 2;
  if (mubs->bases.size() < nbases)
    throw std::invalid_argument("characteristic_table: incomplete MubSet");
  for (std::size_t b = 0; b < nbases; ++b)
    for (int k = 0; k < d; ++k) inputs.push_back(mubs->bases[b].col(k));
  table.T = static_cast<int>(inputs.size());
  table.state_inputs = true;
  table.chi_U = Mat(table.T, nops);
  table.chi_D = Mat(table.T, nops);
  for (int i = 0; i < table.T; ++i) {
    const Mat rho = inputs[i] * inputs[i].adjoint();
    const Mat ideal = conjugate_by(target_U, rho);
    const Mat actual = channel_of(channel, rho);
    for (int k = 0; k < nops; ++k) {
      table.chi_U(i, k) = trace_product(basis.ops[k], ideal);
      table.chi_D(i, k) = trace_product(basis.ops[k], actual);
    }
  }
  return table;
}

RelevanceDistribution relevance_distribution(const CharacteristicTable& table) {
  const int nops = static_cast<int>(table.chi_U.cols());
  const int d2 = nops;
  RelevanceDistribution dist;
  dist.protocol = table.protocol;
  if (table.protocol == Protocol::kEntanglement) {
    dist.normalization = static_cast<double>(d2);
  } else {
    // State protocols: sum_k |Tr[W_k sigma]|^2 = d per pure input, so the
    // l2 mass over T inputs is T*d (= d^2(d+1) two_design, 2d^2 classical).
    const int d = static_cast<int>(std::llround(std::sqrt(double(d2))));
    dist.normalization = static_cast<double>(table.T) * d;
  }
  dist.probs = table.chi_U.cwiseAbs2() / dist.normalization;
  double total = 0.0;
  double pmin = 1.0, pmax = 0.0;
  for (int i = 0; i < dist.probs.rows(); ++i)
    for (int k = 0; k < dist.probs.cols(); ++k) {
      const double p = dist.probs(i, k);
      total += p;
      if (std::abs(table.chi_U(i, k)) > 1e-10) {
        dist.support.push_back({i, k, p, table.chi_U(i, k)});
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
      }
    }
  if (std::abs(total - 1.0) > 1e-8)
    throw std::runtime_error(
        "relevance_distribution: probabilities sum to " + std::to_string(total) +
        "; characteristic table is inconsistent");
  dist.uniform_flag = !dist.support.empty() && (pmax - pmin) < kUniformTol;
  return dist;
}

CliffordMap clifford_map(const Mat& target_U, const OperatorBasis& basis) {
  const int nops = static_cast<int>(basis.ops.size());
  const int p = basis.dims.p;
  CliffordMap map;
  map.phase_order = (p == 2) ? 4 : p;
  map.image.assign(nops, -1);
  map.phase.assign(nops, Cx(0, 0));
  map.phase_exp.assign(nops, 0);
  map.is_clifford = true;
  std::vector<char> used(nops, 0);
  const double step = kTwoPi / map.phase_order;
  for (int k = 0; k < nops; ++k) {
    const Mat img = conjugate_by(target_U, basis.ops[k]);
    int best = -1;
    double best_mod = 0.0;
    Cx best_c;
    for (int i = 0; i < nops; ++i) {
      const Cx c = hs_inner(basis.ops[i], img);
      if (std::abs(c) > best_mod) {
        best_mod = std::abs(c);
        best = i;
        best_c = c;
      }
    }
    map.worst_residual = std::max(map.worst_residual, std::abs(1.0 - best_mod));
    // The overlap must be a unimodular root of unity and the assignment a
    // permutation; otherwise the target is not Clifford for this basis.
    const long long e =
        std::llround(std::arg(best_c) / step);
    const int exp =
        static_cast<int>(((e % map.phase_order) + map.phase_order) %
                         map.phase_order);
    const Cx root = std::polar(1.0, step * exp);
    if (std::abs(best_c - root) > kCliffordTol || used[best]) {
      map.is_clifford = false;
      map.worst_residual = std::max(map.worst_residual, std::abs(best_c - root));
      continue;
    }
    used[best] = 1;
    map.image[k] = best;
    map.phase[k] = root;
    map.phase_exp[k] = exp;
  }
  return map;
}

HermitizedRelevance hermitized_relevance(const Mat& target_clifford,
                                         const OperatorBasis& hermitized_basis) {
  if (hermitized_basis.herm.empty())
    throw std::invalid_argument(
        "hermitized_relevance: basis carries no Hermitization structure");
  const int nops = static_cast<int>(hermitized_basis.ops.size());
  HermitizedRelevance out;
  for (int i = 0; i < nops; ++i) {
    const Mat img = conjugate_by(target_clifford, hermitized_basis.ops[i]);
    // Decompose over the (real-coefficient) Hermitized basis; a Clifford
    // image lives on exactly one conjugate pair.
    HermitizedRelevance::PairRow row;
    row.input = i;
    std::vector<std::pair<int, double>> hits;  // (index, signed real coeff)
    double total = 0.0;
    for (int k = 0; k < nops; ++k) {
      const Cx c = hs_inner(hermitized_basis.ops[k], img);
      if (std::abs(c.imag()) > kCliffordTol)
        throw std::invalid_argument(
            "hermitized_relevance: complex expansion coefficient on input " +
            std::to_string(i) + " — target is not Clifford for this basis");
      if (std::abs(c.real()) > 1e-9) hits.emplace_back(k, c.real());
      total += c.real() * c.real();
    }
    if (std::abs(total - 1.0) > 1e-8 || hits.empty() || hits.size() > 2)
      throw std::invalid_argument(
          "hermitized_relevance: target is not Clifford for this basis "
          "(input " + std::to_string(i) + " spreads over " +
          std::to_string(hits.size()) + " outputs, weight " +
          std::to_string(total) + ")");
    // Like-kind slot first (H component before Hbar); the identity row
    // degenerates to itself with its formal partner in the zero slot.
    const auto kind = hermitized_basis.herm[i].kind;
    row.k = hits[0].first;
    row.c_k = hits[0].second;
    if (hits.size() == 2) {
      row.k_bar = hits[1].first;
      row.c_k_bar = hits[1].second;
      if (hermitized_basis.herm[row.k].kind != kind) {
        std::swap(row.k, row.k_bar);
        std::swap(row.c_k, row.c_k_bar);
      }
    } else {
      row.k_bar = hermitized_basis.herm[row.k].partner;
      row.c_k_bar = 0.0;
      if (hermitized_basis.herm[row.k].kind != kind &&
          hermitized_basis.herm[row.k].kind != HermMeta::kIdentity) {
        std::swap(row.k, row.k_bar);
        std::swap(row.c_k, row.c_k_bar);
      }
    }
    row.p_k = row.c_k * row.c_k;
    row.p_k_bar = row.c_k_bar * row.c_k_bar;
    out.rows.push_back(row);
  }
  return out;
}

double expected_experiments(const RelevanceDistribution& dist,
                            const SamplingPlan& plan) {
  double acc = 0.0;
  for (const auto& ev : dist.support)
    acc += ev.prob * static_cast<double>(shot_count(std::norm(ev.chi), plan));
  return static_cast<double>(plan.L) * acc;
}

void write_distribution_csv(const std::string& path,
                            const CharacteristicTable& table,
                            const RelevanceDistribution& dist) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "i,k,re_chi,im_chi,prob\n";
  os.precision(17);
  for (const auto& ev : dist.support) {
    const Cx chi = table.chi_U(ev.input, ev.meas);
    os << ev.input << ',' << ev.meas << ',' << chi.real() << ',' << chi.imag()
       << ',' << ev.prob << '\n';
  }
}

}  // namespace quditmc
