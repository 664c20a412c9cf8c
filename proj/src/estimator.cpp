#include "quditmc/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "quditmc/fidelity.hpp"
#include "quditmc/rng.hpp"

namespace quditmc {

namespace {

// Stream-path tags: event drawing, shot simulation, and repeated verification
// runs must never share random substreams.
constexpr std::uint64_t kTagDraw = 0x64726177ULL;
constexpr std::uint64_t kTagShots = 0x73686f74ULL;
constexpr std::uint64_t kTagVerify = 0x76657266ULL;

// Ceiling with a snap window absorbing float noise around exact integers, so
// that e.g. 1/(0.1^2 * 0.1) yields 1000 draws and never 1001.
long long ceil_exact(double v) {
  if (!(v > 0.0)) return 1;
  if (v > 9.0e15)
    throw std::overflow_error(
        "shot budget overflows a 64-bit count; loosen epsilon/delta or avoid "
        "near-zero relevance events");
  const double r = std::nearbyint(v);
  if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(v)))
    return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(v));
}

int worker_count(long long jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("QUDITMC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && static_cast<unsigned>(v) < hw)
      hw = static_cast<unsigned>(v);
  }
  if (jobs < static_cast<long long>(hw)) hw = static_cast<unsigned>(jobs);
  return static_cast<int>(hw == 0 ? 1 : hw);
}

// Run fn(l) for l in [0, count).  Work items must be independent; any
// exception is rethrown on the calling thread.
void parallel_for(long long count, const std::function<void(long long)>& fn) {
  const int workers = worker_count(count);
  if (workers <= 1) {
    for (long long l = 0; l < count; ++l) fn(l);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const long long l = next.fetch_add(1);
        if (l >= count) return;
        try {
          fn(l);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Precomputed single-shot machinery for one (input, measurement) event:
// conditional outcome probabilities given the prepared eigenstate (one row
// per input condition), their running sums for inverse-CDF draws, the input
// eigenvalues lambda (empty when the input is a fixed state), and the
// measured eigenvalues w.
struct ShotKernel {
  Eigen::MatrixXd cdf;
  Vec in_eigs;
  Vec out_eigs;
};

Eigen::MatrixXd rows_to_cdf(const Eigen::MatrixXd& probs) {
  Eigen::MatrixXd cdf = probs;
  for (int r = 0; r < cdf.rows(); ++r) {
    double acc = 0.0;
    for (int c = 0; c < cdf.cols(); ++c) {
      acc += cdf(r, c);
      cdf(r, c) = acc;
    }
    if (std::abs(acc - 1.0) > kProbTol)
      throw std::runtime_error(
          "shot kernel: outcome probabilities sum to " + std::to_string(acc) +
          "; channel or eigenbasis is inconsistent");
  }
  return cdf;
}

int sample_row(const Eigen::MatrixXd& cdf, int row, double u) {
  const int cols = static_cast<int>(cdf.cols());
  for (int c = 0; c < cols; ++c)
    if (u < cdf(row, c)) return c;
  return cols - 1;
}

// Outcome probabilities from pure preparations |in_c> through the channel
// into the measurement eigenbasis: P(c, j) = sum_K |<out_j| K |in_c>|^2.
Eigen::MatrixXd born_table(const Channel& channel, const Mat& preparations,
                           const Mat& meas_eigenvectors) {
  Eigen::MatrixXd probs =
      Eigen::MatrixXd::Zero(preparations.cols(), meas_eigenvectors.cols());
  for (const Mat& K : channel.kraus) {
    const Mat M = meas_eigenvectors.adjoint() * (K * preparations);
    probs += M.cwiseAbs2().transpose();
  }
  return probs;
}

Cx accumulate_shots(const ShotKernel& kern, long long m, Stream& st) {
  const bool state_input = kern.in_eigs.size() == 0;
  const int conditions = static_cast<int>(kern.cdf.rows());
  Cx acc(0.0, 0.0);
  for (long long n = 0; n < m; ++n) {
    const int v = state_input ? 0 : st.uniform_int(conditions);
    const int j = sample_row(kern.cdf, v, st.uniform());
    const Cx lambda = state_input ? Cx(1.0, 0.0) : kern.in_eigs[v];
    acc += std::conj(lambda) * kern.out_eigs[j];
  }
  return acc;
}

Vec mub_input_state(const MubSet& mubs, int flat, int d) {
  return mubs.bases[static_cast<std::size_t>(flat / d)].col(flat % d);
}

double classical_mean_oracle(const Channel& channel, const Mat& target_U,
                             const MubSet& mubs) {
  const ClassicalFidelities cf = classical_fidelities(
      channel, target_U, mubs.bases.at(0), mubs.bases.at(1));
  return 0.5 * (cf.f1 + cf.f2);
}

}  // namespace

std::string shot_mode_name(ShotMode m) {
  return m == ShotMode::kExactExpectation ? "exact_expectation" : "finite_shots";
}

ShotMode shot_mode_from_name(const std::string& name) {
  if (name == "exact" || name == "exact_expectation")
    return ShotMode::kExactExpectation;
  if (name == "finite" || name == "finite_shots") return ShotMode::kFiniteShots;
  throw std::invalid_argument("unknown shot mode '" + name +
                              "' (expected exact|finite)");
}

SamplingPlan SamplingPlan::make(double epsilon, double delta,
                                std::uint64_t seed, Protocol protocol,
                                ShotMode mode) {
  SamplingPlan plan;
  plan.epsilon = epsilon;
  plan.delta = delta;
  plan.seed = seed;
  plan.protocol = protocol;
  plan.shot_mode = mode;
  plan.validate();
  plan.L = ceil_exact(1.0 / (epsilon * epsilon * delta));
  return plan;
}

void SamplingPlan::validate() const {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("sampling plan: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("sampling plan: delta must lie in (0, 1)");
  if (L < 0)
    throw std::invalid_argument("sampling plan: negative draw count");
}

long long shot_count(double chi2, const SamplingPlan& plan) {
  if (!(chi2 > 0.0))
    throw std::invalid_argument("shot_count: event weight must be positive");
  const long long L = plan.L > 0 ? plan.L : SamplingPlan::make(
      plan.epsilon, plan.delta, plan.seed, plan.protocol, plan.shot_mode).L;
  const double v = 4.0 * std::log(4.0 / plan.delta) /
                   (chi2 * static_cast<double>(L) * plan.epsilon * plan.epsilon);
  return std::max<long long>(1, ceil_exact(v));
}

double shot_bound_clifford(const SamplingPlan& plan) {
  return 1.0 + 1.0 / (plan.epsilon * plan.epsilon * plan.delta) +
         (4.0 / (plan.epsilon * plan.epsilon)) * std::log(4.0 / plan.delta);
}

double shot_bound_generic(const SamplingPlan& plan, int d) {
  return 1.0 + 1.0 / (plan.epsilon * plan.epsilon * plan.delta) +
         (4.0 * d * d / (plan.epsilon * plan.epsilon)) *
             std::log(4.0 / plan.delta);
}

std::vector<EventDraw> draw_events(const RelevanceDistribution& dist,
                                   const SamplingPlan& plan) {
  plan.validate();
  if (plan.L < 1)
    throw std::invalid_argument("draw_events: plan has no draw count; use "
                                "SamplingPlan::make");
  const std::size_t S = dist.support.size();
  if (S == 0) throw std::invalid_argument("draw_events: empty support");
  std::vector<double> cum;
  if (!dist.uniform_flag) {
    cum.reserve(S);
    double acc = 0.0;
    for (const auto& ev : dist.support) {
      acc += ev.prob;
      cum.push_back(acc);
    }
  }
  std::vector<EventDraw> events(static_cast<std::size_t>(plan.L));
  for (long long l = 0; l < plan.L; ++l) {
    Stream st(plan.seed, {kTagDraw, static_cast<std::uint64_t>(l)});
    std::size_t idx;
    if (dist.uniform_flag) {
      // Clifford shortcut: the support is uniform, so one uniform index
      // draw replaces the CDF walk.
      idx = static_cast<std::size_t>(st.uniform_int(static_cast<int>(S)));
    } else {
      const double u = st.uniform();
      idx = static_cast<std::size_t>(
          std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      if (idx >= S) idx = S - 1;
    }
    const auto& sup = dist.support[idx];
    if (std::abs(sup.chi) < 1e-12)
      throw std::runtime_error(
          "draw_events: drawn event has vanishing characteristic value; "
          "distribution and table are inconsistent");
    EventDraw& ev = events[static_cast<std::size_t>(l)];
    ev.input = sup.input;
    ev.meas = sup.meas;
    ev.beta = sup.chi;
    ev.m_l = shot_count(std::norm(sup.chi), plan);
  }
  return events;
}

namespace {

// Simulate the finite-shot stage for a drawn event list sharing one
// characteristic table.  Kernels are built serially per distinct event, then
// the per-event shot loops run in parallel on private streams.
void simulate_events(std::vector<EventDraw>& events, const Channel& channel,
                     const OperatorBasis& basis, const MubSet* mubs,
                     bool state_inputs, const SamplingPlan& plan) {
  const int d = basis.dims.d;
  std::map<std::pair<int, int>, std::size_t> kernel_of;
  std::vector<ShotKernel> kernels;
  std::vector<std::unique_ptr<MeasurementOp>> decomp(basis.ops.size());
  auto decomposition = [&](int k) -> const MeasurementOp& {
    if (!decomp[static_cast<std::size_t>(k)])
      decomp[static_cast<std::size_t>(k)] =
          std::make_unique<MeasurementOp>(measurement_op(basis, k));
    return *decomp[static_cast<std::size_t>(k)];
  };
  std::vector<std::size_t> slot(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto key = std::make_pair(events[e].input, events[e].meas);
    auto it = kernel_of.find(key);
    if (it == kernel_of.end()) {
      const MeasurementOp& mk = decomposition(key.second);
      ShotKernel kern;
      kern.out_eigs = mk.eigenvalues;
      if (state_inputs) {
        const Mat prep = mub_input_state(*mubs, key.first, d);
        kern.cdf = rows_to_cdf(born_table(channel, prep, mk.eigenvectors));
      } else {
        const MeasurementOp& mi = decomposition(key.first);
        kern.in_eigs = mi.eigenvalues;
        kern.cdf =
            rows_to_cdf(born_table(channel, mi.eigenvectors, mk.eigenvectors));
      }
      it = kernel_of.emplace(key, kernels.size()).first;
      kernels.push_back(std::move(kern));
    }
    slot[e] = it->second;
  }
  parallel_for(static_cast<long long>(events.size()), [&](long long l) {
    EventDraw& ev = events[static_cast<std::size_t>(l)];
    Stream st(plan.seed, {kTagShots, static_cast<std::uint64_t>(l)});
    const Cx acc = accumulate_shots(kernels[slot[l]], ev.m_l, st);
    ev.x_tilde = acc / (ev.beta * static_cast<double>(ev.m_l));
  });
}

}  // namespace

EstimateResult run_estimate(const Mat& target_U, const Channel& channel,
                            const OperatorBasis& basis, const MubSet* mubs,
                            const SamplingPlan& plan, bool with_oracle) {
  plan.validate();
  channel.validate();
  const int d = basis.dims.d;
  const bool state_protocol = plan.protocol != Protocol::kEntanglement;
  if (state_protocol && !mubs)
    throw std::invalid_argument("run_estimate: state protocols need a MubSet");
  const CharacteristicTable table =
      characteristic_table(plan.protocol, target_U, channel, basis, mubs);
  const RelevanceDistribution dist = relevance_distribution(table);

  EstimateResult result;
  result.plan = plan;
  result.events = draw_events(dist, plan);
  for (const EventDraw& ev : result.events) result.total_shots += ev.m_l;

  if (plan.shot_mode == ShotMode::kExactExpectation) {
    for (EventDraw& ev : result.events)
      ev.x_tilde = table.chi_D(ev.input, ev.meas) / ev.beta;
  } else {
    simulate_events(result.events, channel, basis, mubs, state_protocol, plan);
  }

  Cx y(0.0, 0.0);
  for (const EventDraw& ev : result.events) y += ev.x_tilde;
  y /= static_cast<double>(result.events.size());
  result.y_tilde = y;
  result.estimate = y.real();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (plan.protocol) {
    case Protocol::kEntanglement:
      result.fe_estimate = y.real();
      result.fav_estimate = fe_to_fav(y.real(), d);
      break;
    case Protocol::kTwoDesign:
      result.fav_estimate = y.real();
      result.fe_estimate = fav_to_fe(y.real(), d);
      break;
    case Protocol::kClassical:
      result.fe_estimate = nan;
      result.fav_estimate = nan;
      break;
  }
  if (with_oracle) {
    switch (plan.protocol) {
      case Protocol::kEntanglement:
        result.oracle_value = entanglement_fidelity(channel, target_U, basis);
        break;
      case Protocol::kTwoDesign:
        result.oracle_value = average_fidelity_2design(channel, target_U, *mubs);
        break;
      case Protocol::kClassical:
        result.oracle_value = classical_mean_oracle(channel, target_U, *mubs);
        break;
    }
  }
  return result;
}

EstimateResult run_estimate_hermitized(const Mat& target_clifford,
                                       const Channel& channel,
                                       const OperatorBasis& hermitized_basis,
                                       const SamplingPlan& plan,
                                       bool with_oracle) {
  plan.validate();
  channel.validate();
  if (plan.L < 1)
    throw std::invalid_argument(
        "run_estimate_hermitized: plan has no draw count; use "
        "SamplingPlan::make");
  if (hermitized_basis.herm.empty())
    throw std::invalid_argument(
        "run_estimate_hermitized: basis carries no Hermitization structure");
  const int d = hermitized_basis.dims.d;
  const int nops = static_cast<int>(hermitized_basis.ops.size());
  const HermitizedRelevance rel =
      hermitized_relevance(target_clifford, hermitized_basis);

  EstimateResult result;
  result.plan = plan;
  result.events.resize(static_cast<std::size_t>(plan.L));
  for (long long l = 0; l < plan.L; ++l) {
    Stream st(plan.seed, {kTagDraw, static_cast<std::uint64_t>(l)});
    // Stage 1: uniform input index.  Stage 2: binary draw inside the
    // conjugate pair with probabilities c_k^2 / c_k_bar^2.
    const int i = st.uniform_int(nops);
    const auto& row = rel.rows[static_cast<std::size_t>(i)];
    const double u = st.uniform();
    const bool first = u < row.p_k;
    const int s = first ? row.k : row.k_bar;
    const double c = first ? row.c_k : row.c_k_bar;
    EventDraw& ev = result.events[static_cast<std::size_t>(l)];
    ev.input = i;
    ev.meas = s;
    ev.beta = Cx(c, 0.0);
    ev.m_l = shot_count(c * c, plan);
    result.total_shots += ev.m_l;
  }

  if (plan.shot_mode == ShotMode::kExactExpectation) {
    std::map<int, Mat> images;
    for (EventDraw& ev : result.events) {
      auto it = images.find(ev.input);
      if (it == images.end()) {
        Mat out = Mat::Zero(d, d);
        for (const Mat& K : channel.kraus)
          out += K *
                 hermitized_basis.ops[static_cast<std::size_t>(ev.input)] *
                 K.adjoint();
        it = images.emplace(ev.input, std::move(out)).first;
      }
      const Cx alpha =
          hermitized_basis.ops[static_cast<std::size_t>(ev.meas)]
              .conjugate()
              .cwiseProduct(it->second)
              .sum() /
          static_cast<double>(d);
      ev.x_tilde = alpha / ev.beta;
    }
  } else {
    simulate_events(result.events, channel, hermitized_basis, nullptr,
                    /*state_inputs=*/false, plan);
  }

  Cx y(0.0, 0.0);
  for (const EventDraw& ev : result.events) y += ev.x_tilde;
  y /= static_cast<double>(result.events.size());
  result.y_tilde = y;
  result.estimate = y.real();
  result.fe_estimate = y.real();
  result.fav_estimate = fe_to_fav(y.real(), d);
  if (with_oracle)
    result.oracle_value =
        entanglement_fidelity(channel, target_clifford, hermitized_basis);
  return result;
}

namespace {

GuaranteeReport guarantee_loop(
    const SamplingPlan& plan, int runs, double oracle,
    const std::function<double(const SamplingPlan&)>& one_run) {
  if (runs < 1)
    throw std::invalid_argument("verify_guarantee: need at least one run");
  GuaranteeReport rep;
  rep.runs = runs;
  rep.epsilon = plan.epsilon;
  rep.threshold = plan.delta + 2.0 * std::sqrt(plan.delta / runs);
  rep.oracle_value = oracle;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < runs; ++r) {
    SamplingPlan sub = plan;
    sub.seed = derive_key({plan.seed, kTagVerify,
                           static_cast<std::uint64_t>(r)});
    const double est = one_run(sub);
    if (std::abs(est - oracle) >= plan.epsilon) ++rep.failures;
    sum += est;
    sumsq += est * est;
  }
  rep.failure_fraction =
      static_cast<double>(rep.failures) / static_cast<double>(runs);
  rep.mean_estimate = sum / runs;
  if (runs > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * sum / runs) / (runs - 1));
    rep.sample_sd = std::sqrt(var);
  }
  rep.ok = rep.failure_fraction <= rep.threshold;
  return rep;
}

}  // namespace

GuaranteeReport verify_guarantee(const Mat& target_U, const Channel& channel,
                                 const OperatorBasis& basis, const MubSet* mubs,
                                 const SamplingPlan& plan, int runs) {
  const int d = basis.dims.d;
  double oracle = 0.0;
  switch (plan.protocol) {
    case Protocol::kEntanglement:
      oracle = fe_to_fav(entanglement_fidelity(channel, target_U, basis), d);
      break;
    case Protocol::kTwoDesign:
      if (!mubs)
        throw std::invalid_argument("verify_guarantee: two_design needs MUBs");
      oracle = average_fidelity_2design(channel, target_U, *mubs);
      break;
    case Protocol::kClassical:
      if (!mubs)
        throw std::invalid_argument("verify_guarantee: classical needs MUBs");
      oracle = classical_mean_oracle(channel, target_U, *mubs);
      break;
  }
  double total_shots = 0.0;
  GuaranteeReport rep = guarantee_loop(
      plan, runs, oracle, [&](const SamplingPlan& sub) {
        const EstimateResult res =
            run_estimate(target_U, channel, basis, mubs, sub, false);
        total_shots += static_cast<double>(res.total_shots);
        return sub.protocol == Protocol::kClassical ? res.estimate
                                                    : res.fav_estimate;
      });
  rep.mean_total_shots = total_shots / runs;
  return rep;
}

GuaranteeReport verify_guarantee_hermitized(
    const Mat& target_clifford, const Channel& channel,
    const OperatorBasis& hermitized_basis, const SamplingPlan& plan,
    int runs) {
  const int d = hermitized_basis.dims.d;
  const double oracle = fe_to_fav(
      entanglement_fidelity(channel, target_clifford, hermitized_basis), d);
  double total_shots = 0.0;
  GuaranteeReport rep = guarantee_loop(
      plan, runs, oracle, [&](const SamplingPlan& sub) {
        const EstimateResult res = run_estimate_hermitized(
            target_clifford, channel, hermitized_basis, sub, false);
        total_shots += static_cast<double>(res.total_shots);
        return res.fav_estimate;
      });
  rep.mean_total_shots = total_shots / runs;
  return rep;
}

}  // namespace quditmc
