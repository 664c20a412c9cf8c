#include "quditmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "quditmc/fidelity.hpp"
#include "quditmc/io.hpp"
#include "quditmc/mub.hpp"
#include "quditmc/relevance.hpp"

namespace quditmc {

namespace {

constexpr std::uint64_t kTagTarget = 0x74726774ULL;

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c)
      out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

OperatorBasis build_basis(int p, int n, const std::string& kind) {
  if (kind == "pauli") return tensor_basis(gen_pauli_single(p), n);
  if (kind == "gellmann") {
    if (p != 3)
      throw std::invalid_argument(
          "the Gell-Mann basis is the 3-level SU(3) generator set; use -p 3");
    return tensor_basis(gell_mann_basis(), n);
  }
  if (kind == "hermitized")
    return hermitize(tensor_basis(gen_pauli_single(p), n));
  throw std::invalid_argument("unknown basis kind '" + kind +
                              "' (expected pauli|gellmann|hermitized)");
}

Mat n_fold(const Mat& factor, int n) {
  Mat out = factor;
  for (int j = 1; j < n; ++j) out = kron(out, factor);
  return out;
}

bool file_nonempty(const std::string& path) {
  std::ifstream is(path);
  return is.good() && is.peek() != std::ifstream::traits_type::eof();
}

}  // namespace

// ---- target-unitary specifications ------------------------------------------

Mat fourier_matrix(int p) {
  const QupitDims dims = QupitDims::make(p, 1);
  Mat F(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k)
      F(j, k) = omega_pow(dims, static_cast<long long>(j) * k) /
                std::sqrt(static_cast<double>(p));
  return F;
}

Mat phase_gate(int p) {
  const QupitDims dims = QupitDims::make(p, 1);
  Mat S = Mat::Zero(p, p);
  if (p == 2) {
    S(0, 0) = Cx(1.0, 0.0);
    S(1, 1) = Cx(0.0, 1.0);
    return S;
  }
  for (int j = 0; j < p; ++j)
    S(j, j) = omega_pow(dims, static_cast<long long>(j) * (j - 1) / 2);
  return S;
}

Mat random_unitary(int d, Stream& rng) {
  Mat G(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      G(r, c) = Cx(normal(rng), normal(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  const Mat R = qr.matrixQR().template triangularView<Eigen::Upper>();
  // Fix the diagonal phases of R so the distribution is Haar.
  for (int c = 0; c < d; ++c) {
    const Cx r = R(c, c);
    const Cx ph = std::abs(r) > 0 ? r / std::abs(r) : Cx(1.0, 0.0);
    Q.col(c) *= ph;
  }
  return Q;
}

Mat parse_target(const std::string& spec, const QupitDims& dims,
                 std::uint64_t seed) {
  if (spec == "identity") return Mat::Identity(dims.d, dims.d);
  if (spec == "random") {
    Stream st(seed, {kTagTarget});
    return random_unitary(dims.d, st);
  }
  const std::vector<std::string> factors = split(spec, '*');
  if (static_cast<int>(factors.size()) != dims.n)
    throw std::invalid_argument(
        "target spec '" + spec + "' has " + std::to_string(factors.size()) +
        " factor(s) but the system has n = " + std::to_string(dims.n) +
        " qupits; join per-qupit factors with '*'");
  Mat out;
  for (int j = 0; j < dims.n; ++j) {
    Mat f;
    const std::string& tok = factors[static_cast<std::size_t>(j)];
    if (tok == "identity")
      f = Mat::Identity(dims.p, dims.p);
    else if (tok == "fourier")
      f = fourier_matrix(dims.p);
    else if (tok == "phase")
      f = phase_gate(dims.p);
    else
      throw std::invalid_argument(
          "unknown target factor '" + tok +
          "' (expected identity|fourier|phase, or the whole-system specs "
          "identity|random)");
    out = (j == 0) ? f : kron(out, f);
  }
  return out;
}

// ---- cmd_basis --------------------------------------------------------------

int cmd_basis(const BasisOptions& opt) {
  OperatorBasis basis = build_basis(opt.p, opt.n, opt.kind);
  partition_commuting(basis);
  const HierarchyClass hier = classify_hierarchy(basis);
  const std::string path =
      opt.out_path.empty()
          ? (opt.kind + "_p" + std::to_string(opt.p) + "_n" +
             std::to_string(opt.n) + ".basis.json")
          : opt.out_path;
  write_basis(path, basis, &hier);
  std::cout << "wrote " << path << " (class " << hier.label << ", partition "
            << (basis.partition && basis.partition->ok ? "ok" : "absent")
            << ", " << basis.ops.size() << " operators)\n";
  return 0;
}

// ---- cmd_mub ----------------------------------------------------------------

int cmd_mub(const MubOptions& opt) {
  MubSet mubs;
  if (opt.source == "explicit") {
    if (opt.n != 1)
      throw std::invalid_argument(
          "the explicit construction is single-qupit; use --from partition "
          "for n > 1");
    mubs = mubs_explicit(opt.p);
  } else if (opt.source == "partition") {
    OperatorBasis basis = tensor_basis(gen_pauli_single(opt.p), opt.n);
    mubs = mubs_from_partition(basis);
  } else {
    throw std::invalid_argument("unknown MUB source '" + opt.source +
                                "' (expected partition|explicit)");
  }
  const std::string path =
      opt.out_path.empty()
          ? ("mub_p" + std::to_string(opt.p) + "_n" + std::to_string(opt.n) +
             ".mub.json")
          : opt.out_path;
  write_mubs(path, mubs);
  std::cout << "wrote " << path << " (" << mubs.bases.size()
            << " bases, origin " << mubs.origin << ", max overlap deviation "
            << max_overlap_deviation(mubs) << ")\n";
  return 0;
}

// ---- cmd_estimate -----------------------------------------------------------

int cmd_estimate(const EstimateOptions& opt) {
  if (!opt.seed_set)
    throw std::invalid_argument(
        "estimate: --seed is required; runs must be reproducible");
  OperatorBasis basis = read_basis(opt.basis_path);
  const double ortho = orthonormality_deviation(basis);
  if (ortho > kOrthoTol)
    throw std::runtime_error("basis file " + opt.basis_path +
                             " fails orthonormality (deviation " +
                             std::to_string(ortho) + ")");
  const QupitDims dims = basis.dims;
  const Channel channel = read_channel(opt.channel_path, dims);
  const Mat target = parse_target(opt.target_spec, dims, opt.seed);
  const Protocol protocol = protocol_from_name(opt.protocol);
  const ShotMode mode = shot_mode_from_name(opt.shots);
  const SamplingPlan plan =
      SamplingPlan::make(opt.epsilon, opt.delta, opt.seed, protocol, mode);

  if (!basis.partition) partition_commuting(basis);
  std::optional<MubSet> mubs;
  const bool state_protocol = protocol != Protocol::kEntanglement;
  if (state_protocol) {
    if (!basis.partition->ok)
      throw std::runtime_error(
          "the " + protocol_name(protocol) +
          " protocol needs the d+1 mutually unbiased eigenbases of a maximal "
          "commuting partition, and this basis does not admit one (" +
          basis.partition->message +
          "); use the entanglement protocol or a partitioning basis");
    mubs = mubs_from_partition(basis);
  }

  const bool two_stage = !basis.herm.empty() && !state_protocol;
  const bool with_oracle = dims.d <= 32;
  const EstimateResult result =
      two_stage
          ? run_estimate_hermitized(target, channel, basis, plan, with_oracle)
          : run_estimate(target, channel, basis, mubs ? &*mubs : nullptr, plan,
                         with_oracle);

  Json manifest = estimate_manifest(result, opt.verbose_events);
  if (opt.runs > 1) {
    const GuaranteeReport rep =
        two_stage
            ? verify_guarantee_hermitized(target, channel, basis, plan,
                                          opt.runs)
            : verify_guarantee(target, channel, basis,
                               mubs ? &*mubs : nullptr, plan, opt.runs);
    manifest["guarantee"] = guarantee_to_json(rep);
  }

  if (!opt.clifford_map_path.empty()) {
    const OperatorBasis pauli =
        basis.herm.empty() ? basis
                           : tensor_basis(gen_pauli_single(dims.p), dims.n);
    write_json_file(opt.clifford_map_path,
                    clifford_map_to_json(clifford_map(target, pauli)));
  }
  if (!opt.distribution_path.empty()) {
    const CharacteristicTable table = characteristic_table(
        protocol, target, channel, basis, mubs ? &*mubs : nullptr);
    write_distribution_csv(opt.distribution_path, table,
                           relevance_distribution(table));
  }

  if (opt.out_path.empty()) {
    std::cout << manifest.dump(2) << '\n';
  } else {
    write_json_file(opt.out_path, manifest);
    std::ostringstream line;
    line.precision(10);
    line << "estimate " << result.estimate << " (fav " << result.fav_estimate;
    if (result.oracle_value) line << ", oracle " << *result.oracle_value;
    line << "), " << result.total_shots << " shots -> " << opt.out_path;
    std::cout << line.str() << '\n';
  }
  if (!opt.csv_path.empty()) {
    const bool add_header = !file_nonempty(opt.csv_path);
    std::ofstream os(opt.csv_path, std::ios::app);
    if (!os)
      throw std::runtime_error("cannot open " + opt.csv_path + " for append");
    if (add_header) os << estimate_csv_header() << '\n';
    os << estimate_csv_row(result) << '\n';
  }
  return 0;
}

// ---- cmd_verify -------------------------------------------------------------

namespace {

struct CheckList {
  Json checks = Json::array();
  bool ok = true;

  void add(const std::string& name, bool pass, double value) {
    checks.push_back(Json{{"check", name}, {"pass", pass}, {"value", value}});
    ok = ok && pass;
  }
  void add(const std::string& name, bool pass) {
    checks.push_back(Json{{"check", name}, {"pass", pass}});
    ok = ok && pass;
  }
};

CheckList suite_algebra(int p, int n) {
  CheckList cl;
  OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
  cl.add("orthonormality", orthonormality_deviation(basis) <= kOrthoTol,
         orthonormality_deviation(basis));
  double trace_dev = 0.0, unit_dev = 0.0, power_dev = 0.0;
  const int d = basis.dims.d;
  const Mat eye = Mat::Identity(d, d);
  for (std::size_t i = 0; i < basis.ops.size(); ++i) {
    const Mat& W = basis.ops[i];
    if (i > 0) trace_dev = std::max(trace_dev, std::abs(W.trace()));
    unit_dev = std::max(unit_dev, (W.adjoint() * W - eye).cwiseAbs().maxCoeff());
    Mat power = eye;
    for (int e = 0; e < p; ++e) power = power * W;
    const Cx c = canonical_phase(W, basis.dims);
    Cx cp(1.0, 0.0);
    for (int e = 0; e < p; ++e) cp *= c;
    power_dev = std::max(power_dev, (power - cp * eye).cwiseAbs().maxCoeff());
  }
  cl.add("tracelessness", trace_dev <= kOrthoTol, trace_dev);
  cl.add("unitarity", unit_dev <= kOrthoTol, unit_dev);
  cl.add("p_th_power_scalar", power_dev <= kOrthoTol, power_dev);
  return cl;
}

CheckList suite_mub(int p, int n) {
  CheckList cl;
  OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
  const PartitionResult part = partition_commuting(basis);
  cl.add("partition_d_plus_1_sets",
         part.ok && static_cast<int>(part.sets.size()) == basis.dims.d + 1);
  MubSet mubs = mubs_from_partition(basis);
  cl.add("overlap_moduli_1_over_sqrt_d",
         max_overlap_deviation(mubs) <= kOverlapTol,
         max_overlap_deviation(mubs));
  if (p != 2 && n == 1) {
    const MubSet ex = mubs_explicit(p);
    cl.add("explicit_overlap_moduli", max_overlap_deviation(ex) <= kOverlapTol,
           max_overlap_deviation(ex));
    double dev = 0.0;
    std::vector<int> mapping;
    cl.add("explicit_matches_partition",
           mub_sets_match(ex, mubs, &mapping, &dev), dev);
    const GroupLawReport grp = verify_group_law(mubs);
    cl.add("transition_group_law", grp.ok, grp.max_dev);
  }
  return cl;
}

CheckList suite_relevance(int p, int n, std::uint64_t seed) {
  CheckList cl;
  OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
  partition_commuting(basis);
  MubSet mubs = mubs_from_partition(basis);
  const Channel noise = depolarizing(0.2, basis.dims);
  const int d = basis.dims.d;
  for (const Protocol protocol :
       {Protocol::kEntanglement, Protocol::kTwoDesign, Protocol::kClassical}) {
    double worst = 0.0;
    bool all_ok = true;
    for (int t = 0; t < 20; ++t) {
      Stream st(seed, {0x756eULL, static_cast<std::uint64_t>(t)});
      const Mat U = random_unitary(d, st);
      try {
        const CharacteristicTable table =
            characteristic_table(protocol, U, noise, basis, &mubs);
        const RelevanceDistribution dist = relevance_distribution(table);
        worst = std::max(worst, std::abs(dist.probs.sum() - 1.0));
      } catch (const std::exception&) {
        all_ok = false;
      }
    }
    cl.add("prob_sum_random_" + protocol_name(protocol), all_ok && worst <= 1e-9,
           worst);
  }
  std::vector<std::string> targets;
  if (n == 1) {
    targets = {"fourier", "phase"};
  } else {
    std::string f = "fourier", ph = "phase", mix = "fourier";
    for (int j = 1; j < n; ++j) {
      f += "*fourier";
      ph += "*phase";
      mix += (j == 1 ? "*phase" : "*identity");
    }
    targets = {f, ph, mix};
  }
  for (const std::string& spec : targets) {
    const Mat U = parse_target(spec, basis.dims, seed);
    const CliffordMap map = clifford_map(U, basis);
    cl.add("clifford_" + spec, map.is_clifford, map.worst_residual);
    for (const Protocol protocol :
         {Protocol::kEntanglement, Protocol::kTwoDesign, Protocol::kClassical}) {
      const CharacteristicTable table =
          characteristic_table(protocol, U, noise, basis, &mubs);
      const RelevanceDistribution dist = relevance_distribution(table);
      const std::size_t expected =
          protocol == Protocol::kEntanglement
              ? static_cast<std::size_t>(d) * d
              : static_cast<std::size_t>(table.T) * d;
      cl.add("uniform_support_" + protocol_name(protocol) + "_" + spec,
             dist.uniform_flag && dist.support.size() == expected,
             static_cast<double>(dist.support.size()));
    }
  }
  return cl;
}

CheckList suite_guarantee(int p, int n, std::uint64_t seed, int runs,
                          double epsilon, double delta) {
  CheckList cl;
  OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
  const Mat target = n_fold(fourier_matrix(p), n);
  const Channel channel =
      compose(unitary_channel(target, "target"), depolarizing(0.1, basis.dims));
  const SamplingPlan plan = SamplingPlan::make(epsilon, delta, seed,
                                               Protocol::kEntanglement,
                                               ShotMode::kFiniteShots);
  const GuaranteeReport rep =
      verify_guarantee(target, channel, basis, nullptr, plan, runs);
  cl.add("failure_fraction_within_slack", rep.ok, rep.failure_fraction);
  cl.add("oracle_fav", true, rep.oracle_value);
  cl.add("mean_estimate", true, rep.mean_estimate);
  cl.add("threshold", true, rep.threshold);
  return cl;
}

CheckList suite_hierarchy(int p, int n) {
  CheckList cl;
  {
    OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
    const HierarchyClass h = classify_hierarchy(basis);
    cl.add("pauli_class_D", h.label == 'D');
  }
  if (p == 3) {
    OperatorBasis basis = tensor_basis(gell_mann_basis(), n);
    const HierarchyClass h = classify_hierarchy(basis);
    cl.add("gellmann_class_A", h.label == 'A');
  }
  if (p != 2) {
    OperatorBasis basis = hermitize(tensor_basis(gen_pauli_single(p), n));
    const HierarchyClass h = classify_hierarchy(basis);
    cl.add("hermitized_class_E", h.label == 'E');
  }
  return cl;
}

}  // namespace

int cmd_verify(const VerifyOptions& opt) {
  CheckList cl;
  if (opt.suite == "algebra")
    cl = suite_algebra(opt.p, opt.n);
  else if (opt.suite == "mub")
    cl = suite_mub(opt.p, opt.n);
  else if (opt.suite == "relevance")
    cl = suite_relevance(opt.p, opt.n, opt.seed);
  else if (opt.suite == "guarantee")
    cl = suite_guarantee(opt.p, opt.n, opt.seed, opt.runs, opt.epsilon,
                         opt.delta);
  else if (opt.suite == "hierarchy")
    cl = suite_hierarchy(opt.p, opt.n);
  else
    throw std::invalid_argument(
        "unknown suite '" + opt.suite +
        "' (expected algebra|mub|relevance|guarantee|hierarchy)");
  Json report{{"suite", opt.suite}, {"p", opt.p},       {"n", opt.n},
              {"ok", cl.ok},        {"checks", cl.checks}};
  if (!opt.out_path.empty()) write_json_file(opt.out_path, report);
  std::cout << report.dump(2) << '\n';
  return cl.ok ? 0 : 1;
}

// ---- dispatch ---------------------------------------------------------------

int run_cli(int argc, char** argv) {
  CLI::App app{"Monte Carlo average-fidelity estimation for qupit operations"};
  app.require_subcommand(1);

  BasisOptions bopt;
  CLI::App* basis = app.add_subcommand(
      "basis", "Build an operator basis and write a .basis.json file");
  basis->add_option("-p", bopt.p, "prime qupit level")->required();
  basis->add_option("-n", bopt.n, "number of qupits")->default_val(1);
  basis->add_option("--kind", bopt.kind, "pauli|gellmann|hermitized")
      ->default_val("pauli");
  basis->add_option("-o,--out", bopt.out_path, "output path");

  MubOptions mopt;
  CLI::App* mub = app.add_subcommand(
      "mub", "Build a MUB family and write a .mub.json file");
  mub->add_option("-p", mopt.p, "prime qupit level")->required();
  mub->add_option("-n", mopt.n, "number of qupits")->default_val(1);
  mub->add_option("--from", mopt.source, "partition|explicit")
      ->default_val("partition");
  mub->add_option("-o,--out", mopt.out_path, "output path");

  EstimateOptions eopt;
  CLI::App* est = app.add_subcommand(
      "estimate", "Run a Monte Carlo fidelity estimate and write a manifest");
  est->add_option("--basis", eopt.basis_path, ".basis.json input")->required();
  est->add_option("--channel", eopt.channel_path, ".channel.json input")
      ->required();
  est->add_option("--target", eopt.target_spec,
                  "target unitary spec (identity|random or '*'-joined "
                  "identity|fourier|phase factors)")
      ->default_val("identity");
  est->add_option("--protocol", eopt.protocol,
                  "entanglement|two_design|classical")
      ->default_val("entanglement");
  est->add_option("--epsilon", eopt.epsilon, "additive error target")
      ->default_val(0.05);
  est->add_option("--delta", eopt.delta, "failure probability")
      ->default_val(0.05);
  est->add_option("--seed", eopt.seed, "RNG seed (required)")->required();
  est->add_option("--shots", eopt.shots, "exact|finite")->default_val("finite");
  est->add_option("--runs", eopt.runs,
                  "optional repeated-run count for a guarantee report");
  est->add_option("-o,--out", eopt.out_path, "manifest path (stdout if unset)");
  est->add_option("--csv", eopt.csv_path, "append a summary row to this CSV");
  est->add_option("--distribution", eopt.distribution_path,
                  "write the relevance distribution CSV here");
  est->add_option("--clifford-map", eopt.clifford_map_path,
                  "write the Clifford permutation table JSON here");
  est->add_flag("--verbose-events", eopt.verbose_events,
                "include per-event records in the manifest");

  VerifyOptions vopt;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run an invariant suite; exit status 0 iff all checks pass");
  verify->add_option("suite", vopt.suite,
                     "algebra|mub|relevance|guarantee|hierarchy")
      ->required();
  verify->add_option("-p", vopt.p, "prime qupit level")->default_val(3);
  verify->add_option("-n", vopt.n, "number of qupits")->default_val(1);
  verify->add_option("--seed", vopt.seed, "RNG seed")->default_val(1);
  verify->add_option("--runs", vopt.runs, "guarantee-suite run count")
      ->default_val(200);
  verify->add_option("--epsilon", vopt.epsilon, "guarantee-suite epsilon")
      ->default_val(0.1);
  verify->add_option("--delta", vopt.delta, "guarantee-suite delta")
      ->default_val(0.1);
  verify->add_option("-o,--out", vopt.out_path, "optional JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*basis) return cmd_basis(bopt);
    if (*mub) return cmd_mub(mopt);
    if (*est) {
      eopt.seed_set = true;  // enforced by the required flag above
      return cmd_estimate(eopt);
    }
    if (*verify) return cmd_verify(vopt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}

}  // namespace quditmc
