// Command-line front end: build bases and MUB families, ingest channel
// specifications, run Monte Carlo estimates with manifests, and run the
// verification suites.  The individual commands are exposed for testing; the
// binary entry point only parses flags and dispatches.
#pragma once

#include <cstdint>
#include <string>

#include "quditmc/channel.hpp"
#include "quditmc/dims.hpp"
#include "quditmc/estimator.hpp"
#include "quditmc/operator_basis.hpp"
#include "quditmc/rng.hpp"

namespace quditmc {

// ---- target-unitary specifications ------------------------------------------
// A target spec is a '*'-separated product of per-qupit factors from
// {identity, fourier, phase}, or the whole-system specs "identity" and
// "random" (Haar draw from the given stream/seed).  Factor counts must match n.

Mat fourier_matrix(int p);          // F_{jk} = omega^{jk} / sqrt(p)
Mat phase_gate(int p);              // diag(omega^{j(j-1)/2}); diag(1, i) at p=2
Mat random_unitary(int d, Stream& rng);
Mat parse_target(const std::string& spec, const QupitDims& dims,
                 std::uint64_t seed);

// ---- commands ---------------------------------------------------------------

struct BasisOptions {
  int p = 3;
  int n = 1;
  std::string kind = "pauli";  // pauli | gellmann | hermitized
  std::string out_path;
};
int cmd_basis(const BasisOptions& opt);

struct MubOptions {
  int p = 3;
  int n = 1;
  std::string source = "partition";  // partition | explicit
  std::string out_path;
};
int cmd_mub(const MubOptions& opt);

struct EstimateOptions {
  std::string basis_path;
  std::string channel_path;
  std::string target_spec = "identity";
  std::string protocol = "entanglement";
  double epsilon = 0.05;
  double delta = 0.05;
  std::uint64_t seed = 0;
  bool seed_set = false;  // seeds are mandatory; no silent entropy
  std::string shots = "finite";
  int runs = 0;  // > 1 adds a guarantee report to the manifest
  std::string out_path;
  std::string csv_path;           // optional summary row append
  std::string distribution_path;  // optional relevance-distribution CSV
  std::string clifford_map_path;  // optional Clifford-map JSON
  bool verbose_events = false;
};
int cmd_estimate(const EstimateOptions& opt);

struct VerifyOptions {
  std::string suite;  // algebra | mub | relevance | guarantee | hierarchy
  int p = 3;
  int n = 1;
  std::uint64_t seed = 1;
  int runs = 200;
  double epsilon = 0.1;
  double delta = 0.1;
  std::string out_path;  // optional JSON report
};
int cmd_verify(const VerifyOptions& opt);

// Parse argv and dispatch; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace quditmc
