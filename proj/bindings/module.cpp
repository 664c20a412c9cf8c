// Python bindings for the core operations: basis and MUB construction,
// Kraus channels, exact fidelity oracles, and the Monte Carlo estimator.
// Matrices cross the boundary as numpy arrays via the Eigen caster.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quditmc/cli.hpp"
#include "quditmc/estimator.hpp"
#include "quditmc/fidelity.hpp"

namespace py = pybind11;
using namespace quditmc;

namespace {

OperatorBasis make_basis(int p, int n, const std::string& kind) {
  if (kind == "pauli") return tensor_basis(gen_pauli_single(p), n);
  if (kind == "hermitized") return hermitize(tensor_basis(gen_pauli_single(p), n));
  if (kind == "gellmann") {
    if (p != 3 || n != 1)
      throw std::invalid_argument("the Gell-Mann basis is defined for p=3, n=1");
    return gell_mann_basis();
  }
  throw std::invalid_argument("unknown basis kind: " + kind);
}

MubSet make_mubs(int p, int n, const std::string& source) {
  if (source == "explicit") {
    if (n != 1) throw std::invalid_argument("the explicit family is single-qupit");
    return mubs_explicit(p);
  }
  if (source == "partition") {
    OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
    return mubs_from_partition(basis);
  }
  throw std::invalid_argument("unknown MUB source: " + source);
}

py::dict estimate_impl(const Channel& channel, const Mat& target, int p, int n,
                       const std::string& protocol, double epsilon, double delta,
                       std::uint64_t seed, const std::string& shot_mode,
                       bool hermitized) {
  const Protocol proto = protocol_from_name(protocol);
  SamplingPlan plan =
      SamplingPlan::make(epsilon, delta, seed, proto, shot_mode_from_name(shot_mode));
  OperatorBasis basis = make_basis(p, n, hermitized ? "hermitized" : "pauli");
  EstimateResult res;
  if (hermitized) {
    if (proto != Protocol::kEntanglement)
      throw std::invalid_argument(
          "the two-stage scheme estimates entanglement fidelity");
    res = run_estimate_hermitized(target, channel, basis, plan);
  } else if (proto == Protocol::kEntanglement) {
    res = run_estimate(target, channel, basis, nullptr, plan);
  } else {
    OperatorBasis pauli = tensor_basis(gen_pauli_single(p), n);
    MubSet mubs = mubs_from_partition(pauli);
    res = run_estimate(target, channel, pauli, &mubs, plan);
  }
  py::dict out;
  out["protocol"] = protocol_name(plan.protocol);
  out["shot_mode"] = shot_mode_name(plan.shot_mode);
  out["epsilon"] = plan.epsilon;
  out["delta"] = plan.delta;
  out["L"] = plan.L;
  out["seed"] = plan.seed;
  out["y_tilde"] = res.y_tilde;
  out["estimate"] = res.estimate;
  out["fe_estimate"] = res.fe_estimate;
  out["fav_estimate"] = res.fav_estimate;
  out["total_shots"] = res.total_shots;
  out["event_count"] = static_cast<long long>(res.events.size());
  if (res.oracle_value) out["oracle"] = *res.oracle_value;
  return out;
}

}  // namespace

PYBIND11_MODULE(_quditmc, m) {
  m.doc() = "Monte Carlo fidelity estimation for prime-level qudit systems";

  py::class_<Channel>(m, "Channel")
      .def_readonly("label", &Channel::label)
      .def_property_readonly(
          "kraus", [](const Channel& c) { return c.kraus; })
      .def("validate", &Channel::validate)
      .def("apply",
           [](const Channel& c, const Mat& rho) {
             return apply(c, StateDM(rho)).rho;
           },
           py::arg("rho"), "Apply the channel to a density matrix.");

  m.def("basis", [](int p, int n, const std::string& kind) {
          return make_basis(p, n, kind).ops;
        },
        py::arg("p"), py::arg("n") = 1, py::arg("kind") = "pauli",
        "Operator basis as a list of d x d matrices (ops[0] is the identity).");
  m.def("mub_family", [](int p, int n, const std::string& source) {
          return make_mubs(p, n, source).bases;
        },
        py::arg("p"), py::arg("n") = 1, py::arg("source") = "partition",
        "The d+1 mutually unbiased bases as unitary column matrices.");
  m.def("mub_overlap_deviation", [](int p, int n, const std::string& source) {
          return max_overlap_deviation(make_mubs(p, n, source));
        },
        py::arg("p"), py::arg("n") = 1, py::arg("source") = "partition",
        "Worst deviation of any cross-basis overlap modulus from 1/sqrt(d).");

  m.def("fourier", &fourier_matrix, py::arg("p"));
  m.def("phase", &phase_gate, py::arg("p"));
  m.def("target", [](const std::string& spec, int p, int n, std::uint64_t seed) {
          return parse_target(spec, QupitDims::make(p, n), seed);
        },
        py::arg("spec"), py::arg("p"), py::arg("n") = 1, py::arg("seed") = 1,
        "Parse a target-unitary spec such as 'fourier', 'random', or "
        "'fourier*phase'.");

  m.def("unitary_channel",
        [](const Mat& U) { return unitary_channel(U); }, py::arg("U"));
  m.def("depolarizing", [](double q, int p, int n) {
          return depolarizing(q, QupitDims::make(p, n));
        },
        py::arg("q"), py::arg("p"), py::arg("n") = 1);
  m.def("dephasing", [](double q, int p, int n) {
          return dephasing(q, QupitDims::make(p, n));
        },
        py::arg("q"), py::arg("p"), py::arg("n") = 1);
  m.def("compose", &compose, py::arg("first"), py::arg("second"),
        "Channel running `first` and then `second`.");
  m.def("random_channel", [](int p, int n, int kraus_count, std::uint64_t seed) {
          Stream rng(seed, {0x626e64u});
          return random_channel(QupitDims::make(p, n), kraus_count, rng);
        },
        py::arg("p"), py::arg("n") = 1, py::arg("kraus_count") = 3,
        py::arg("seed") = 1);

  m.def("entanglement_fidelity",
        [](const Channel& c, const Mat& target, int p, int n) {
          OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
          return entanglement_fidelity(c, target, basis);
        },
        py::arg("channel"), py::arg("target"), py::arg("p"), py::arg("n") = 1);
  m.def("average_fidelity",
        [](const Channel& c, const Mat& target, int p, int n) {
          OperatorBasis basis = tensor_basis(gen_pauli_single(p), n);
          return average_fidelity(c, target, basis);
        },
        py::arg("channel"), py::arg("target"), py::arg("p"), py::arg("n") = 1);
  m.def("fe_to_fav", &fe_to_fav, py::arg("fe"), py::arg("d"));
  m.def("fav_to_fe", &fav_to_fe, py::arg("fav"), py::arg("d"));

  m.def("plan_events", [](double epsilon, double delta) {
          return SamplingPlan::make(epsilon, delta, 1).L;
        },
        py::arg("epsilon"), py::arg("delta"),
        "Number of relevance-distribution draws L = ceil(1/(eps^2 delta)).");
  m.def("shot_bound_clifford", [](double epsilon, double delta) {
          return shot_bound_clifford(SamplingPlan::make(epsilon, delta, 1));
        },
        py::arg("epsilon"), py::arg("delta"));
  m.def("shot_bound_generic", [](double epsilon, double delta, int d) {
          return shot_bound_generic(SamplingPlan::make(epsilon, delta, 1), d);
        },
        py::arg("epsilon"), py::arg("delta"), py::arg("d"));

  m.def("estimate", &estimate_impl, py::arg("channel"), py::arg("target"),
        py::arg("p"), py::arg("n") = 1, py::arg("protocol") = "entanglement",
        py::arg("epsilon") = 0.05, py::arg("delta") = 0.05, py::arg("seed") = 1,
        py::arg("shot_mode") = "finite", py::arg("hermitized") = false,
        "Run the Monte Carlo estimator; returns a dict mirroring the CLI "
        "manifest fields.");
}
