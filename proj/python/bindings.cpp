#include <pybind11/pybind11.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "dimerchain/baseline.hpp"
#include "dimerchain/engine.hpp"
#include "dimerchain/experiments.hpp"
#include "dimerchain/freefermion.hpp"
#include "dimerchain/hamiltonian.hpp"
#include "dimerchain/numerics.hpp"
#include "dimerchain/protocol.hpp"
#include "dimerchain/version.hpp"

namespace py = pybind11;
using namespace dimerchain;

namespace {

DensityMatrix as_density(const ComplexMatrix& rho) {
    return DensityMatrix(2, rho);
}

DegeneracyPolicy policy_of(bool allow_degenerate) {
    return allow_degenerate ? DegeneracyPolicy::PickDeterministic : DegeneracyPolicy::Reject;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact-diagonalization toolkit for entanglement generation on "
              "dimerized XX/XXZ spin chains";
    m.attr("__version__") = kVersion;

    py::register_exception<ZeroProbabilityError>(m, "ZeroProbabilityError", PyExc_RuntimeError);
    py::register_exception<DegenerateGroundStateError>(m, "DegenerateGroundStateError",
                                                       PyExc_RuntimeError);
    py::register_exception<ProtocolFailureError>(m, "ProtocolFailureError", PyExc_RuntimeError);

    py::enum_<Model>(m, "Model")
        .value("XX", Model::XX)
        .value("XXZ", Model::XXZ);

    py::enum_<MeasurementOutcome>(m, "MeasurementOutcome")
        .value("P00", MeasurementOutcome::P00)
        .value("P01", MeasurementOutcome::P01)
        .value("P10", MeasurementOutcome::P10)
        .value("P11", MeasurementOutcome::P11);

    py::class_<ChainSpec>(m, "ChainSpec")
        .def(py::init<Model, int, double, double, double>(), py::arg("model"),
             py::arg("n_sites"), py::arg("j_coupling") = 1.0, py::arg("delta") = 0.0,
             py::arg("anisotropy") = 0.0)
        .def_readonly("model", &ChainSpec::model)
        .def_readonly("n_sites", &ChainSpec::n_sites)
        .def_readonly("j_coupling", &ChainSpec::j_coupling)
        .def_readonly("delta", &ChainSpec::delta)
        .def_readonly("anisotropy", &ChainSpec::anisotropy)
        .def("__repr__", [](const ChainSpec& s) {
            return "ChainSpec(" + to_string(s.model) + ", N=" + std::to_string(s.n_sites) +
                   ", J=" + std::to_string(s.j_coupling) + ", delta=" + std::to_string(s.delta) +
                   ", anisotropy=" + std::to_string(s.anisotropy) + ")";
        });

    py::class_<PureState>(m, "PureState")
        .def(py::init<int, ComplexVector>(), py::arg("n_sites"), py::arg("amplitudes"))
        .def_static("basis_state", &PureState::basis_state, py::arg("n_sites"), py::arg("index"))
        .def_property_readonly("n_sites", &PureState::n_sites)
        .def_property_readonly("amplitudes",
                               [](const PureState& s) { return s.amplitudes(); });

    py::class_<LatticeParams>(m, "LatticeParams")
        .def(py::init<double, double, double, double, double>(), py::arg("j_up"),
             py::arg("j_down"), py::arg("u_up"), py::arg("u_down"), py::arg("u_updown"))
        .def("perturbative", &LatticeParams::perturbative);

    // Hamiltonians
    m.def("coupling_at", &coupling_at, py::arg("bond"), py::arg("spec"));
    m.def("build_hamiltonian",
          [](const ChainSpec& spec) { return build_hamiltonian(spec).matrix(); },
          py::arg("spec"), "Dense 2^N x 2^N Hamiltonian matrix");
    m.def("total_sz_matrix",
          [](int n_sites) { return total_sz_operator(n_sites).matrix(); }, py::arg("n_sites"));
    m.def("sector_indices", &sector_indices, py::arg("n_sites"), py::arg("sz"));
    m.def("effective_couplings",
          [](const LatticeParams& p) {
              const EffectiveCouplings c = effective_couplings(p);
              return py::make_tuple(c.j_z, c.j_perp);
          },
          py::arg("params"), "(j_z, j_perp) from the lattice parameters");

    // Engine
    m.def("ground_state",
          [](const ChainSpec& spec, bool allow_degenerate) {
              const GroundStateResult r = ground_state(spec, policy_of(allow_degenerate));
              return py::make_tuple(r.energy, r.state.amplitudes(), r.sector_sz);
          },
          py::arg("spec"), py::arg("allow_degenerate") = false,
          "(energy, amplitudes, sector_sz) of the global ground state");
    m.def("evolve",
          [](const ChainSpec& spec, const ComplexVector& psi, double t) {
              return evolve(spec, PureState(spec.n_sites, psi), t).amplitudes();
          },
          py::arg("spec"), py::arg("amplitudes"), py::arg("t"));

    // Protocol
    m.def("rotation_gate",
          [](double theta, double phi) { return rotation_gate(RotationAngles(theta, phi)); },
          py::arg("theta"), py::arg("phi") = 0.0);
    m.def("apply_local",
          [](const ComplexMatrix& gate, int site, const PureState& psi) {
              return apply_local(gate, site, psi);
          },
          py::arg("gate"), py::arg("site"), py::arg("state"));
    m.def("encode",
          [](const PureState& gs, double theta, double phi) {
              return encode(gs, RotationAngles(theta, phi));
          },
          py::arg("state"), py::arg("theta"), py::arg("phi") = 0.0);
    m.def("encode_ends",
          [](const PureState& gs, double theta_first, double phi_first, double theta_last,
             double phi_last) {
              return encode(gs, RotationAngles(theta_first, phi_first),
                            RotationAngles(theta_last, phi_last));
          },
          py::arg("state"), py::arg("theta_first"), py::arg("phi_first"),
          py::arg("theta_last"), py::arg("phi_last"),
          "Encoding with independent angles at the two ends");
    m.def("project_sites",
          [](const PureState& psi, MeasurementOutcome outcome) {
              const ProjectionResult r = project_sites(psi, outcome);
              return py::make_tuple(r.probability, r.state);
          },
          py::arg("state"), py::arg("outcome"));
    m.def("partial_trace",
          [](const PureState& psi, const std::vector<int>& keep) {
              return partial_trace(psi, keep).matrix();
          },
          py::arg("state"), py::arg("keep_sites"));
    m.def("end_pair_density",
          [](const PureState& psi) { return end_pair_density(psi).matrix(); },
          py::arg("state"));
    m.def("concurrence",
          [](const ComplexMatrix& rho) { return concurrence(as_density(rho)); },
          py::arg("rho"), "Two-qubit concurrence of a 4x4 density matrix");
    m.def("werner_fit",
          [](const ComplexMatrix& rho) {
              const WernerFit f = werner_fit(as_density(rho));
              return py::make_tuple(f.p, f.residual);
          },
          py::arg("rho"), "(p, trace-distance residual) of the Werner fit");
    m.def("run_at_time",
          [](const ChainSpec& spec, double theta, double phi, MeasurementOutcome outcome,
             double t, bool allow_degenerate) {
              const RunAtTimeResult r = run_at_time(spec, RotationAngles(theta, phi), outcome, t,
                                                    policy_of(allow_degenerate));
              return py::make_tuple(r.probability, r.concurrence);
          },
          py::arg("spec"), py::arg("theta"), py::arg("phi"), py::arg("outcome"), py::arg("t"),
          py::arg("allow_degenerate") = false);
    m.def("find_tstar",
          [](const ChainSpec& spec, double theta, double phi, MeasurementOutcome outcome,
             std::optional<double> t_max, std::optional<double> dt, bool allow_degenerate) {
              const ScanSettings scan = default_scan(spec);
              const TStarResult r =
                  find_tstar(spec, RotationAngles(theta, phi), outcome,
                             t_max.value_or(scan.t_max), dt.value_or(scan.dt),
                             policy_of(allow_degenerate));
              return py::make_tuple(r.t_star, r.concurrence, r.probability);
          },
          py::arg("spec"), py::arg("theta"), py::arg("phi"), py::arg("outcome"),
          py::arg("t_max") = py::none(), py::arg("dt") = py::none(),
          py::arg("allow_degenerate") = false,
          "(t_star, concurrence, probability) maximizing the post-selected concurrence");

    // Free fermions
    m.def("adjacency_matrix",
          [](const ChainSpec& spec) { return adjacency_matrix(spec).dense(); }, py::arg("spec"));
    m.def("fermion_spectrum",
          [](const ChainSpec& spec) {
              return spectrum_numeric(adjacency_matrix(spec)).lambdas;
          },
          py::arg("spec"), "Ascending eigenvalues of the one-particle matrix");
    m.def("fermion_spectrum_odd",
          [](const ChainSpec& spec) { return spectrum_formula_odd(spec).lambdas; },
          py::arg("spec"));
    m.def("solve_xnu",
          [](const ChainSpec& spec) {
              const XnuRoots r = solve_xnu(spec);
              return py::make_tuple(r.roots, r.max_residual, r.regime);
          },
          py::arg("spec"), "(roots, max_residual, regime) of the even-N transcendental equation");
    m.def("fermion_spectrum_even",
          [](const ChainSpec& spec) {
              const EvenSpectrumReport r = spectrum_formula_even(spec);
              py::dict out;
              out["printed"] = r.printed.lambdas;
              out["cosine_doubled"] = r.cosine_doubled.lambdas;
              out["max_dev_printed"] = r.max_dev_printed;
              out["max_dev_cosine_doubled"] = r.max_dev_cosine_doubled;
              out["root_count"] = r.roots.roots.size();
              return out;
          },
          py::arg("spec"));
    m.def("many_body_energies",
          [](const RealVector& lambdas, int max_n) {
              return many_body_energies(FermionSpectrum{lambdas, SpectrumSource::Numeric}, max_n);
          },
          py::arg("lambdas"), py::arg("max_n") = 12);

    // Baseline
    m.def("run_attaching",
          [](const ChainSpec& chain, std::optional<double> attach_coupling, bool uniform_chain,
             std::optional<double> t_max, std::optional<double> dt, bool allow_degenerate) {
              const AttachedSystemSpec aspec(chain, attach_coupling, uniform_chain);
              const ScanSettings scan = default_scan(chain);
              const AttachResult r =
                  run_attaching(aspec, t_max.value_or(scan.t_max), dt.value_or(scan.dt),
                                policy_of(allow_degenerate));
              return py::make_tuple(r.t_star, r.concurrence);
          },
          py::arg("chain"), py::arg("attach_coupling") = py::none(),
          py::arg("uniform_chain") = false, py::arg("t_max") = py::none(),
          py::arg("dt") = py::none(), py::arg("allow_degenerate") = false,
          "(t_star, concurrence) of the attached-pair comparison scheme");
}
