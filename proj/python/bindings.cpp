#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <vector>

#include "revoq/cli.hpp"
#include "revoq/errors.hpp"
#include "revoq/harness.hpp"
#include "revoq/hash.hpp"
#include "revoq/pointfn.hpp"
#include "revoq/qstate.hpp"
#include "revoq/revenc.hpp"
#include "revoq/revprog.hpp"
#include "revoq/sponge.hpp"

namespace py = pybind11;
using namespace revoq;

namespace {

std::vector<std::complex<double>> amps_out(const DenseState& s) {
    return {s.amplitudes().data(), s.amplitudes().data() + s.dim()};
}

DenseState state_from(const std::vector<std::complex<double>>& amps) {
    Amplitudes v(static_cast<int64_t>(amps.size()));
    for (size_t i = 0; i < amps.size(); ++i) v(static_cast<int64_t>(i)) = amps[i];
    return DenseState(std::move(v));
}

std::vector<std::vector<std::complex<double>>> matrix_out(const DensityMatrix& m) {
    std::vector<std::vector<std::complex<double>>> out(m.dim());
    for (int64_t r = 0; r < m.dim(); ++r) {
        out[r].resize(m.dim());
        for (int64_t c = 0; c < m.dim(); ++c) out[r][c] = m.matrix()(r, c);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_revoqsim, m) {
    m.doc() = "Multi-copy revocable cryptography simulator (C++ core)";
    m.attr("__version__") = REVOQ_VERSION;

    py::register_exception<DimensionTooLarge>(m, "DimensionTooLarge");
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch");
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded");
    py::register_exception<NoQueries>(m, "NoQueries");
    py::register_exception<BadParameter>(m, "BadParameter");

    py::class_<SplitRng>(m, "SplitRng")
        .def(py::init<uint64_t>(), py::arg("seed"))
        .def("next_u64", &SplitRng::next_u64)
        .def("next_double", &SplitRng::next_double)
        .def("below", &SplitRng::below)
        .def("bits", &SplitRng::bits)
        .def("split", &SplitRng::split);

    // qstate
    py::class_<SubsetState>(m, "SubsetState")
        .def(py::init<int, std::vector<uint64_t>>(), py::arg("width"), py::arg("support"))
        .def_readonly("width", &SubsetState::width)
        .def_readonly("support", &SubsetState::support)
        .def("contains", &SubsetState::contains);

    py::class_<TupleState>(m, "TupleState")
        .def(py::init<int, std::vector<uint64_t>>(), py::arg("width"), py::arg("tuple"))
        .def_readonly("width", &TupleState::width)
        .def_readonly("tuple", &TupleState::tuple);

    py::class_<DenseState>(m, "DenseState")
        .def(py::init(&state_from), py::arg("amplitudes"))
        .def_property_readonly("dim", &DenseState::dim)
        .def_property_readonly("amplitudes", &amps_out)
        .def("norm", &DenseState::norm)
        .def("to_json", &DenseState::to_json);

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def_property_readonly("dim", &DensityMatrix::dim)
        .def_property_readonly("matrix", &matrix_out)
        .def("is_valid", &DensityMatrix::is_valid, py::arg("tol") = kTol);

    m.def("subset_to_dense", &subset_to_dense);
    m.def("tuple_to_dense", &tuple_to_dense);
    m.def("tensor_power", &tensor_power);
    m.def("project_accept_prob", &project_accept_prob);
    m.def("measure_computational", &measure_computational);
    m.def(
        "avg_subset_density",
        [](int width, int subset_size, int copies) {
            return avg_subset_density(width, subset_size, copies);
        },
        py::arg("width"), py::arg("subset_size"), py::arg("copies"));
    m.def(
        "avg_tuple_density",
        [](int width, int copies) { return avg_tuple_density(width, copies); }, py::arg("width"),
        py::arg("copies"));
    m.def("trace_distance", &trace_distance);
    m.def("pure_density", &DensityMatrix::pure);

    // perm
    py::class_<ExplicitPerm>(m, "ExplicitPerm")
        .def_property_readonly("width", &ExplicitPerm::width)
        .def("forward", &ExplicitPerm::forward)
        .def("inverse", &ExplicitPerm::inverse)
        .def_static("identity", &ExplicitPerm::identity);
    m.def("sample_random_perm", &sample_random_perm);

    py::class_<FeistelPerm>(m, "FeistelPerm")
        .def(py::init([](const std::string& key_hex, int width) {
                 return FeistelPerm(PermKey::from_hex(key_hex, width));
             }),
             py::arg("key_hex"), py::arg("width"))
        .def_property_readonly("width", &FeistelPerm::width)
        .def("forward", &FeistelPerm::forward)
        .def("inverse", &FeistelPerm::inverse);

    // revenc
    py::enum_<PermBackend>(m, "PermBackend")
        .value("KEYED", PermBackend::kKeyed)
        .value("EXPLICIT", PermBackend::kExplicit);

    py::class_<RevEncParams>(m, "RevEncParams")
        .def(py::init<int, int, int, PermBackend>(), py::arg("n"), py::arg("m"), py::arg("k"),
             py::arg("backend") = PermBackend::kKeyed)
        .def_readonly("n", &RevEncParams::n)
        .def_readonly("m", &RevEncParams::m)
        .def_readonly("k", &RevEncParams::k);

    py::class_<RevEncSecretKey>(m, "RevEncSecretKey");
    py::class_<VerificationKey>(m, "VerificationKey")
        .def_readonly("y", &VerificationKey::y);
    py::class_<Ciphertext>(m, "Ciphertext")
        .def_readonly("copies", &Ciphertext::copies)
        .def_readonly("single_copy", &Ciphertext::single_copy)
        .def_readonly("pad", &Ciphertext::pad);
    py::class_<RevokeResult>(m, "RevokeResult")
        .def_readonly("accepted", &RevokeResult::accepted)
        .def_readonly("accept_prob", &RevokeResult::accept_prob);

    m.def("keygen", &keygen);
    m.def("encrypt", &encrypt);
    m.def("decrypt", &decrypt);
    m.def("revoke",
          [](const RevEncSecretKey& sk, const VerificationKey& vk, const RevEncParams& params,
             const DenseState& returned, SplitRng& rng) {
              return revoke(sk, vk, params, returned, rng);
          });
    m.def("subset_for", &subset_for);

    // stats / harness
    py::class_<SuccessEstimate>(m, "SuccessEstimate")
        .def_readonly("trials", &SuccessEstimate::trials)
        .def_readonly("wins", &SuccessEstimate::wins)
        .def_readonly("p_hat", &SuccessEstimate::p_hat)
        .def_readonly("ci_lo", &SuccessEstimate::ci_lo)
        .def_readonly("ci_hi", &SuccessEstimate::ci_hi);
    m.def("wilson_estimate", &wilson_estimate, py::arg("wins"), py::arg("trials"),
          py::arg("z") = 3.0);

    py::class_<UnforgeParams>(m, "UnforgeParams")
        .def(py::init<int, uint64_t, int, uint64_t>(), py::arg("n"), py::arg("s"), py::arg("k"),
             py::arg("query_budget"));
    py::enum_<UnforgeStrategy>(m, "UnforgeStrategy")
        .value("MEASURE_THEN_GUESS", UnforgeStrategy::kMeasureThenGuess)
        .value("MEMBERSHIP_SCAN", UnforgeStrategy::kMembershipScan);
    py::class_<UnforgeReport>(m, "UnforgeReport")
        .def_readonly("estimate", &UnforgeReport::estimate)
        .def_readonly("mean_queries", &UnforgeReport::mean_queries)
        .def_readonly("digest", &UnforgeReport::digest);
    m.def(
        "run_unforgeability",
        [](const UnforgeParams& p, UnforgeStrategy s, uint64_t trials, SplitRng& rng) {
            return run_unforgeability(p, s, trials, rng);
        },
        py::arg("params"), py::arg("strategy"), py::arg("trials"), py::arg("rng"));
    m.def("measure_then_guess_win_prob", &measure_then_guess_win_prob);

    py::class_<ForgeParams>(m, "ForgeParams")
        .def(py::init<int, int, int>(), py::arg("n"), py::arg("m"), py::arg("k"));
    py::enum_<ForgeAdversary>(m, "ForgeAdversary")
        .value("HONEST_FULL_SCAN", ForgeAdversary::kHonestFullScan)
        .value("HONEST_NULL_POST", ForgeAdversary::kHonestNullPost);
    py::class_<ForgeReport>(m, "ForgeReport")
        .def_readonly("estimate", &ForgeReport::estimate)
        .def_readonly("extractor_failures", &ForgeReport::extractor_failures);
    m.def(
        "run_forge",
        [](const ForgeParams& p, ForgeAdversary a, uint64_t trials, SplitRng& rng) {
            return run_forge(p, a, trials, rng);
        },
        py::arg("params"), py::arg("adversary"), py::arg("trials"), py::arg("rng"));
    m.def("forge_full_scan_win_prob", &forge_full_scan_win_prob);

    // pointfn
    py::class_<PfParams>(m, "PfParams")
        .def(py::init<int, int, int, int, PermBackend>(), py::arg("lam"), py::arg("ell"),
             py::arg("n"), py::arg("k"), py::arg("backend") = PermBackend::kKeyed)
        .def_readonly("lam", &PfParams::lambda)
        .def_readonly("ell", &PfParams::ell);
    m.def("wkd_wrong_key_trial", &wkd_wrong_key_trial);

    // sponge
    py::class_<SpongeParams>(m, "SpongeParams")
        .def(py::init<int, int, uint64_t, PermBackend>(), py::arg("rate"), py::arg("capacity"),
             py::arg("table_size"), py::arg("backend") = PermBackend::kExplicit)
        .def_readonly("rate", &SpongeParams::rate)
        .def_readonly("capacity", &SpongeParams::capacity);
    py::enum_<SpongeStrategy>(m, "SpongeStrategy")
        .value("RANDOM_GUESS", SpongeStrategy::kRandomGuess)
        .value("INVERSE_PROBE", SpongeStrategy::kInverseProbe)
        .value("TABLE_EXTEND", SpongeStrategy::kTableExtend);
    py::class_<AttackReport>(m, "AttackReport")
        .def_readonly("estimate", &AttackReport::estimate)
        .def_readonly("bound", &AttackReport::bound)
        .def_readonly("mean_fresh_fraction", &AttackReport::mean_fresh_fraction);
    m.def(
        "run_attack",
        [](const SpongeParams& p, SpongeStrategy s, uint64_t budget, uint64_t trials,
           SplitRng& rng) { return run_attack(p, s, budget, trials, rng); },
        py::arg("params"), py::arg("strategy"), py::arg("query_budget"), py::arg("trials"),
        py::arg("rng"));
    m.def("bound_eval", &bound_eval, py::arg("params"), py::arg("queries"),
          py::arg("scale") = 1.0);

    // experiment dispatch (same surface as the CLI)
    m.def(
        "run_experiment",
        [](const std::string& experiment, const std::map<std::string, std::string>& params) {
            const ExperimentConfig config = parse_config(experiment, params);
            const RunManifest manifest = dispatch(config);
            return py::make_tuple(manifest.ok, manifest.transcript_digest, manifest.to_json());
        },
        py::arg("experiment"), py::arg("params"),
        "Run a named experiment; returns (ok, digest, manifest_json)");
    m.def("known_experiments", &known_experiments);
}
