#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <string>

#include "tsqc/analytics.hpp"
#include "tsqc/montecarlo.hpp"

namespace py = pybind11;
using namespace tsqc;

namespace {

std::string repr_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

} // namespace

PYBIND11_MODULE(_tsqc, m) {
    m.doc() = "photon-level simulator and analytics for threshold quantum cryptography";

    // ---- optics ----------------------------------------------------------
    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform01", &RandomStream::uniform01)
        .def("bernoulli", &RandomStream::bernoulli, py::arg("p"))
        .def("below", &RandomStream::below, py::arg("n"))
        .def("uniform_real", &RandomStream::uniform_real, py::arg("lo"), py::arg("hi"));

    py::class_<PolarizationState>(m, "PolarizationState")
        .def(py::init<double>(), py::arg("angle_radians"))
        .def(py::init<>())
        .def_property_readonly("angle", &PolarizationState::angle)
        .def("approx_equals", &PolarizationState::approx_equals)
        .def("__repr__", [](const PolarizationState& s) {
            return "PolarizationState(" + repr_number(s.angle()) + ")";
        });

    py::class_<RotationOp>(m, "RotationOp")
        .def(py::init([](double delta) { return RotationOp{delta}; }), py::arg("delta"))
        .def_readwrite("delta", &RotationOp::delta)
        .def("inverse", &RotationOp::inverse);

    py::enum_<Provenance>(m, "Provenance")
        .value("Signal", Provenance::Signal)
        .value("Injected", Provenance::Injected);

    py::class_<Photon>(m, "Photon")
        .def(py::init([](const PolarizationState& state, Provenance provenance) {
                 return Photon{state, provenance};
             }),
             py::arg("state"), py::arg("provenance") = Provenance::Signal)
        .def_readwrite("state", &Photon::state)
        .def_readonly("provenance", &Photon::provenance);

    py::class_<PhotonPulse>(m, "PhotonPulse")
        .def(py::init<>())
        .def(py::init<std::vector<Photon>>(), py::arg("photons"))
        .def_static("uniform_signal", &PhotonPulse::uniform_signal, py::arg("n"),
                    py::arg("state"))
        .def_property_readonly("intensity", &PhotonPulse::intensity)
        .def_property_readonly("good_count", &PhotonPulse::good_count)
        .def_property_readonly("bad_count", &PhotonPulse::bad_count)
        .def("photons", [](const PhotonPulse& p) { return p.photons(); })
        .def("add", &PhotonPulse::add);

    m.def("reduce_angle", &reduce_angle, py::arg("radians"));
    m.def("rotate", &rotate, py::arg("pulse"), py::arg("op"));
    m.def("measure_photon", &measure_photon, py::arg("photon"), py::arg("basis"),
          py::arg("rng"));

    py::enum_<SplitMode>(m, "SplitMode")
        .value("Deterministic", SplitMode::Deterministic)
        .value("Binomial", SplitMode::Binomial);

    m.def(
        "split_fraction",
        [](const PhotonPulse& pulse, double fraction, SplitMode mode, RandomStream& rng) {
            SplitResult r = split_fraction(pulse, fraction, mode, rng);
            return py::make_tuple(std::move(r.diverted), std::move(r.remainder));
        },
        py::arg("pulse"), py::arg("fraction"), py::arg("mode"), py::arg("rng"),
        "Returns (diverted, remainder).");

    py::class_<AngleSet>(m, "AngleSet")
        .def(py::init<std::size_t>(), py::arg("size_s"))
        .def_static("from_bit_width", &AngleSet::from_bit_width, py::arg("r"))
        .def_property_readonly("size", &AngleSet::size)
        .def_property_readonly("bit_width", &AngleSet::bit_width)
        .def("angle_at", &AngleSet::angle_at, py::arg("index"))
        .def("state_at", &AngleSet::state_at, py::arg("index"))
        .def("nearest_index", &AngleSet::nearest_index, py::arg("state"));

    // ---- protocol --------------------------------------------------------
    py::enum_<GMode>(m, "GMode")
        .value("Constant", GMode::Constant)
        .value("PerSession", GMode::PerSession)
        .value("WithinSession", GMode::WithinSession);

    py::class_<GPolicy>(m, "GPolicy")
        .def(py::init<>())
        .def_static("constant", &GPolicy::constant, py::arg("g"))
        .def_static("per_session", &GPolicy::per_session, py::arg("schedule"))
        .def_static("within_session", &GPolicy::within_session, py::arg("schedule"))
        .def_readwrite("mode", &GPolicy::mode)
        .def_readwrite("g_value", &GPolicy::g_value)
        .def_readwrite("g_schedule", &GPolicy::g_schedule);

    m.def("next_g", &next_g, py::arg("policy"), py::arg("session_index"),
          py::arg("stage_index"));

    py::enum_<CheckResult>(m, "CheckResult")
        .value("Pass", CheckResult::Pass)
        .value("Breach", CheckResult::Breach);

    m.def("intensity_check", &intensity_check, py::arg("expected"), py::arg("observed"),
          py::arg("g"));

    py::class_<SessionConfig>(m, "SessionConfig")
        .def(py::init<>())
        .def_readwrite("angle_set", &SessionConfig::angle_set)
        .def_readwrite("pulse_size", &SessionConfig::pulse_size)
        .def_readwrite("alpha", &SessionConfig::alpha)
        .def_readwrite("g_policy", &SessionConfig::g_policy)
        .def_readwrite("bit_to_send", &SessionConfig::bit_to_send)
        .def_readwrite("channel_loss", &SessionConfig::channel_loss)
        .def_readwrite("split_mode", &SessionConfig::split_mode)
        .def_readwrite("seed", &SessionConfig::seed)
        .def_readwrite("session_index", &SessionConfig::session_index)
        .def("validate", &SessionConfig::validate);

    py::class_<IntensityRecord>(m, "IntensityRecord")
        .def_readonly("stage", &IntensityRecord::stage)
        .def_readonly("expected", &IntensityRecord::expected)
        .def_readonly("observed", &IntensityRecord::observed)
        .def_readonly("g", &IntensityRecord::g)
        .def_readonly("result", &IntensityRecord::result);

    py::class_<PulseComposition>(m, "PulseComposition")
        .def_readonly("good", &PulseComposition::good)
        .def_readonly("bad", &PulseComposition::bad);

    py::class_<SessionOutcome>(m, "SessionOutcome")
        .def_readonly("decoded_bit", &SessionOutcome::decoded_bit)
        .def_readonly("intensity_records", &SessionOutcome::intensity_records)
        .def_readonly("breach_detected", &SessionOutcome::breach_detected)
        .def_readonly("breach_stage", &SessionOutcome::breach_stage)
        .def_readonly("final_pulse_composition", &SessionOutcome::final_pulse_composition)
        .def_readonly("diagnostic", &SessionOutcome::diagnostic);

    m.def("encode_bit", &encode_bit, py::arg("bit"), py::arg("angle_set"));

    m.def(
        "run_three_stage",
        [](const SessionConfig& config, const std::optional<AttackPlan>& attack) {
            if (attack) return run_three_stage(config, *attack);
            return run_three_stage(config);
        },
        py::arg("config"), py::arg("attack") = std::nullopt);

    m.def(
        "run_three_stage_recorded",
        [](const SessionConfig& config, const AttackPlan& attack) {
            AttackRecord record;
            SessionOutcome outcome = run_three_stage(config, attack, &record);
            return py::make_tuple(std::move(outcome), std::move(record));
        },
        py::arg("config"), py::arg("attack"), "Returns (outcome, attack_record).");

    // ---- adversary -------------------------------------------------------
    py::enum_<TomographyKind>(m, "TomographyKind")
        .value("AbstractThreshold", TomographyKind::AbstractThreshold)
        .value("PhysicalML", TomographyKind::PhysicalML);

    py::class_<TomographyModel>(m, "TomographyModel")
        .def(py::init<>())
        .def_readwrite("kind", &TomographyModel::kind)
        .def_readwrite("p_min", &TomographyModel::p_min)
        .def_readwrite("angle_set", &TomographyModel::angle_set);

    py::class_<AttackPlan>(m, "AttackPlan")
        .def(py::init<>())
        .def_readwrite("siphon_fractions", &AttackPlan::siphon_fractions)
        .def_readwrite("replace", &AttackPlan::replace)
        .def_readwrite("tomography", &AttackPlan::tomography)
        .def_readwrite("seed", &AttackPlan::seed)
        .def("validate", &AttackPlan::validate);

    py::class_<PhotonVector>(m, "PhotonVector")
        .def_readonly("good", &PhotonVector::good)
        .def_readonly("bad", &PhotonVector::bad)
        .def("__repr__", [](const PhotonVector& v) {
            return "PhotonVector(good=" + repr_number(v.good) + ", bad=" + repr_number(v.bad) + ")";
        });

    m.def(
        "intercept",
        [](const PhotonPulse& pulse, int pass_index, const AttackPlan& plan, RandomStream& rng) {
            InterceptResult r = intercept(pulse, pass_index, plan, rng);
            return py::make_tuple(std::move(r.forwarded), std::move(r.stash));
        },
        py::arg("pulse"), py::arg("pass_index"), py::arg("plan"), py::arg("rng"),
        "Returns (forwarded, stash).");

    m.def("photon_vector_after", &photon_vector_after, py::arg("n"), py::arg("alpha"),
          py::arg("passes"));

    m.def(
        "estimate_angle",
        [](const PhotonPulse& stash, const TomographyModel& model,
           const PolarizationState& true_angle, RandomStream& rng) {
            AngleEstimate e = estimate_angle(stash, model, true_angle, rng);
            return py::make_tuple(e.estimate, e.success);
        },
        py::arg("stash"), py::arg("model"), py::arg("true_angle"), py::arg("rng"),
        "Returns (estimate, success).");

    m.def("eve_stash_snr", &eve_stash_snr, py::arg("stash"));

    py::class_<PassRecord>(m, "PassRecord")
        .def_readonly("pass_index", &PassRecord::pass_index)
        .def_readonly("stash_good", &PassRecord::stash_good)
        .def_readonly("stash_bad", &PassRecord::stash_bad)
        .def_readonly("forwarded_good", &PassRecord::forwarded_good)
        .def_readonly("forwarded_bad", &PassRecord::forwarded_bad)
        .def_readonly("stash_snr", &PassRecord::stash_snr)
        .def_readonly("tomography_success", &PassRecord::tomography_success)
        .def_readonly("estimate", &PassRecord::estimate);

    py::class_<AttackRecord>(m, "AttackRecord")
        .def_readonly("passes", &AttackRecord::passes)
        .def("all_passes_succeeded", &AttackRecord::all_passes_succeeded);

    // ---- analytics ---------------------------------------------------------
    m.def("snr_uniform", &snr_uniform, py::arg("alpha"));
    m.def("snr_general", &snr_general, py::arg("a1"), py::arg("a2"), py::arg("a3"));
    m.def("critical_siphon_fraction", &critical_siphon_fraction);
    m.def("overall_intensity_fraction", &overall_intensity_fraction, py::arg("alpha"),
          py::arg("beta"));
    m.def("table1_feasible", &table1_feasible, py::arg("alpha"), py::arg("beta"), py::arg("g"));
    m.def("min_siphon_photons", &min_siphon_photons, py::arg("s"));

    py::class_<DetectorBudget>(m, "DetectorBudget")
        .def_readonly("eve_needs", &DetectorBudget::eve_needs)
        .def_readonly("source_can_use", &DetectorBudget::source_can_use);

    m.def("detector_array_budget", &detector_array_budget, py::arg("s"));

    py::enum_<ProtocolKind>(m, "ProtocolKind")
        .value("BB84", ProtocolKind::BB84)
        .value("TSQC", ProtocolKind::TSQC);

    py::class_<ThresholdClass>(m, "ThresholdClass")
        .def_readonly("p", &ThresholdClass::p)
        .def_readonly("k", &ThresholdClass::k)
        .def_readonly("n", &ThresholdClass::n)
        .def("has_threshold_property", &ThresholdClass::has_threshold_property)
        .def("__repr__", [](const ThresholdClass& t) {
            return std::to_string(t.p) + "-" + std::to_string(t.k) + "-" + std::to_string(t.n);
        });

    m.def("classify_protocol", &classify_protocol, py::arg("kind"),
          py::arg("p") = std::nullopt, py::arg("n") = std::nullopt);

    // ---- montecarlo ----------------------------------------------------------
    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("base_config", &ExperimentSpec::base_config)
        .def_readwrite("attack", &ExperimentSpec::attack)
        .def_readwrite("trials", &ExperimentSpec::trials)
        .def_readwrite("seed", &ExperimentSpec::seed)
        .def_readwrite("sweep_parameter", &ExperimentSpec::sweep_parameter)
        .def_readwrite("sweep_values", &ExperimentSpec::sweep_values);

    py::class_<CellResult>(m, "CellResult")
        .def_readonly("cell", &CellResult::cell)
        .def_readonly("detection_rate", &CellResult::detection_rate)
        .def_readonly("decode_accuracy", &CellResult::decode_accuracy)
        .def_readonly("mean_final_snr", &CellResult::mean_final_snr)
        .def_readonly("eve_success_rate", &CellResult::eve_success_rate)
        .def_readonly("trials", &CellResult::trials)
        .def_readonly("snr_excluded", &CellResult::snr_excluded)
        .def_readonly("mean_final_good", &CellResult::mean_final_good)
        .def_readonly("mean_final_bad", &CellResult::mean_final_bad)
        .def_readonly("detection_ci", &CellResult::detection_ci)
        .def_readonly("decode_ci", &CellResult::decode_ci)
        .def_readonly("eve_ci", &CellResult::eve_ci);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("cells", &ExperimentResult::cells);

    m.def("run_experiment", &run_experiment, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<WorkedExamplePass>(m, "WorkedExamplePass")
        .def_readonly("pass_index", &WorkedExamplePass::pass_index)
        .def_readonly("stream_good", &WorkedExamplePass::stream_good)
        .def_readonly("stream_bad", &WorkedExamplePass::stream_bad)
        .def_readonly("stash_good", &WorkedExamplePass::stash_good)
        .def_readonly("stash_bad", &WorkedExamplePass::stash_bad)
        .def_readonly("stash_snr", &WorkedExamplePass::stash_snr);

    py::class_<WorkedExampleTrace>(m, "WorkedExampleTrace")
        .def_readonly("initial_photons", &WorkedExampleTrace::initial_photons)
        .def_readonly("passes", &WorkedExampleTrace::passes);

    m.def("reproduce_worked_example", &reproduce_worked_example, py::arg("seed"));
    m.def("snr_curve", &snr_curve, py::arg("alpha_min"), py::arg("alpha_max"), py::arg("steps"));


#ifdef TSQC_VERSION
    m.attr("__version__") = TSQC_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
