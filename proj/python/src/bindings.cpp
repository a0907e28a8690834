#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stochhawkes/diagnostics.hpp"
#include "stochhawkes/em.hpp"
#include "stochhawkes/infer.hpp"
#include "stochhawkes/model.hpp"
#include "stochhawkes/simulate.hpp"

namespace py = pybind11;
using namespace stochhawkes;

namespace {

py::dict chain_to_dict(const Chain& chain) {
    py::dict out;
    py::dict draws;
    for (const auto& name : chain.parameter_names()) draws[py::str(name)] = chain.parameter(name);
    out["kind"] = std::string(to_string(chain.kind));
    out["seed"] = chain.seed;
    out["iterations"] = chain.iterations;
    out["draws"] = draws;
    out["log_likelihood"] = chain.log_likelihood;
    out["acceptance_rates"] = chain.acceptance_rates;
    out["y_posterior_mean"] = chain.y_posterior_mean;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hawkes processes with stochastic excitation";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_ValueError);

    py::class_<HawkesParams>(m, "HawkesParams")
        .def(py::init([](double a, double lambda0, double delta) {
                 HawkesParams p{a, lambda0, delta};
                 p.validate();
                 return p;
             }),
             py::arg("a"), py::arg("lambda0"), py::arg("delta"))
        .def_readwrite("a", &HawkesParams::a)
        .def_readwrite("lambda0", &HawkesParams::lambda0)
        .def_readwrite("delta", &HawkesParams::delta)
        .def("__repr__", [](const HawkesParams& p) {
            return "HawkesParams(a=" + std::to_string(p.a) + ", lambda0=" + std::to_string(p.lambda0) +
                   ", delta=" + std::to_string(p.delta) + ")";
        });

    py::class_<SdeSpec>(m, "SdeSpec")
        .def_static("constant", &SdeSpec::constant, py::arg("psi"))
        .def_static("iid_gamma", &SdeSpec::iid_gamma, py::arg("shape"), py::arg("rate"))
        .def_static("gbm", &SdeSpec::gbm, py::arg("mu"), py::arg("sigma2"), py::arg("y0"))
        .def_static("exp_langevin", &SdeSpec::exp_langevin, py::arg("k"), py::arg("mu"), py::arg("sigma2"),
                    py::arg("y0"))
        .def_property_readonly("kind", [](const SdeSpec& s) { return std::string(to_string(s.kind())); })
        .def_readwrite("y0", &SdeSpec::y0)
        .def_property_readonly("parameters", [](const SdeSpec& s) {
            py::dict out;
            const auto names = law_parameter_names(s.kind());
            const auto values = law_parameter_values(s);
            for (std::size_t i = 0; i < names.size(); ++i) out[py::str(names[i])] = values[i];
            return out;
        });

    py::class_<EventSequence>(m, "EventSequence")
        .def(py::init<std::vector<double>, double>(), py::arg("times"), py::arg("horizon"))
        .def_property_readonly("times",
                               [](const EventSequence& e) { return std::vector<double>(e.times().begin(), e.times().end()); })
        .def_property_readonly("horizon", &EventSequence::horizon)
        .def("__len__", &EventSequence::size);

    py::class_<Hyperparams>(m, "Hyperparams")
        .def(py::init<>())
        .def_readwrite("y0", &Hyperparams::y0);

    m.def(
        "simulate",
        [](const HawkesParams& params, const SdeSpec& spec, double horizon, std::uint64_t seed,
           std::optional<std::size_t> max_events, bool ogata) {
            Rng rng(seed);
            SimulationOptions opt;
            if (max_events) opt.max_events = *max_events;
            const auto sim =
                ogata ? simulate_ogata(params, spec, horizon, rng, opt) : simulate(params, spec, horizon, rng, opt);
            return py::make_tuple(sim.events, sim.contagion);
        },
        py::arg("params"), py::arg("spec"), py::arg("horizon"), py::arg("seed"), py::arg("max_events") = py::none(),
        py::arg("ogata") = false, "Returns (events, contagion levels).");

    m.def(
        "log_likelihood",
        [](const EventSequence& events, const std::vector<double>& y, const HawkesParams& params) {
            return point_process_log_likelihood(events, y, params);
        },
        py::arg("events"), py::arg("y"), py::arg("params"));

    m.def(
        "integrated_intensity",
        [](double t, const EventSequence& events, const std::vector<double>& y, const HawkesParams& params) {
            return integrated_intensity(t, events, y, params);
        },
        py::arg("t"), py::arg("events"), py::arg("y"), py::arg("params"));

    m.def(
        "branching_probabilities",
        [](std::size_t i, const EventSequence& events, const std::vector<double>& y, const HawkesParams& params) {
            return branching_probabilities(i, events, y, params);
        },
        py::arg("i"), py::arg("events"), py::arg("y"), py::arg("params"));

    m.def("em_responsibilities", &em_responsibilities, py::arg("events"), py::arg("params"), py::arg("psi"));

    m.def(
        "time_rescaling_test",
        [](const EventSequence& events, const std::vector<double>& y, const HawkesParams& params) {
            const auto r = time_rescaling_test(events, y, params);
            return py::make_tuple(r.statistic, r.p_value, r.n);
        },
        py::arg("events"), py::arg("y"), py::arg("params"), "Returns (statistic, p_value, n).");

    m.def(
        "run_mcmc",
        [](const EventSequence& events, const std::string& model, const Hyperparams& hyper, std::size_t iterations,
           std::size_t burn_in, std::size_t thin, std::uint64_t seed, bool deterministic_init) {
            McmcConfig cfg;
            cfg.iterations = iterations;
            cfg.burn_in = burn_in;
            cfg.thin = thin;
            cfg.seed = seed;
            cfg.init = deterministic_init ? InitMode::deterministic : InitMode::prior;
            Chain chain;
            {
                py::gil_scoped_release release;
                chain = run_mcmc(events, parse_sde_kind(model), hyper, cfg);
            }
            return chain_to_dict(chain);
        },
        py::arg("events"), py::arg("model"), py::arg("hyper") = Hyperparams{}, py::arg("iterations") = 20000,
        py::arg("burn_in") = 5000, py::arg("thin") = 1, py::arg("seed") = 1, py::arg("deterministic_init") = false);
}
