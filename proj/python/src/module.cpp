#include <sftrec/brackets.hpp>
#include <sftrec/sampling.hpp>
#include <sftrec/suites.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sftrec;

namespace {

std::optional<std::filesystem::path> path_or_none(const std::optional<std::string>& p)
{
    if (!p) return std::nullopt;
    return std::filesystem::path(*p);
}

TargetModel model_for(const std::string& target)
{
    if (target == "point") return TargetModel::point();
    if (target == "toy") return TargetModel::p1_toy();
    return io::load_model(target);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "exact checks of SFT recursion identities";

    // translators run newest first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

    m.def(
        "run_suite",
        [](const std::string& name, int samples, unsigned seed, int K, int levels, const std::string& target, int max_points,
           int trunc_t, int max_degree, int n, int jobs, std::optional<std::string> model, std::optional<std::string> counts,
           std::optional<std::string> profile, std::optional<std::string> ledger, bool timings) {
            SuiteOptions o;
            o.samples = samples;
            o.seed = seed;
            o.K = K;
            o.levels = levels;
            o.target = target;
            o.max_points = max_points;
            o.trunc_t = trunc_t;
            o.max_degree = max_degree;
            o.n = n;
            o.jobs = jobs;
            o.model = path_or_none(model);
            o.counts = path_or_none(counts);
            o.profile = path_or_none(profile);
            o.ledger = path_or_none(ledger);
            VerificationReport r;
            {
                py::gil_scoped_release nogil;
                r = run_suite(name, o);
            }
            return to_json(r, timings).dump();
        },
        py::arg("name"), py::arg("samples") = 1000, py::arg("seed") = 1u, py::arg("K") = 6, py::arg("levels") = 3,
        py::arg("target") = "all", py::arg("max_points") = 8, py::arg("trunc_t") = 5, py::arg("max_degree") = 2,
        py::arg("n") = 5, py::arg("jobs") = 1, py::arg("model") = py::none(), py::arg("counts") = py::none(),
        py::arg("profile") = py::none(), py::arg("ledger") = py::none(), py::arg("timings") = false);

    m.def(
        "reconstruct",
        [](const std::string& target, int max_points, int max_level, int max_degree) {
            auto model = model_for(target);
            if (model.chern.empty()) max_degree = 0;
            return io::to_json(reconstruct(model, {max_points, max_level, max_degree}), model).dump();
        },
        py::arg("target") = "point", py::arg("max_points") = 6, py::arg("max_level") = 3, py::arg("max_degree") = 0);

    m.def(
        "averaged_psi",
        [](int n, int i) {
            auto e = averaged_psi(n, i);
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& [s, c] : e.terms) out.emplace_back(to_string(e.space, s), to_string(c));
            return out;
        },
        py::arg("n"), py::arg("i") = 1);

    m.def(
        "homology",
        [](const std::string& counts) {
            auto data = io::load_counts(counts);
            Homology h{ChainComplex(data)};
            return py::make_tuple(h.betti(), h.modulus());
        },
        py::arg("counts"));

    m.def(
        "solve_combination",
        [](int r, int n_plus, int n_minus, int target) {
            SplitSpace sp{r, 1, n_plus, n_minus};
            std::vector<ZeroLocus> ex{averaged_map_zero_locus(sp, MapVariant::A), averaged_map_zero_locus(sp, MapVariant::B),
                                      averaged_map_zero_locus(sp, MapVariant::C)};
            auto targets = simplified_targets(sp);
            if (target < 0 || static_cast<std::size_t>(target) >= targets.size()) throw InvalidInput("target index out of range");
            auto res = solve_combination(ex, targets[static_cast<std::size_t>(target)]);
            std::vector<std::string> w;
            for (const auto& x : res.weights) w.push_back(to_string(x));
            return py::make_tuple(res.feasible, w, res.certificate);
        },
        py::arg("r"), py::arg("n_plus"), py::arg("n_minus"), py::arg("target"));

    m.def(
        "weyl_commutator",
        [](const std::string& f, const std::string& g, int kappa) {
            auto t = mixed_table(kappa, kappa);
            auto var = [&](const std::string& id) { return GradedSeries::variable(t, t->at(id)); };
            return weyl_commutator(var(f), var(g)).to_string();
        },
        py::arg("f"), py::arg("g"), py::arg("kappa") = 1);
}
