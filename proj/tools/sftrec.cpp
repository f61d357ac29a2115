#include <sftrec/suites.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace sftrec;
namespace fs = std::filesystem;

namespace {

enum class Format { Text, Machine };

struct Common {
    Format format = Format::Text;
    std::string out;
    bool timings = false;
};

void emit(const Common& c, const io::Json& j, const std::string& text)
{
    if (!c.out.empty()) {
        io::write_file(c.out, j);
        if (c.format == Format::Text) std::cout << text;
        return;
    }
    if (c.format == Format::Machine)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--format", c.format, "text or machine (JSON)")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::Text}, {"machine", Format::Machine}}));
    cmd->add_option("-o,--out", c.out, "also write the JSON result to this file");
}

io::Json series_list(const std::vector<GradedSeries>& hams)
{
    io::Json out = io::Json::array();
    for (std::size_t j = 0; j < hams.size(); ++j) out.push_back({{"level", j}, {"terms", io::to_json(hams[j])}});
    return out;
}

int write_fixtures(const fs::path& dir)
{
    fs::create_directories(dir);
    io::write_file(dir / "point.model.json", io::to_json(TargetModel::point()));
    io::write_file(dir / "wdvv_toy.model.json", io::to_json(TargetModel::p1_toy()));

    io::Profiles circle;
    circle.max_cover = 6;
    io::write_file(dir / "circle.profile.json", io::to_json(circle));

    for (auto label : {SectionChoice::TwoZero, SectionChoice::OneOne, SectionChoice::ZeroTwo}) {
        auto fm = build_floer_model(TargetModel::point(), 2, {6, 2, 0}, label);
        std::string tag = label == SectionChoice::TwoZero ? "s20" : label == SectionChoice::OneOne ? "s11" : "s02";
        io::write_file(dir / ("floer_point." + tag + ".counts.json"), io::to_json(fm.floer));
        io::write_file(dir / ("cylinder_point." + tag + ".counts.json"), io::to_json(fm.cylinder));
    }
    io::write_file(dir / "contact.counts.json", io::to_json(contact_fixture()));
    io::write_file(dir / "generic.counts.json", io::to_json(generic_fixture()));
    io::write_file(dir / "m05.ledger.json", io::to_json(m05_ledger()));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sftrec: exact checks of SFT recursion identities"};
    app.require_subcommand(1);

    Common common;
    SuiteOptions opts;
    std::string suite = "all";
    std::string model_path, counts_path, profile_path, ledger_path;

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "algebra, hierarchy, gw, cylhom, divisor or all")
        ->check(CLI::IsMember({"algebra", "hierarchy", "gw", "cylhom", "divisor", "all"}));
    add_common(verify, common);
    verify->add_flag("--timings", common.timings, "include per-check runtimes");
    verify->add_option("--samples", opts.samples, "random samples per algebra identity");
    verify->add_option("--seed", opts.seed);
    verify->add_option("--K,--max-cover", opts.K, "cover bound for the hierarchy");
    verify->add_option("--levels", opts.levels, "highest Hamiltonian level");
    verify->add_option("--target", opts.target, "point, toy or all")->check(CLI::IsMember({"point", "toy", "all"}));
    verify->add_option("--max-points", opts.max_points);
    verify->add_option("--trunc-t", opts.trunc_t, "t-order up to which recursions are checked");
    verify->add_option("--max-degree", opts.max_degree);
    verify->add_option("--n", opts.n, "marked points for the divisor suite");
    verify->add_option("--jobs", opts.jobs)->check(CLI::PositiveNumber);
    verify->add_option("--model", model_path);
    verify->add_option("--counts", counts_path);
    verify->add_option("--profile", profile_path);
    verify->add_option("--ledger", ledger_path);

    std::string target = "point";
    ReconstructionBounds bounds{6, 3, 0};
    auto* recon = app.add_subcommand("reconstruct", "reconstruct descendant correlators and emit the table");
    add_common(recon, common);
    recon->add_option("--model", model_path);
    recon->add_option("--target", target)->check(CLI::IsMember({"point", "toy"}));
    recon->add_option("--max-points", bounds.max_points);
    recon->add_option("--trunc-t", bounds.max_points, "alias of --max-points");
    recon->add_option("--levels", bounds.max_level);
    recon->add_option("--max-degree", bounds.max_degree);

    int levels = 3, K = 6, jobs = 1;
    auto* hier = app.add_subcommand("hierarchy", "emit the descendant Hamiltonians");
    add_common(hier, common);
    hier->add_option("--K,--max-cover", K);
    hier->add_option("--levels", levels);
    hier->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    hier->add_option("--profile", profile_path, "geodesic grading and sign profile");

    auto* homol = app.add_subcommand("homology", "Betti table of a counts file");
    add_common(homol, common);
    homol->add_option("counts", counts_path)->required();

    int n = 5, psi_point = 1;
    auto* div = app.add_subcommand("divisor", "averaged psi class and optional ledger check");
    add_common(div, common);
    div->add_option("--n", n);
    div->add_option("--i", psi_point);
    div->add_option("--ledger", ledger_path);

    std::string fixture_dir = "data";
    auto* fixtures = app.add_subcommand("fixtures", "write the shipped fixture files");
    fixtures->add_option("dir", fixture_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        auto path_opt = [](const std::string& p) -> std::optional<fs::path> {
            if (p.empty()) return std::nullopt;
            return fs::path(p);
        };

        if (*verify) {
            opts.model = path_opt(model_path);
            opts.counts = path_opt(counts_path);
            opts.profile = path_opt(profile_path);
            opts.ledger = path_opt(ledger_path);
            auto report = run_suite(suite, opts);
            emit(common, to_json(report, common.timings), render_text(report, common.timings));
            return report.exit_status();
        }
        if (*recon) {
            auto model = model_path.empty() ? (target == "toy" ? TargetModel::p1_toy() : TargetModel::point())
                                            : io::load_model(model_path);
            if (model.chern.empty()) bounds.max_degree = 0;
            auto table = reconstruct(model, bounds);
            auto j = io::to_json(table, model);
            std::string text = model.name + ": " + std::to_string(j["entries"].size()) + " nonzero correlators\n";
            for (const auto& [key, v] : table.entries())
                if (v != 0) text += "  " + describe(model, key) + " = " + to_string(v) + "\n";
            emit(common, j, text);
            return 0;
        }
        if (*hier) {
            io::Json j;
            j["schema"] = io::kHamiltonianSchema;
            j["K"] = K;
            std::vector<GradedSeries> hams;
            if (profile_path.empty()) {
                j["kind"] = "circle";
                OrbitLattice lattice(K);
                for (int l = 0; l <= levels; ++l) hams.push_back(build_circle_hamiltonian(l, lattice, {K, TupleRange::Truncated, jobs}));
            } else {
                auto prof = io::load_profiles(profile_path);
                j["kind"] = "geodesic";
                j["profile"] = io::to_json(prof);
                OrbitLattice lattice(K, prof.grading);
                for (int l = 0; l <= levels; ++l)
                    hams.push_back(build_geodesic_hamiltonian(l, lattice, prof.signs, {K, TupleRange::Truncated, jobs}));
            }
            j["hamiltonians"] = series_list(hams);
            std::string text;
            for (std::size_t l = 0; l < hams.size(); ++l)
                text += "g" + std::to_string(l) + ": " + std::to_string(hams[l].size()) + " terms\n";
            emit(common, j, text);
            return 0;
        }
        if (*homol) {
            auto data = io::load_counts(counts_path);
            Homology h{ChainComplex(data)};
            io::Json j;
            j["schema"] = io::kHomologySchema;
            j["name"] = data.name;
            j["modulus"] = h.modulus();
            j["total"] = h.total();
            io::Json b = io::Json::object();
            for (auto [d, k] : h.betti()) b[std::to_string(d)] = k;
            j["betti"] = b;
            std::string text = data.name + ": total " + std::to_string(h.total());
            if (h.modulus()) text += ", degrees mod " + std::to_string(h.modulus());
            text += "\n";
            for (auto [d, k] : h.betti()) text += "  " + std::to_string(d) + ": " + std::to_string(k) + "\n";
            emit(common, j, text);
            return 0;
        }
        if (*div) {
            auto e = averaged_psi(n, psi_point);
            io::Json j;
            j["schema"] = io::kReportSchema;
            j["n"] = n;
            j["psi_point"] = psi_point;
            io::Json terms = io::Json::array();
            std::string text = "averaged psi_" + std::to_string(psi_point) + " on n = " + std::to_string(n) + "\n";
            for (const auto& [s, c] : e.terms) {
                terms.push_back({{"splitting", to_string(e.space, s)}, {"coefficient", io::rational_json(c)}});
                text += "  " + to_string(c) + " " + to_string(e.space, s) + "\n";
            }
            j["averaged_psi"] = terms;
            int status = 0;
            if (!ledger_path.empty()) {
                auto rep = perturbation_ledger_check(io::load_ledger(ledger_path));
                j["ledger"] = {{"sums_checked", rep.sums_checked}, {"violations", rep.violations}};
                text += "ledger: " + std::to_string(rep.sums_checked) + " sums, " + std::to_string(rep.violations.size()) +
                        " violations\n";
                for (const auto& v : rep.violations) text += "  " + v + "\n";
                status = rep.ok() ? 0 : 1;
            }
            emit(common, j, text);
            return status;
        }
        if (*fixtures) return write_fixtures(fixture_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
