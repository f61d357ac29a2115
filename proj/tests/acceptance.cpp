// One line per acceptance criterion; exit status 0 iff all pass.

#include <sftrec/suites.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

using namespace sftrec;

namespace {

struct Outcome {
    bool ok = true;
    std::string note;
};

bool starts_with(const std::string& s, const std::string& p)
{
    return s.rfind(p, 0) == 0;
}

// All records whose id matches pred must pass, and there must be at least one.
Outcome require(const VerificationReport& r, const std::function<bool(const std::string&)>& pred)
{
    Outcome out;
    int n = 0;
    for (const auto& c : r.records) {
        if (!pred(c.id)) continue;
        ++n;
        if (c.status != CheckStatus::Pass) {
            out.ok = false;
            if (out.note.empty()) out.note = c.id + ": " + c.residual;
        }
    }
    if (n == 0) return {false, "no matching checks"};
    if (out.ok) out.note = std::to_string(n) + (n == 1 ? " check" : " checks");
    return out;
}

const CheckRecord* find(const VerificationReport& r, const std::string& id)
{
    for (const auto& c : r.records)
        if (c.id == id) return &c;
    return nullptr;
}

template <class F>
std::pair<VerificationReport, double> timed(F f)
{
    auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    return {std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

int failures = 0;

void line(int k, const std::string& what, const Outcome& o, double seconds = -1)
{
    std::printf("criterion %d %-34s %s  %s", k, what.c_str(), o.ok ? "PASS" : "FAIL", o.note.c_str());
    if (seconds >= 0) std::printf("  (%.2fs)", seconds);
    std::printf("\n");
    failures += !o.ok;
}

} // namespace

int main()
{
    try {
        SuiteOptions o;

        auto [alg, t_alg] = timed([&] { return run_suite("algebra", o); });
        auto c1 = require(alg, [](const std::string& id) {
            return starts_with(id, "algebra.bracket.") || id == "algebra.derivative.leibniz" ||
                   id == "algebra.product.supercommutative";
        });
        if (o.samples < 1000) c1 = {false, "fewer than 1000 samples"};
        if (t_alg >= 60) c1 = {false, "runtime over 1 minute"};
        line(1, "graded algebra axioms", c1, t_alg);

        line(2, "Weyl relation and hbar limit", require(alg, [](const std::string& id) { return starts_with(id, "algebra.weyl."); }));

        o.K = 6;
        o.levels = 3;
        auto [hier, t_hier] = timed([&] { return run_suite("hierarchy", o); });
        auto c3 = require(hier, [](const std::string& id) { return starts_with(id, "hierarchy.circle.K6."); });
        if (hier.records.size() != 10) c3 = {false, "expected 10 pairs i <= j <= 3"};
        if (t_hier >= 300) c3 = {false, "runtime over 5 minutes"};
        line(3, "KdV commutativity K=6, levels<=3", c3, t_hier);

        o.max_points = 8;
        o.trunc_t = 5;
        auto [gw, t_gw] = timed([&] { return run_suite("gw", o); });
        line(4, "point reconstruction vs oracle", require(gw, [](const std::string& id) { return id == "gw.point.oracle"; }), t_gw);

        auto c5 = require(gw, [](const std::string& id) {
            return id.find(".trr.") != std::string::npos || id.find(".averaged_trr.") != std::string::npos ||
                   id.find(".fault_detection") != std::string::npos;
        });
        for (const char* id : {"gw.point.fault_detection", "gw.toy.fault_detection", "gw.point.trr.1.1", "gw.toy.trr.e.1"})
            if (!find(gw, id)) c5 = {false, std::string("missing ") + id};
        line(5, "TRR identities to t-order 5", c5);

        auto div = run_suite("divisor", o);
        auto c6 = require(div, [](const std::string& id) {
            return starts_with(id, "divisor.averaged_psi.") || starts_with(id, "divisor.m05.") || starts_with(id, "divisor.ledger.");
        });
        const auto* psi4 = find(div, "divisor.averaged_psi.n04");
        const auto* psi5 = find(div, "divisor.averaged_psi.n05");
        const auto* ledger = find(div, "divisor.ledger.entries");
        if (!psi4 || psi4->residual.find("1/3") == std::string::npos) c6 = {false, "averaged_psi(4,1) coefficient"};
        if (!psi5 || psi5->residual.find("1/2") == std::string::npos || psi5->residual.find("1/6") == std::string::npos)
            c6 = {false, "averaged_psi(5,1) coefficients"};
        if (!ledger || ledger->residual.find("= -1/2") == std::string::npos || ledger->residual.find("= -1/6") == std::string::npos)
            c6 = {false, "ledger sums"};
        line(6, "averaged psi, M05 pairing, ledger", c6);

        auto [cyl, t_cyl] = timed([&] { return run_suite("cylhom", o); });
        auto c7 = require(cyl, [](const std::string&) { return true; });
        for (const char* id : {"cylhom.point.s20.floer.d_squared", "cylhom.point.s20.floer.offdiagonal",
                               "cylhom.point.s11.equivariant_matches_floer", "cylhom.contact.vanishing",
                               "cylhom.point.s11.quantum_action"})
            if (!find(cyl, id)) c7 = {false, std::string("missing ") + id};
        if (t_cyl >= 60) c7 = {false, "runtime over 1 minute"};
        line(7, "Floer model suite", c7, t_cyl);

        auto c8 = require(div, [](const std::string& id) { return starts_with(id, "divisor.combination.r"); });
        int feasible = 0, infeasible = 0;
        for (const auto& c : div.records) {
            if (!starts_with(c.id, "divisor.combination.r")) continue;
            feasible += starts_with(c.residual, "feasible");
            infeasible += starts_with(c.residual, "infeasible");
        }
        for (const char* rp : {".r2.P2.", ".r3.P3.", ".r4.P4."}) {
            bool seen = false;
            for (const auto& c : div.records) seen |= c.id.find(rp) != std::string::npos;
            if (!seen) c8 = {false, std::string("no combination at") + rp};
        }
        if (c8.ok) c8.note += ", " + std::to_string(feasible) + " with weights, " + std::to_string(infeasible) + " with certificates";
        line(8, "combination solver outcomes", c8);
    } catch (const std::exception& e) {
        std::cout << "acceptance aborted: " << e.what() << "\n";
        return 2;
    }
    std::cout << (failures ? "FAIL" : "PASS") << ": " << 8 - failures << "/8 criteria\n";
    return failures ? 1 : 0;
}
