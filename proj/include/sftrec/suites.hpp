#pragma once

#include <sftrec/io.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sftrec {

enum class CheckStatus { Pass, Fail, Skipped };

std::string_view to_string(CheckStatus s);

struct CheckRecord {
    std::string id;
    std::string reference;  // the identity being checked, in words
    CheckStatus status = CheckStatus::Pass;
    std::string residual;
    double seconds = 0;
};

struct VerificationReport {
    std::string suite;
    std::vector<CheckRecord> records;

    bool passed() const;
    // 0 all pass (skips allowed), 1 any failure
    int exit_status() const;
    std::size_t count(CheckStatus s) const;
    // canonical order by check id
    void sort();
    void append(VerificationReport other);
};

struct SuiteOptions {
    // algebra
    int samples = 1000;
    unsigned seed = 1;
    // hierarchy
    int K = 6;
    int levels = 3;
    // gw
    std::string target = "all";  // point, toy, all
    int max_points = 8;
    int trunc_t = 5;
    int max_degree = 2;
    // divisor
    int n = 5;

    int jobs = 1;
    std::optional<std::filesystem::path> model;
    std::optional<std::filesystem::path> counts;
    std::optional<std::filesystem::path> profile;
    std::optional<std::filesystem::path> ledger;
};

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"algebra", "hierarchy", "gw", "cylhom", "divisor"};
    return names;
}

// Throws InvalidInput on an unknown suite or unusable options/input files.
VerificationReport run_suite(std::string_view name, const SuiteOptions& options = {});

VerificationReport verify_algebra(const SuiteOptions& options);
VerificationReport verify_hierarchy(const SuiteOptions& options);
VerificationReport verify_gw(const SuiteOptions& options);
VerificationReport verify_cylhom(const SuiteOptions& options);
VerificationReport verify_divisor(const SuiteOptions& options);

// "0" for a zero residual, otherwise the term count and leading term.
std::string summarize(const GradedSeries& residual);

std::string render_text(const VerificationReport& report, bool timings = false);
io::Json to_json(const VerificationReport& report, bool timings = false);

// The m05 perturbation ledger shipped with the repo.
PerturbationLedger m05_ledger();

} // namespace sftrec
