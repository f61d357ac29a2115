#pragma once

#include <sftrec/cylhom.hpp>
#include <sftrec/divcomb.hpp>
#include <sftrec/gwrecon.hpp>
#include <sftrec/hierarchy.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>

namespace sftrec::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kModelSchema = "sftrec.model/1";
inline constexpr const char* kCountsSchema = "sftrec.counts/1";
inline constexpr const char* kProfileSchema = "sftrec.profile/1";
inline constexpr const char* kLedgerSchema = "sftrec.ledger/1";
inline constexpr const char* kCorrelatorSchema = "sftrec.correlators/1";
inline constexpr const char* kHamiltonianSchema = "sftrec.hamiltonians/1";
inline constexpr const char* kHomologySchema = "sftrec.homology/1";
inline constexpr const char* kReportSchema = "sftrec.report/1";

// "n/d" (or "n"); JSON integers are accepted on input.
Json rational_json(const Rational& q);
Rational rational_from(const Json& j, const std::string& path);

Json to_json(const TargetModel& model);
TargetModel model_from_json(const Json& j, const std::string& path = "model");

Json to_json(const ChainComplexData& data);
ChainComplexData counts_from_json(const Json& j);

struct Profiles {
    GradingProfile grading;
    SignProfile signs;
    int max_cover = 6;
};

Json to_json(const Profiles& p);
Profiles profiles_from_json(const Json& j);

Json to_json(const PerturbationLedger& l);
PerturbationLedger ledger_from_json(const Json& j);

Json to_json(const CorrelatorTable& table, const TargetModel& model);
// Series as a list of [monomial, coefficient] pairs in canonical order.
Json to_json(const GradedSeries& s);

// Parse errors and schema violations throw InvalidInput naming the file and field.
Json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Json& j);

TargetModel load_model(const std::filesystem::path& path);
ChainComplexData load_counts(const std::filesystem::path& path);
Profiles load_profiles(const std::filesystem::path& path);
PerturbationLedger load_ledger(const std::filesystem::path& path);

} // namespace sftrec::io
