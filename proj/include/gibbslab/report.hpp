#pragma once
// JSON/CSV forms of certificates and reports. Non-finite numbers are written
// as the strings "inf", "-inf", "nan".

#include <string>
#include <vector>

#include <json.hpp>

#include "gibbslab/lab.hpp"

namespace gibbslab {

nlohmann::json number_json(double x);
nlohmann::json to_json(const RhoCertificate& c);
nlohmann::json to_json(const ContractivityResult& r);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const Certification& c);

std::string reports_jsonl(const std::vector<VerificationReport>& reports);
// id,trials,passes,vacuous,min_margin — one row per id in first-seen order.
std::string summary_csv(const std::vector<VerificationReport>& reports);

// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace gibbslab
