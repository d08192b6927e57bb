// Command-line front end: certify, verify, simulate.
//
// Exit codes: 0 pass, 1 inequality failure, 2 config error, 3 certification
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/lab.hpp"
#include "gibbslab/report.hpp"

using namespace gibbslab;

namespace {

enum Exit { kPass = 0, kInequalityFailure = 1, kConfigError = 2, kCertificationFailure = 3 };

struct Flags {
  std::string config;
  std::string out;
  std::string suites;
  std::size_t trials = 200;
  std::size_t steps = 30;
  std::uint64_t seed = 1;
  std::string tolerance_overrides;
};

std::string out_path(const Flags& f, const char* name) { return (std::filesystem::path(f.out) / name).string(); }

std::vector<std::string> split_suites(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ToleranceTable read_tolerances(const std::string& spec) {
  ToleranceTable table;
  if (spec.empty()) return table;
  std::string text = spec;
  if (spec.find('{') == std::string::npos) {
    std::ifstream in(spec);
    if (!in) fail(ErrorCode::ConfigError, "cannot open tolerance overrides " + spec);
    std::ostringstream s;
    s << in.rdbuf();
    text = s.str();
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    fail(ErrorCode::ConfigError, "tolerance overrides: malformed JSON");
  }
  if (!j.is_object()) fail(ErrorCode::ConfigError, "tolerance overrides: expected an object");
  const auto& ids = all_inequality_ids();
  for (const auto& [key, value] : j.items()) {
    if (std::find(ids.begin(), ids.end(), key) == ids.end())
      fail(ErrorCode::ConfigError, "tolerance overrides: unknown id '" + key + "'");
    if (!value.is_number() || value.get<double>() < 0)
      fail(ErrorCode::ConfigError, "tolerance overrides: '" + key + "' must be a nonnegative number");
    table.overrides[key] = value.get<double>();
  }
  return table;
}

CertifyOptions certify_options(const Flags& f) {
  CertifyOptions o;
  o.seed = f.seed;
  return o;
}

void report_certification(const Certification& cert) {
  const auto& c = cert.contractivity;
  if (const auto* fail = std::get_if<ContractivityFailure>(&c))
    std::cerr << "certification failed: " << to_string(fail->method) << " sup=" << fail->sup << " >= t=" << fail->t
              << "; " << fail->reason << '\n';
}

int cmd_certify(const Flags& f) {
  const Lab lab(load_config(f.config));
  const Certification cert = certify(lab, certify_options(f));
  const std::string doc = to_json(cert).dump(2) + "\n";
  if (!f.out.empty()) write_file_atomic(out_path(f, "certificates.json"), doc);
  std::cout << doc;
  report_certification(cert);
  return cert.certified() ? kPass : kCertificationFailure;
}

int cmd_verify(const Flags& f) {
  const Lab lab(load_config(f.config));
  SuiteOptions options;
  options.ids = split_suites(f.suites);
  options.trials = f.trials;
  options.seed = f.seed;
  options.tolerances = read_tolerances(f.tolerance_overrides);

  const Certification cert = certify(lab, certify_options(f));
  write_file_atomic(out_path(f, "certificates.json"), to_json(cert).dump(2) + "\n");
  if (!cert.certified()) {
    report_certification(cert);
    return kCertificationFailure;
  }
  const auto reports = run_suites(lab, cert, options);
  const std::string summary = summary_csv(reports);
  write_file_atomic(out_path(f, "reports.jsonl"), reports_jsonl(reports));
  write_file_atomic(out_path(f, "summary.csv"), summary);
  std::cout << summary;
  const bool all = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  return all ? kPass : kInequalityFailure;
}

int cmd_simulate(const Flags& f) {
  const Lab lab(load_config(f.config));
  std::optional<Certification> cert;
  try {
    cert = certify(lab, certify_options(f));
  } catch (const Error& e) {
    std::cerr << "warning: no certificate (" << e.what() << ")\n";
  }
  if (cert && !cert->certified()) std::cerr << "warning: model not certified; curve emitted without envelope\n";
  std::ostringstream csv;
  SimulateOptions o{f.steps, f.trials, f.seed};
  simulate_curves(lab, cert ? &*cert : nullptr, o, csv);
  if (!f.out.empty())
    write_file_atomic(out_path(f, "curves.csv"), csv.str());
  else
    std::cout << csv.str();
  return kPass;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NotContractive:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::DegenerateConditional:
    case ErrorCode::NonConvergence:
      return kCertificationFailure;
    default:
      return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs-sampler coupling verification lab"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", f.config, "model config (JSON)")->required()->check(CLI::ExistingFile);
    auto* out = sub->add_option("--out", f.out, "output directory");
    if (out_required) out->required();
    sub->add_option("--seed", f.seed, "master seed");
  };
  auto* certify_cmd = app.add_subcommand("certify", "issue rho and delta certificates");
  common(certify_cmd, false);
  auto* verify_cmd = app.add_subcommand("verify", "run inequality suites");
  common(verify_cmd, true);
  verify_cmd->add_option("--suite", f.suites, "comma-separated inequality ids (default: all supported)");
  verify_cmd->add_option("--trials", f.trials, "trials per suite");
  verify_cmd->add_option("--tolerance-overrides", f.tolerance_overrides, "JSON object (or file) id -> tolerance");
  auto* simulate_cmd = app.add_subcommand("simulate", "coupled-chain decay curves");
  common(simulate_cmd, false);
  simulate_cmd->add_option("--steps", f.steps, "chain steps");
  simulate_cmd->add_option("--trials", f.trials, "coupled-chain trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*certify_cmd) return cmd_certify(f);
    if (*verify_cmd) return cmd_verify(f);
    return cmd_simulate(f);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
