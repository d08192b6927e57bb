#include "gibbslab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gibbslab/error.hpp"

namespace gibbslab {

using nlohmann::json;

json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json to_json(const RhoCertificate& c) {
  return {{"rho", number_json(c.rho)}, {"kind", std::string(to_string(c.kind))},
          {"scope", c.scope},          {"meaning", c.meaning},
          {"rigorous", c.rigorous},    {"trials", c.trials},
          {"skipped", c.skipped},      {"seed", c.seed}};
}

namespace {

json optional_number(const std::optional<double>& x) { return x ? number_json(*x) : json(nullptr); }

json vector_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number_json(x));
  return out;
}

}  // namespace

json to_json(const ContractivityResult& r) {
  if (const auto* c = std::get_if<ContractivityCertificate>(&r)) {
    json out = {{"status", "certified"},
                {"delta", number_json(c->delta)},
                {"t", c->t},
                {"method", std::string(to_string(c->method))},
                {"sup", number_json(c->sup)},
                {"rigorous", c->rigorous},
                {"matrix_norm", optional_number(c->matrix_norm)},
                {"note", c->note}};
    if (!c->worst_y.empty()) {
      out["worst_y"] = vector_json(c->worst_y);
      out["worst_z"] = vector_json(c->worst_z);
    }
    return out;
  }
  const auto& f = std::get<ContractivityFailure>(r);
  return {{"status", "failure"},
          {"sup", number_json(f.sup)},
          {"t", f.t},
          {"method", std::string(to_string(f.method))},
          {"matrix_norm", optional_number(f.matrix_norm)},
          {"reason", f.reason}};
}

json to_json(const VerificationReport& r) {
  return {{"id", r.id},
          {"lhs", number_json(r.lhs)},
          {"rhs", number_json(r.rhs)},
          {"margin", number_json(r.margin)},
          {"tolerance", number_json(r.tolerance)},
          {"pass", r.pass},
          {"vacuous", r.vacuous},
          {"monte_carlo", r.monte_carlo},
          {"standard_error", number_json(r.standard_error)},
          {"rigorous", r.rigorous},
          {"labels", r.labels},
          {"trial", {{"model_hash", r.trial.model_hash}, {"seed", r.trial.seed}, {"index", r.trial.index}}},
          {"note", r.note}};
}

json to_json(const Certification& c) {
  json out = {{"family", {{"N", c.N}, {"t", c.t}, {"v", c.v}}},
              {"rho", to_json(c.rho)},
              {"contractivity", to_json(c.contractivity)},
              {"definition2", to_json(c.definition2)},
              {"norm_A", number_json(c.norm_A)},
              {"norm_B", optional_number(c.norm_B)},
              {"C", number_json(c.C)}};
  if (c.rho_continuum) out["rho_continuum"] = to_json(*c.rho_continuum);
  if (c.def1_grid) out["def1_grid"] = to_json(*c.def1_grid);
  if (c.def1_continuum) out["def1_continuum"] = to_json(*c.def1_continuum);
  if (c.theorem2) out["theorem2"] = to_json(*c.theorem2);
  out["M"] = c.M ? json{{"M", c.M->M}, {"x", number_json(c.M->x)}} : json(nullptr);
  return out;
}

std::string reports_jsonl(const std::vector<VerificationReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::string summary_csv(const std::vector<VerificationReport>& reports) {
  struct Row {
    std::size_t trials = 0, passes = 0, vacuous = 0;
    double min_margin = std::numeric_limits<double>::infinity();
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& r : reports) {
    auto [it, fresh] = rows.try_emplace(r.id);
    if (fresh) order.push_back(r.id);
    Row& row = it->second;
    ++row.trials;
    row.passes += r.pass ? 1 : 0;
    row.vacuous += r.vacuous ? 1 : 0;
    row.min_margin = std::min(row.min_margin, r.margin);
  }
  std::ostringstream s;
  s.precision(17);
  s << "id,trials,passes,vacuous,min_margin\n";
  for (const auto& id : order) {
    const Row& row = rows[id];
    s << id << ',' << row.trials << ',' << row.passes << ',' << row.vacuous << ',';
    if (std::isinf(row.min_margin))
      s << (row.min_margin > 0 ? "inf" : "-inf");
    else
      s << row.min_margin;
    s << '\n';
  }
  return s.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace gibbslab
