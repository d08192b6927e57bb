#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/report.hpp"

using namespace gibbslab;

namespace {

std::string config_path(const char* name) { return std::string(GIBBSLAB_CONFIG_DIR) + "/" + name; }

std::string error_text(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

const char* kPair = R"({"mode": "gaussian", "n": 2, "J": [[1, 0.5], [0.5, 1]], "patches": "singletons"})";

}  // namespace

TEST(Config, MatrixForms) {
  const auto dense = parse_config(kPair);
  const auto flat = parse_config(R"({"mode": "gaussian", "n": 2, "J": [1, 0.5, 0.5, 1], "patches": "singletons"})");
  const auto sparse = parse_config(
      R"({"mode": "gaussian", "n": 2, "J": {"diagonal": 1, "entries": [[0, 1, 0.5]]}, "patches": "singletons"})");
  EXPECT_EQ(dense.potential.J(), flat.potential.J());
  EXPECT_EQ(dense.potential.J(), sparse.potential.J());
  EXPECT_EQ(dense.mode, Mode::Gaussian);
  EXPECT_EQ(dense.family.patch_count(), 2u);
}

TEST(Config, PatchForms) {
  const auto whole = parse_config(R"({"mode": "gaussian", "n": 3, "J": {"diagonal": 1}, "patches": "whole"})");
  EXPECT_EQ(whole.family.patch_count(), 1u);
  const auto listed = parse_config(
      R"({"mode": "gaussian", "n": 3, "J": {"diagonal": 1},
          "patches": [{"sites": [0, 1], "multiplicity": 2}, {"sites": [2]}]})");
  EXPECT_EQ(listed.family.total_count(), 3u);
  EXPECT_EQ(listed.family.min_coverage(), 1u);
  EXPECT_EQ(listed.family.max_coverage(), 2u);
  const auto lattice = parse_config(
      R"({"mode": "gaussian", "n": 9, "J": {"diagonal": 1},
          "patches": {"lattice": [3, 3], "window": [[0, 0], [0, 1], [1, 0], [1, 1]]}})");
  EXPECT_EQ(lattice.family.total_count(), 16u);
  EXPECT_EQ(lattice.family.min_coverage(), 4u);
}

TEST(Config, GridAxesAndPerturbation) {
  const auto c = parse_config(R"({"mode": "grid", "n": 1, "J": [[2]], "axes": [[-1, 0, 1]],
      "K": [{"grid": [-1, 0, 1], "values": [0.1, 0, 0.1], "sup_norm": 0.1}], "patches": "whole"})");
  EXPECT_EQ(c.mode, Mode::Grid);
  EXPECT_EQ(c.axes.size(), 1u);
  EXPECT_EQ(c.axes[0].size(), 3u);
  EXPECT_TRUE(c.potential.has_perturbation());
}

TEST(Config, BoundaryField) {
  const auto c = parse_config(R"({"mode": "gaussian", "n": 2, "J": {"diagonal": 1},
      "boundary": {"omega": [2.0], "couplings": [{"site": 1, "exterior": 0, "strength": 0.5}]},
      "patches": "singletons"})");
  EXPECT_NEAR(c.potential.h()(1), -1.0, 1e-15);
  EXPECT_NEAR(c.potential.h()(0), 0.0, 1e-15);
}

TEST(Config, SyntaxErrorsCarryALine) {
  const std::string msg = error_text("{\n  \"mode\": \"grid\",\n  \"n\": ,\n}");
  EXPECT_NE(msg.find("cfg.json:3:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
}

TEST(Config, SchemaErrorsNameTheField) {
  EXPECT_NE(error_text(R"({"n": 2, "J": [[1,0],[0,1]], "patches": "whole"})").find("'mode'"), std::string::npos);
  EXPECT_NE(error_text(R"({"mode": "torus", "n": 2, "J": [[1,0],[0,1]], "patches": "whole"})").find("'mode'"),
            std::string::npos);
  EXPECT_NE(error_text(R"({"mode": "gaussian", "n": 2, "J": [[1,"x"],[0,1]], "patches": "whole"})").find("'J[0][1]'"),
            std::string::npos);
  EXPECT_NE(error_text(R"({"mode": "grid", "n": 2, "J": [[1,0],[0,1]], "patches": "whole"})").find("'axes'"),
            std::string::npos);
  EXPECT_NE(error_text(R"({"mode": "gaussian", "n": 2, "J": [[1,0],[0,1]], "patches": [{"sites": [5]}]})")
                .find("InvalidPatch"),
            std::string::npos);
  EXPECT_NE(error_text(R"({"mode": "gaussian", "n": 2, "J": [[1,0.2],[0,1]], "patches": "whole"})").find("AsymmetricJ"),
            std::string::npos);
}

TEST(Config, HashIgnoresFormatting) {
  const auto a = parse_config(kPair);
  const auto b = parse_config("{\n  \"patches\" : \"singletons\",\n  \"J\": [[1, 0.5], [0.5, 1]],\n  \"n\": 2,"
                              "\n  \"mode\": \"gaussian\"\n}");
  const auto c = parse_config(R"({"mode": "gaussian", "n": 2, "J": [[1, 0.4], [0.4, 1]], "patches": "singletons"})");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
  EXPECT_EQ(a.hash.size(), 16u);
}

TEST(Config, MissingFile) {
  try {
    load_config("/nonexistent/model.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(Certify, ShippedConfigs) {
  struct Expect {
    const char* file;
    bool certified;
    double delta;
  };
  for (const Expect& e : {Expect{"two_site_gaussian.json", true, 0.75}, Expect{"gaussian_chain.json", true, 0.88},
                          Expect{"lattice_3x3.json", true, 0.68}, Expect{"two_site_grid.json", true, 0.75},
                          Expect{"lattice_3x3_strong.json", false, 0.0}}) {
    const Lab lab(load_config(config_path(e.file)));
    const auto cert = certify(lab, {.seed = 1, .rho_trials = 200});
    EXPECT_EQ(cert.certified(), e.certified) << e.file;
    if (e.certified) {
      EXPECT_NEAR(cert.delta(), e.delta, 1e-9) << e.file;
      ASSERT_TRUE(cert.M.has_value());
      EXPECT_GE(cert.M->x, 1.0);
    } else {
      EXPECT_THROW(cert.delta(), Error);
    }
  }
}

TEST(Certify, GridModeCarriesBothConstants) {
  const Lab lab(load_config(config_path("two_site_grid.json")));
  const auto cert = certify(lab, {.seed = 1, .rho_trials = 200});
  EXPECT_EQ(cert.rho.kind, RhoKind::Empirical);
  EXPECT_FALSE(cert.rho.rigorous);
  ASSERT_TRUE(cert.rho_continuum.has_value());
  EXPECT_DOUBLE_EQ(cert.rho_continuum->rho, 1.0);
  ASSERT_TRUE(cert.def1_grid.has_value());
  ASSERT_TRUE(cert.def1_continuum.has_value());
  EXPECT_NEAR(cert.C, 2.23725, 1e-5);
}

TEST(Suites, UnknownOrUnsupportedIds) {
  const Lab lab(load_config(config_path("two_site_gaussian.json")));
  const auto cert = certify(lab, {.seed = 1});
  EXPECT_THROW(run_suites(lab, cert, {.ids = {"thm9"}}), Error);
  EXPECT_THROW(run_suites(lab, cert, {.ids = {"aux"}}), Error);  // grid only
  const auto s = supported_suites(lab);
  EXPECT_EQ(std::count(s.begin(), s.end(), "cor1"), 1);
  EXPECT_EQ(std::count(s.begin(), s.end(), "aux"), 0);
}

TEST(Suites, SelectionAndDeterminism) {
  const Lab lab(load_config(config_path("two_site_grid.json")));
  const auto cert = certify(lab, {.seed = 5, .rho_trials = 100});
  const SuiteOptions opts{.ids = {"thm1", "prop2"}, .trials = 20, .seed = 5};
  const auto a = run_suites(lab, cert, opts);
  const auto b = run_suites(lab, cert, opts);
  ASSERT_FALSE(a.empty());
  for (const auto& r : a) EXPECT_TRUE(r.id == "thm1" || r.id == "prop2") << r.id;
  EXPECT_EQ(reports_jsonl(a), reports_jsonl(b));
  const auto c = run_suites(lab, cert, {.ids = {"thm1", "prop2"}, .trials = 20, .seed = 6});
  EXPECT_NE(reports_jsonl(a), reports_jsonl(c));
}

TEST(Suites, GaussianModePassesEverything) {
  const Lab lab(load_config(config_path("gaussian_chain.json")));
  const auto cert = certify(lab, {.seed = 2});
  const auto rs = run_suites(lab, cert, {.trials = 20, .seed = 2});
  for (const auto& r : rs) EXPECT_TRUE(r.pass) << r.id << " " << r.lhs << " " << r.rhs;
}

TEST(Output, JsonAndCsv) {
  EXPECT_EQ(number_json(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(number_json(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(number_json(std::nan("")), "nan");
  EXPECT_EQ(number_json(0.5), 0.5);

  VerifyContext ctx;
  ctx.model_hash = "h";
  const std::vector<VerificationReport> rs{make_report("thm1", 1.0, 2.0, ctx, 0), make_report("thm1", 1.0, 0.5, ctx, 1),
                                           make_vacuous_report("aux", 1.0, ctx, 0)};
  const std::string csv = summary_csv(rs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,trials,passes,vacuous,min_margin");
  EXPECT_NE(csv.find("thm1,2,1,0,-0.5"), std::string::npos) << csv;
  EXPECT_NE(csv.find("aux,1,1,1,inf"), std::string::npos) << csv;

  const std::string jl = reports_jsonl(rs);
  EXPECT_EQ(std::count(jl.begin(), jl.end(), '\n'), 3);
  std::istringstream lines(jl);
  std::string line;
  std::getline(lines, line);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j.at("id"), "thm1");
  EXPECT_EQ(j.at("pass"), true);
  EXPECT_DOUBLE_EQ(j.at("margin").get<double>(), 1.0);
}

TEST(Simulate, EnvelopeOnlyWhenCertified) {
  const Lab lab(load_config(config_path("two_site_grid.json")));
  const auto cert = certify(lab, {.seed = 1, .rho_trials = 100});
  std::ostringstream with, without;
  simulate_curves(lab, &cert, {.steps = 5, .trials = 50, .seed = 1}, with);
  simulate_curves(lab, nullptr, {.steps = 5, .trials = 50, .seed = 1}, without);
  EXPECT_EQ(with.str().substr(0, with.str().find('\n')), "step,statistic,value,stderr");
  EXPECT_NE(with.str().find(",envelope,"), std::string::npos);
  EXPECT_EQ(without.str().find(",envelope,"), std::string::npos);
  EXPECT_EQ(with.str().rfind(without.str(), 0), 0u);
}
