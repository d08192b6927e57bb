#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gibbslab/error.hpp"
#include "gibbslab/lab.hpp"

namespace gibbslab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& source, const std::string& field, const std::string& what) {
  fail(ErrorCode::ConfigError, source + ": field '" + field + "': " + what);
}

// Field access with path-carrying diagnostics.
struct Node {
  const json& j;
  std::string path;
  const std::string& source;

  bool has(const char* key) const { return j.is_object() && j.contains(key); }
  Node at(const char* key) const {
    if (!has(key)) bad(source, path.empty() ? key : path + "." + key, "missing");
    return {j.at(key), path.empty() ? key : path + "." + key, source};
  }
  Node item(std::size_t i) const { return {j.at(i), path + "[" + std::to_string(i) + "]", source}; }
  std::size_t size() const {
    if (!j.is_array()) bad(source, path, "expected an array");
    return j.size();
  }
  double number() const {
    if (!j.is_number()) bad(source, path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) bad(source, path, "must be finite");
    return x;
  }
  std::size_t index() const {
    if (!j.is_number_integer() || j.get<long long>() < 0) bad(source, path, "expected a nonnegative integer");
    return j.get<std::size_t>();
  }
  std::string string() const {
    if (!j.is_string()) bad(source, path, "expected a string");
    return j.get<std::string>();
  }
  std::vector<double> numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = item(i).number();
    return out;
  }
};

Matrix read_J(const Node& node, std::size_t n) {
  Matrix J = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (node.j.is_object()) {
    // {"diagonal": d, "entries": [[i, k, value], ...]}, applied symmetrically.
    const double d = node.has("diagonal") ? node.at("diagonal").number() : 0.0;
    J.diagonal().setConstant(d);
    if (node.has("entries")) {
      const Node e = node.at("entries");
      for (std::size_t r = 0; r < e.size(); ++r) {
        const Node t = e.item(r);
        if (t.size() != 3) bad(node.source, t.path, "expected [i, k, value]");
        const std::size_t i = t.item(0).index(), k = t.item(1).index();
        if (i >= n || k >= n) bad(node.source, t.path, "site index out of range");
        const double v = t.item(2).number();
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
        J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
      }
    }
    return J;
  }
  const std::size_t rows = node.size();
  if (rows == n * n && (rows == 0 || node.j[0].is_number())) {
    for (std::size_t i = 0; i < rows; ++i) J(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = node.item(i).number();
    return J;
  }
  if (rows != n) bad(node.source, node.path, "expected " + std::to_string(n) + " rows or " + std::to_string(n * n) + " entries");
  for (std::size_t i = 0; i < n; ++i) {
    const Node row = node.item(i);
    if (row.size() != n) bad(node.source, row.path, "expected " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k)
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row.item(k).number();
  }
  return J;
}

PatchFamily read_patches(const Node& node, std::size_t n) {
  if (node.j.is_string()) {
    const std::string kind = node.string();
    if (kind == "singletons") return PatchFamily::singletons(n);
    if (kind == "whole") return PatchFamily::whole(n);
    bad(node.source, node.path, "unknown patch family '" + kind + "' (singletons, whole, list or lattice)");
  }
  if (node.j.is_object()) {
    const Node dims_node = node.at("lattice");
    std::vector<std::size_t> dims(dims_node.size());
    std::size_t total = 1;
    for (std::size_t a = 0; a < dims.size(); ++a) total *= (dims[a] = dims_node.item(a).index());
    if (total != n) bad(node.source, dims_node.path, "lattice box has " + std::to_string(total) + " sites, n is " + std::to_string(n));
    const Node w = node.at("window");
    std::vector<std::vector<long>> window(w.size());
    for (std::size_t r = 0; r < window.size(); ++r) {
      const Node off = w.item(r);
      for (std::size_t a = 0; a < off.size(); ++a) {
        if (!off.item(a).j.is_number_integer()) bad(node.source, off.item(a).path, "expected an integer");
        window[r].push_back(off.item(a).j.get<long>());
      }
    }
    return PatchFamily::lattice_translates(dims, window);
  }
  std::vector<Patch> patches(node.size());
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const Node p = node.item(k);
    const Node s = p.at("sites");
    for (std::size_t i = 0; i < s.size(); ++i) patches[k].sites.push_back(s.item(i).index());
    patches[k].multiplicity = p.has("multiplicity") ? p.at("multiplicity").index() : 1;
  }
  return PatchFamily::build(std::move(patches), n);
}

Axes read_axes(const Node& node, std::size_t n) {
  Axes axes;
  if (node.j.is_object()) {
    const double lo = node.at("lo").number(), hi = node.at("hi").number();
    const std::size_t levels = node.at("levels").index();
    if (levels < 1 || !(hi >= lo)) bad(node.source, node.path, "need levels >= 1 and hi >= lo");
    axes.assign(n, linspace(lo, hi, levels));
    return axes;
  }
  if (node.size() != n) bad(node.source, node.path, "expected one axis per site");
  for (std::size_t i = 0; i < n; ++i) axes.push_back(node.item(i).numbers());
  return axes;
}

std::vector<SitePerturbation> read_K(const Node& node, std::size_t n) {
  if (node.size() != n) bad(node.source, node.path, "expected one table per site");
  std::vector<SitePerturbation> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Node t = node.item(i);
    out.emplace_back(t.at("grid").numbers(), t.at("values").numbers(), t.at("sup_norm").number());
  }
  return out;
}

LabConfig build_config(const json& root, const std::string& source) {
  const Node top{root, "", source};
  if (!root.is_object()) bad(source, "<root>", "expected an object");
  const std::string mode_name = top.at("mode").string();
  Mode mode;
  if (mode_name == "gaussian")
    mode = Mode::Gaussian;
  else if (mode_name == "grid")
    mode = Mode::Grid;
  else
    bad(source, "mode", "expected \"gaussian\" or \"grid\"");
  const std::size_t n = top.at("n").index();
  if (n < 1) bad(source, "n", "must be at least 1");

  Matrix J = read_J(top.at("J"), n);
  Vector h = Vector::Zero(static_cast<Eigen::Index>(n));
  if (top.has("h")) {
    const auto v = top.at("h").numbers();
    if (v.size() != n) bad(source, "h", "expected " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < n; ++i) h(static_cast<Eigen::Index>(i)) = v[i];
  }
  std::vector<BoundaryCoupling> couplings;
  std::vector<double> omega;
  if (top.has("boundary")) {
    const Node b = top.at("boundary");
    omega = b.at("omega").numbers();
    const Node c = b.at("couplings");
    for (std::size_t r = 0; r < c.size(); ++r) {
      const Node e = c.item(r);
      BoundaryCoupling bc{e.at("site").index(), e.at("exterior").index(), e.at("strength").number()};
      if (bc.interior >= n) bad(source, e.path + ".site", "out of range");
      if (bc.exterior >= omega.size()) bad(source, e.path + ".exterior", "no such boundary value");
      couplings.push_back(bc);
    }
  }
  std::optional<std::vector<SitePerturbation>> K;
  if (top.has("K")) {
    if (mode == Mode::Gaussian) bad(source, "K", "perturbations need grid mode");
    K = read_K(top.at("K"), n);
  }

  Axes axes;
  if (mode == Mode::Grid) axes = read_axes(top.at("axes"), n);

  try {
    QuadraticPotential potential = QuadraticPotential::build(std::move(J), std::move(h), couplings, omega, std::move(K));
    PatchFamily family = read_patches(top.at("patches"), n);
    // Canonical dump: object keys are sorted, so formatting does not matter.
    const std::string canonical = root.dump();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    return LabConfig{top.has("name") ? top.at("name").string() : std::string{}, mode, std::move(potential),
                     std::move(family), std::move(axes), hex};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, source + ": " + std::string(to_string(e.code())) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Gaussian ? "gaussian" : "grid"; }

LabConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n')
        ++line, col = 1;
      else
        ++col;
    }
    fail(ErrorCode::ConfigError,
         source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  return build_config(root, source);
}

LabConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, path + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), path);
}

}  // namespace gibbslab
