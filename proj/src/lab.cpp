#include "gibbslab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gibbslab/error.hpp"

namespace gibbslab {

Lab::Lab(LabConfig config) : config_(std::move(config)) {
  if (config_.mode == Mode::Gaussian) {
    try {
      gaussian_.emplace(GaussianModel(config_.potential), config_.family);
      gaussian_status_ = "ok";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      gaussian_status_ = std::string("no Gaussian reference law: ") + e.what();
    }
  } else {
    grid_.emplace(GridModel(discretize(config_.potential, config_.axes), config_.potential), config_.family);
    gaussian_status_ = "grid mode";
  }
}

double Certification::delta() const {
  if (const auto* c = std::get_if<ContractivityCertificate>(&contractivity)) return c->delta;
  fail(ErrorCode::NotContractive, "no contractivity certificate: " + std::get<ContractivityFailure>(contractivity).reason);
}

Theorem1Constants Certification::theorem1() const { return {C, rho.rho, delta(), t, v}; }

namespace {

std::optional<ContractivityResult> try_continuum_def1(const QuadraticPotential& potential, const PatchFamily& family) {
  if (potential.has_perturbation()) return std::nullopt;
  try {
    return check_contractivity_def1(potential, family);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Smaller delta among the certified results; the grid verdict decides
// failure since the grid kernel is what the suites run.
ContractivityResult effective(const ContractivityResult& grid, const std::optional<ContractivityResult>& continuum) {
  if (!certified(grid) || !continuum || !certified(*continuum)) return grid;
  const auto& g = std::get<ContractivityCertificate>(grid);
  auto c = std::get<ContractivityCertificate>(*continuum);
  if (c.delta >= g.delta) return grid;
  c.note = "continuum value, below the grid value " + std::to_string(g.delta);
  c.rigorous = c.rigorous && g.rigorous;
  return c;
}

}  // namespace

Certification certify(const Lab& lab, const CertifyOptions& options) {
  const PatchFamily& fam = lab.family();
  const QuadraticPotential& pot = lab.potential();
  Certification c{.N = fam.total_count(),
                  .t = fam.min_coverage(),
                  .v = fam.max_coverage(),
                  .rho = {},
                  .rho_continuum = {},
                  .contractivity = ContractivityFailure{},
                  .def1_grid = {},
                  .def1_continuum = {},
                  .definition2 = ContractivityFailure{},
                  .theorem2 = {},
                  .norm_A = 0.0,
                  .norm_B = {},
                  .M = {},
                  .C = constant_C()};

  InfluenceMatrices A;
  if (lab.mode() == Mode::Gaussian) {
    c.rho = rho_gaussian_conditionals(pot, fam);
    c.def1_continuum = check_contractivity_def1(pot, fam);
    c.contractivity = *c.def1_continuum;
    A = dobrushin_matrix_A(pot, fam);
  } else {
    const GridKernel& kernel = *lab.grid();
    c.rho = rho_empirical(kernel, RhoSearch{.trials = options.rho_trials,
                                            .seed = derive_seed(options.seed, fnv1a("rho")),
                                            .descent_floor = 1e-3});
    try {
      if (pot.has_perturbation()) {
        const auto base = QuadraticPotential::build(pot.J(), pot.h());
        const auto g = rho_gaussian_conditionals(base, fam);
        c.rho_continuum = rho_holley_stroock(g.rho, pot.perturbation_sup_norm());
      } else {
        c.rho_continuum = rho_gaussian_conditionals(pot, fam);
      }
    } catch (const Error&) {
      c.rho_continuum.reset();
    }
    Def1Search search = options.def1;
    search.seed = derive_seed(options.seed, fnv1a("def1"));
    c.def1_grid = check_contractivity_def1(kernel, search);
    c.def1_continuum = try_continuum_def1(pot, fam);
    c.contractivity = effective(*c.def1_grid, c.def1_continuum);
    A = dobrushin_matrix_A(kernel, 1'000'000, derive_seed(options.seed, fnv1a("matrix-A")));
  }
  c.definition2 = check_definition2(A, c.t);
  c.norm_A = operator_norm(A.A);

  Theorem2Search t2 = options.theorem2;
  t2.seed = derive_seed(options.seed, fnv1a("theorem2"));
  try {
    c.theorem2 = check_theorem2(pot, fam, c.rho, t2);
  } catch (const Error&) {
    c.theorem2.reset();
  }
  if (!pot.has_perturbation()) {
    c.norm_B = operator_norm(matrix_B(pot, fam).B);
  } else if (c.theorem2) {
    const auto norm = std::visit([](const auto& r) { return r.matrix_norm; }, *c.theorem2);
    if (norm) c.norm_B = *norm * c.rho.rho;
  }
  if (c.certified()) c.M = choose_M(c.t, c.delta(), c.N);
  return c;
}

std::vector<std::string> supported_suites(const Lab& lab) {
  std::vector<std::string> out;
  for (const auto& id : all_inequality_ids()) {
    if (lab.mode() == Mode::Gaussian && (id == ids::kAux || id == ids::kCor2 || id == ids::kConcentration)) continue;
    if (lab.mode() == Mode::Grid && id == ids::kCor1) continue;
    if (id == ids::kCor1 && lab.potential().has_perturbation()) continue;
    out.push_back(id);
  }
  return out;
}

std::pair<StateSet, StateSet> random_tail_sets(const GridMeasure& q, Rng& rng) {
  const std::size_t n = q.dimension();
  Vector u(static_cast<Eigen::Index>(n));
  do {
    for (auto& x : u) x = standard_normal(rng);
  } while (u.norm() < 1e-6);
  u.normalize();
  const Matrix pts = q.points();
  const Vector proj = pts * u;
  std::vector<double> levels(proj.begin(), proj.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  require(levels.size() >= 2, ErrorCode::InvalidArgument, "grid too small for tail sets");
  std::size_t i = std::uniform_int_distribution<std::size_t>(0, levels.size() - 2)(rng);
  std::size_t j = std::uniform_int_distribution<std::size_t>(i + 1, levels.size() - 1)(rng);
  StateSet a, b;
  for (std::size_t s = 0; s < q.size(); ++s) {
    if (proj(static_cast<Eigen::Index>(s)) <= levels[i]) a.push_back(s);
    if (proj(static_cast<Eigen::Index>(s)) >= levels[j]) b.push_back(s);
  }
  return {a, b};
}

namespace {

std::size_t at_least_one(std::size_t x) { return std::max<std::size_t>(1, x); }

// Sequence lengths from the regime where the aggregate visit bound holds.
std::size_t shortest_chain(const PatchFamily& fam) {
  return (2 * fam.total_count() + fam.max_coverage() - 1) / fam.max_coverage();
}

std::vector<VerificationReport> keep(std::vector<VerificationReport> reports, const std::set<std::string>& wanted) {
  std::erase_if(reports, [&](const VerificationReport& r) { return !wanted.count(r.id); });
  return reports;
}

const ContractivityResult* certified_or_null(const std::optional<ContractivityResult>& r) {
  return r && certified(*r) ? &*r : nullptr;
}

void run_gaussian(const Lab& lab, const Certification& cert, const SuiteOptions& o, const VerifyContext& ctx,
                  const std::set<std::string>& wanted, std::vector<VerificationReport>& out) {
  const GaussianKernel* kernel = lab.gaussian();
  if (kernel == nullptr) fail(ErrorCode::NotPositiveDefinite, lab.gaussian_status());
  const GaussianMeasure& q = kernel->q();
  const std::size_t n = q.dimension();
  auto append = [&](std::vector<VerificationReport> r) { out.insert(out.end(), r.begin(), r.end()); };
  auto laws = [&](const char* stream, std::size_t count, double scale) {
    std::vector<GaussianMeasure> ps;
    for (std::size_t i = 0; i < count; ++i) {
      Rng g = make_rng(o.seed, fnv1a(stream), i);
      ps.push_back(random_gaussian_law(n, g, scale));
    }
    return ps;
  };

  for (const auto& id : all_inequality_ids()) {
    if (!wanted.count(id)) continue;
    if (id == ids::kThm1) {
      const auto k = cert.theorem1();
      append(verify_theorem1(q, k, laws("thm1", o.trials, 1.0), ctx));
      append(verify_theorem1_adversarial(q, k, at_least_one(o.trials / 20), ctx));
    } else if (id == ids::kThm2Bridge) {
      std::vector<std::pair<Vector, Vector>> pairs;
      for (std::size_t i = 0; i < o.trials; ++i) {
        Rng g = make_rng(o.seed, fnv1a("thm2-bridge"), i);
        Vector x(static_cast<Eigen::Index>(n)), y(static_cast<Eigen::Index>(n));
        for (auto& e : x) e = 2.0 * standard_normal(g);
        for (auto& e : y) e = 2.0 * standard_normal(g);
        pairs.emplace_back(x, y);
      }
      append(verify_theorem2_bridge(lab.potential(), lab.family(), cert.rho, certified_or_null(cert.theorem2), pairs, ctx));
    } else if (id == ids::kCor1) {
      require(cert.norm_B.has_value(), ErrorCode::NotContractive, "corollary 1 needs a constant B");
      append(verify_corollary1(q, cert.rho.rho, *cert.norm_B, cert.C, laws("cor1", o.trials, 1.0), ctx));
    } else if (id == ids::kProp2) {
      std::vector<std::pair<GaussianMeasure, GaussianMeasure>> pairs;
      const auto a = laws("prop2-a", at_least_one(o.trials / 20), 2.0);
      const auto b = laws("prop2-b", a.size(), 2.0);
      for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(a[i], b[i]);
      append(verify_prop2(*kernel, cert.delta(), pairs, 2000, ctx));
    }
  }
  if (wanted.count(ids::kStep) || wanted.count(ids::kLemma1) || wanted.count(ids::kChain)) {
    const std::size_t lo = shortest_chain(lab.family());
    const auto ps = laws("chain", at_least_one(o.trials / 4), 1.0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Rng g = make_rng(o.seed, fnv1a("chain-seq"), i);
      const std::size_t M = lo + std::uniform_int_distribution<std::size_t>(0, 6)(g);
      const auto trace = interpolation_chain(ps[i], *kernel, draw_sequence(lab.family(), M, g));
      append(keep(verify_lemma1_and_step(trace, cert.rho, ctx, i), wanted));
    }
  }
}

void run_grid(const Lab& lab, const Certification& cert, const SuiteOptions& o, const VerifyContext& ctx,
              const std::set<std::string>& wanted, std::vector<VerificationReport>& out) {
  const GridKernel& kernel = *lab.grid();
  const GridMeasure& q = kernel.q();
  auto append = [&](std::vector<VerificationReport> r) { out.insert(out.end(), r.begin(), r.end()); };
  auto laws = [&](const char* stream, std::size_t count) {
    std::vector<GridMeasure> ps;
    for (std::size_t i = 0; i < count; ++i) {
      Rng g = make_rng(o.seed, fnv1a(stream), i);
      ps.push_back(random_grid_law(q, g));
    }
    return ps;
  };

  for (const auto& id : all_inequality_ids()) {
    if (!wanted.count(id)) continue;
    if (id == ids::kAux) {
      append(verify_aux_theorem(kernel, cert.rho, laws("aux", o.trials), {1, 2, 3, 4, 5, 6, 7, 8}, ctx));
    } else if (id == ids::kProp2) {
      const auto a = laws("prop2-a", o.trials), b = laws("prop2-b", o.trials);
      std::vector<std::pair<GridMeasure, GridMeasure>> pairs;
      for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(a[i], b[i]);
      append(verify_prop2(kernel, cert.delta(), pairs, ctx));
    } else if (id == ids::kCor2) {
      const auto ps = laws("cor2", at_least_one(o.trials / 50));
      for (std::size_t i = 0; i < ps.size(); ++i) append(verify_corollary2(kernel, cert.delta(), ps[i], 30, ctx, i));
    } else if (id == ids::kThm1) {
      append(verify_theorem1(q, cert.theorem1(), laws("thm1", o.trials), ctx));
    } else if (id == ids::kThm2Bridge) {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < o.trials; ++i) {
        Rng g = make_rng(o.seed, fnv1a("thm2-bridge"), i);
        std::uniform_int_distribution<std::size_t> pick(0, q.size() - 1);
        pairs.emplace_back(pick(g), pick(g));
      }
      append(verify_theorem2_bridge(kernel, lab.potential(), cert.rho, certified_or_null(cert.theorem2), pairs, ctx));
    } else if (id == ids::kConcentration) {
      std::vector<std::pair<StateSet, StateSet>> sets;
      for (std::size_t i = 0; i < o.trials; ++i) {
        Rng g = make_rng(o.seed, fnv1a("conc1.1"), i);
        sets.push_back(random_tail_sets(q, g));
      }
      append(verify_concentration(q, cert.theorem1().multiplier(), sets, ctx));
    }
  }
  if (wanted.count(ids::kStep) || wanted.count(ids::kLemma1) || wanted.count(ids::kChain)) {
    const std::size_t lo = shortest_chain(lab.family());
    const auto ps = laws("chain", at_least_one(o.trials / 4));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Rng g = make_rng(o.seed, fnv1a("chain-seq"), i);
      const std::size_t M = lo + std::uniform_int_distribution<std::size_t>(0, 6)(g);
      const auto trace = interpolation_chain(ps[i], kernel, draw_sequence(lab.family(), M, g));
      append(keep(verify_lemma1_and_step(trace, cert.rho, ctx, i), wanted));
    }
  }
}

}  // namespace

std::vector<VerificationReport> run_suites(const Lab& lab, const Certification& cert, const SuiteOptions& options) {
  const auto supported = supported_suites(lab);
  std::set<std::string> wanted;
  if (options.ids.empty()) {
    wanted.insert(supported.begin(), supported.end());
  } else {
    const auto& all = all_inequality_ids();
    for (const auto& id : options.ids) {
      require(std::find(all.begin(), all.end(), id) != all.end(), ErrorCode::ConfigError, "unknown suite '" + id + "'");
      require(std::find(supported.begin(), supported.end(), id) != supported.end(), ErrorCode::ConfigError,
              "suite '" + id + "' is not available in " + std::string(to_string(lab.mode())) + " mode");
      wanted.insert(id);
    }
  }

  VerifyContext ctx;
  ctx.model_hash = lab.config().hash;
  ctx.seed = options.seed;
  ctx.tolerances = options.tolerances;
  ctx.labels = {"rho:" + std::string(to_string(cert.rho.kind))};
  if (const auto* c = std::get_if<ContractivityCertificate>(&cert.contractivity)) {
    ctx.labels.push_back("delta:" + std::string(to_string(c->method)));
    ctx.rigorous = cert.rho.rigorous && c->rigorous;
  } else {
    ctx.rigorous = cert.rho.rigorous;
  }
  ctx.labels.push_back(ctx.rigorous ? "exact" : "empirical");

  std::vector<VerificationReport> out;
  if (lab.mode() == Mode::Gaussian)
    run_gaussian(lab, cert, options, ctx, wanted, out);
  else
    run_grid(lab, cert, options, ctx, wanted, out);
  return out;
}

void simulate_curves(const Lab& lab, const Certification* cert, const SimulateOptions& o, std::ostream& csv) {
  Rng g = make_rng(o.seed, fnv1a("simulate"), 0);
  const std::uint64_t chain_seed = derive_seed(o.seed, fnv1a("simulate"), 1);
  CoupledChainStats stats;
  double w0 = 0.0;
  if (lab.mode() == Mode::Gaussian) {
    const GaussianKernel* kernel = lab.gaussian();
    if (kernel == nullptr) fail(ErrorCode::NotPositiveDefinite, lab.gaussian_status());
    const auto p = random_gaussian_law(kernel->q().dimension(), g, 2.0);
    const auto r = random_gaussian_law(kernel->q().dimension(), g, 2.0);
    stats = simulate_coupled_chain(*kernel, p, r, o.steps, o.trials, chain_seed);
    w0 = w2_gaussian(p, r);
  } else {
    const GridKernel& kernel = *lab.grid();
    const auto p = random_grid_law(kernel.q(), g);
    const auto r = random_grid_law(kernel.q(), g);
    stats = simulate_coupled_chain(kernel, p, r, o.steps, o.trials, chain_seed);
    w0 = w2_exact_lp(p, r).distance;
  }
  stats.write_csv(csv);
  if (cert == nullptr || !cert->certified()) return;
  const double factor = 1.0 - static_cast<double>(cert->t) * cert->delta() / static_cast<double>(cert->N);
  double env = w0 * w0;
  for (std::size_t m = 0; m <= o.steps; ++m, env *= factor) csv << m << ",envelope," << env << ",0\n";
}

}  // namespace gibbslab
