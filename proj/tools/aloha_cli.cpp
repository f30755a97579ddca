// Command-line front end: membership testing, stabilizing controls, bound
// membership, exact and Monte-Carlo volumes, table reproduction, boundary
// cloud emission, and the property probe suites.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aloha/bounds.hpp"
#include "aloha/core.hpp"
#include "aloha/membership.hpp"
#include "aloha/rng.hpp"
#include "aloha/stability.hpp"
#include "aloha/volume.hpp"
#include "record.hpp"

namespace {

using namespace aloha;
using cli::Record;

constexpr int kExitParse = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitUnsupported = 4;
constexpr int kExitViolation = 5;

struct UnsupportedMethod : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropertyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rates and probabilities accept decimals or fractions ("1/16").
double parse_number(const std::string& tok) {
  const auto slash = tok.find('/');
  std::size_t used = 0;
  if (slash == std::string::npos) {
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing characters in '" + tok + "'");
    return v;
  }
  const std::string num = tok.substr(0, slash), den = tok.substr(slash + 1);
  const double a = std::stod(num, &used);
  if (used != num.size()) throw std::invalid_argument("bad fraction '" + tok + "'");
  const double b = std::stod(den, &used);
  if (used != den.size() || b == 0.0) throw std::invalid_argument("bad fraction '" + tok + "'");
  return a / b;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const auto comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty()) throw std::invalid_argument("empty list element");
    out.push_back(parse_number(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ALOHA_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

std::optional<Family> family_from_id(const std::string& id) {
  for (Family f : {Family::Lambda, Family::Srs, Family::PiStar, Family::Po, Family::SiStar,
                   Family::SoStar, Family::Ei, Family::Eo, Family::PoAndSo}) {
    if (id == family_id(f)) return f;
  }
  return std::nullopt;
}

double factorial_d(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void emit(const Record& r) { std::printf("%s\n", r.dump().c_str()); }

Record report_record(const MembershipReport& rep) {
  Record r;
  r.set("class", to_string(rep.cls));
  r.set("roots", Record::array_of(rep.roots));
  Record controls = Record::array();
  for (const auto& c : rep.controls) controls.push(Record::array_of(c.v));
  r.set("controls", std::move(controls));
  Record reduced = Record::array();
  for (std::size_t i : rep.reduced_dims) reduced.push(Record::integer(static_cast<long long>(i) + 1));
  r.set("reduced_dims", std::move(reduced));
  if (rep.special_unit_vector)
    r.set("special_unit_vector", static_cast<long long>(*rep.special_unit_vector) + 1);
  else
    r.set("special_unit_vector", Record::null());
  return r;
}

// ---------------------------------------------------------------------------
// membership

int cmd_membership(const std::vector<double>& rates, double tol) {
  const RateVector x{rates};
  const MembershipReport rep = classify(x, tol);
  Record r;
  r.set("command", "membership");
  r.set("rates", Record::array_of(rates));
  r.set("n", static_cast<int>(rates.size()));
  r.set("tol", tol);
  Record body = report_record(rep);
  r.set("result", std::move(body));
  emit(r);
  return 0;
}

// ---------------------------------------------------------------------------
// volume

int cmd_volume(const std::string& set_id, int n, const std::string& method,
               std::uint64_t samples, std::uint64_t seed, double c, double alpha,
               int workers, bool force) {
  const auto fam = family_from_id(set_id);
  if (!fam) throw CLI::ValidationError("--set", "unknown family '" + set_id + "'");

  Record r;
  r.set("command", "volume");
  r.set("set", set_id);
  r.set("n", n);
  r.set("method", method);

  if (method == "exact") {
    if (!family_has_exact_volume(*fam))
      throw UnsupportedMethod("family '" + set_id + "' has no exact volume; use --method mc");
    ExactVolume ev = (*fam == Family::Lambda && n > kVolLambdaMaxN && force)
                         ? vol_lambda_exact(n, true)
                         : family_exact_volume(*fam, n);
    r.set("fraction", ev.value.str());
    r.set("value", ev.float_value);
    r.set("normalized", ev.float_value * factorial_d(n));
    r.set("terms", static_cast<unsigned long long>(ev.terms));
  } else {
    r.set("samples", static_cast<unsigned long long>(samples));
    r.set("seed", static_cast<unsigned long long>(seed));
    r.set("alpha", alpha);
    if (*fam == Family::Ei || *fam == Family::Eo) r.set("c", c);
    const MCEstimate est = mc_volume(family_predicate(*fam, n, c), n, samples, seed, alpha,
                                     workers);
    r.set("v_hat", est.v_hat);
    r.set("hits", static_cast<unsigned long long>(est.hits));
    r.set("delta_rel", est.delta_rel);
    r.set("normalized_v_hat", est.v_hat * factorial_d(n));
    r.set("degenerate", est.degenerate);
  }
  emit(r);
  return 0;
}

// ---------------------------------------------------------------------------
// table

int cmd_table(int n_min, int n_max, std::uint64_t samples, std::uint64_t seed, double alpha,
              double c, int workers) {
  const Family order[] = {Family::SoStar, Family::Po, Family::PoAndSo,
                          Family::Eo,     Family::Lambda, Family::Ei,
                          Family::SiStar, Family::PiStar, Family::Srs};

  struct Cell {
    double value = 0.0;
    double delta = -1.0;  // negative: exact cell, no CI column value
  };
  std::vector<std::vector<Cell>> cells(std::size(order));

  for (std::size_t fi = 0; fi < std::size(order); ++fi) {
    for (int n = n_min; n <= n_max; ++n) {
      Cell cell;
      if (family_has_exact_volume(order[fi])) {
        // The cheap expansion is exact and covers the full table range.
        const ExactVolume ev = family_exact_volume(order[fi], n, /*use_oracle*/ true);
        cell.value = ev.float_value;
      } else {
        const MCEstimate est =
            mc_volume(family_predicate(order[fi], n, c), n, samples, seed, alpha, workers);
        cell.value = est.v_hat;
        cell.delta = est.delta_rel;
      }
      cells[fi].push_back(cell);
    }
  }

  std::printf("# samples=%llu seed=%llu alpha=%s c=%s\n",
              static_cast<unsigned long long>(samples),
              static_cast<unsigned long long>(seed), cli::format_double(alpha).c_str(),
              cli::format_double(c).c_str());
  std::string header = "table,family";
  for (int n = n_min; n <= n_max; ++n) {
    header += ",n" + std::to_string(n) + ",delta_n" + std::to_string(n);
  }
  std::printf("%s\n", header.c_str());
  for (int normalized = 0; normalized <= 1; ++normalized) {
    for (std::size_t fi = 0; fi < std::size(order); ++fi) {
      std::string row = normalized ? "normalized" : "raw";
      row += ",";
      row += family_id(order[fi]);
      for (int n = n_min; n <= n_max; ++n) {
        const Cell& cell = cells[fi][static_cast<std::size_t>(n - n_min)];
        const double v = normalized ? cell.value * factorial_d(n) : cell.value;
        row += "," + cli::format_double(v);
        row += ",";
        if (cell.delta >= 0.0) row += cli::format_double(cell.delta);
      }
      std::printf("%s\n", row.c_str());
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const std::vector<double>& rates, double c, double tol) {
  const RateVector x{rates};
  const int n = static_cast<int>(rates.size());
  const MembershipReport rep = classify(x, tol);

  Record families;
  bool inner_claims = false;
  const bool in_lambda = rep.cls != MembershipClass::Exterior;

  const bool srs = in_srs(x);
  const bool pi_star = in_pi_star(x);
  const bool si = in_sphere_bound(x, sphere_params(n, c_in_star(n), BoundKind::Inner));
  const bool ei = in_ei(x, n, c);
  const bool po = in_po(x);
  const bool so = in_sphere_bound(x, sphere_params(n, 1.0, BoundKind::Outer));
  const bool eo = in_eo(x, n, c);
  families.set("srs", srs);
  families.set("pi_star", pi_star);
  families.set("si_star", si);
  families.set("ei", ei);
  families.set("po", po);
  families.set("so_star", so);
  families.set("eo", eo);
  families.set("po_and_so", po && so);
  inner_claims = srs || pi_star || si || ei;

  Record r;
  r.set("command", "bounds");
  r.set("rates", Record::array_of(rates));
  r.set("n", n);
  r.set("c", c);
  r.set("classify", to_string(rep.cls));
  r.set("families", std::move(families));
  // An inner bound asserting membership of an Exterior point indicates a bug.
  r.set("inner_bound_disagreement", inner_claims && !in_lambda);
  emit(r);
  return 0;
}

// ---------------------------------------------------------------------------
// boundary-cloud

void emit_compositions(int n, int g, std::vector<int>& parts, int pos, int left) {
  if (pos == n - 1) {
    parts[pos] = left;
    ContentionVector p{std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i) p[i] = static_cast<double>(parts[i]) / g;
    const RateVector x = x_of_p(p);
    std::string row;
    for (int i = 0; i < n; ++i) {
      if (i) row += ",";
      row += cli::format_double(x[i]);
    }
    std::printf("%s\n", row.c_str());
    return;
  }
  for (int k = 0; k <= left; ++k) {
    parts[pos] = k;
    emit_compositions(n, g, parts, pos + 1, left - k);
  }
}

int cmd_boundary_cloud(int n, int density) {
  std::string header;
  for (int i = 0; i < n; ++i) {
    if (i) header += ",";
    header += "x" + std::to_string(i + 1);
  }
  std::printf("%s\n", header.c_str());
  std::vector<int> parts(n, 0);
  emit_compositions(n, density - 1, parts, 0, density - 1);
  return 0;
}

// ---------------------------------------------------------------------------
// probes

int finish_probe(Record& r, long violations) {
  r.set("violations", violations);
  emit(r);
  if (violations > 0) throw PropertyViolation("probe reported violations");
  return 0;
}

int probe_sandwich(int n, long samples, std::uint64_t seed, double c) {
  const SphereParams si = sphere_params(n, c_in_star(n), BoundKind::Inner);
  const SphereParams so = sphere_params(n, 1.0, BoundKind::Outer);
  const EllipsoidParams ein = ellipsoid_params(n, c, BoundKind::Inner);
  const EllipsoidParams eout = ellipsoid_params(n, c, BoundKind::Outer);
  const PolytopeP P = make_polytope(n);

  long inner_viol = 0, outer_viol = 0;
  SplitMix64 rng = SplitMix64::stream(seed, 0);
  for (long s = 0; s < samples; ++s) {
    const RateVector x = sample_cube(n, rng);
    const bool member = classify(x).cls != MembershipClass::Exterior;
    const bool any_inner = in_srs(x) || in_pi_star(x) || in_sphere_bound(x, si) ||
                           (in_simplex(x) && quad_form(x, ein) >= 1.0 - kBoundarySlack);
    if (any_inner && !member) ++inner_viol;
    if (member) {
      const bool all_outer = in_po(x, P) && in_sphere_bound(x, so) &&
                             (in_simplex(x) && quad_form(x, eout) >= 1.0 - kBoundarySlack);
      if (!all_outer) ++outer_viol;
    }
  }
  Record r;
  r.set("command", "probe");
  r.set("kind", "sandwich");
  r.set("n", n);
  r.set("samples", samples);
  r.set("seed", static_cast<unsigned long long>(seed));
  r.set("c", c);
  r.set("inner_violations", inner_viol);
  r.set("outer_violations", outer_viol);
  return finish_probe(r, inner_viol + outer_viol);
}

int probe_monotonicity(const std::string& family, int n, std::vector<double> cs, long samples,
                       std::uint64_t seed) {
  if (family != "ei" && family != "eo" && family != "si")
    throw CLI::ValidationError("--family", "expected ei, eo, or si");
  if (cs.empty()) {
    const double cmin = (family == "eo") ? 1.0 : c_in_star(n);
    cs = {cmin, 1.5, 2.0, 4.0};
  }
  std::sort(cs.begin(), cs.end());

  std::vector<std::function<bool(const RateVector&)>> members;
  for (double c : cs) {
    if (family == "ei") {
      members.push_back(family_predicate(Family::Ei, n, c));
    } else if (family == "eo") {
      members.push_back(family_predicate(Family::Eo, n, c));
    } else {
      const SphereParams sp = sphere_params(n, c, BoundKind::Inner);
      members.push_back([sp](const RateVector& x) { return in_sphere_bound(x, sp); });
    }
  }

  long violations = 0;
  SplitMix64 rng = SplitMix64::stream(seed, 0);
  for (long s = 0; s < samples; ++s) {
    const ContentionVector u = sample_simplex_interior(n, rng);
    const RateVector x{u.v};
    std::vector<bool> in(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) in[i] = members[i](x);
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        // Inner ellipsoids grow with c; inner spheres and outer ellipsoids
        // shrink with c.
        const bool ok = (family == "ei") ? (!in[i] || in[j]) : (!in[j] || in[i]);
        if (!ok) ++violations;
      }
    }
  }
  Record r;
  r.set("command", "probe");
  r.set("kind", "monotonicity");
  r.set("family", family);
  r.set("n", n);
  r.set("c_grid", Record::array_of(cs));
  r.set("samples", samples);
  r.set("seed", static_cast<unsigned long long>(seed));
  return finish_probe(r, violations);
}

int probe_convexity(const std::vector<double>& rates, long trials, std::uint64_t seed) {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{rates});
  const ConvexityReport rep = convexity_probe(ctx, trials, seed);
  Record r;
  r.set("command", "probe");
  r.set("kind", "convexity");
  r.set("rates", Record::array_of(rates));
  r.set("pairs", rep.pairs);
  r.set("seed", static_cast<unsigned long long>(seed));
  r.set("worst_slack", rep.worst_slack);
  return finish_probe(r, rep.violations);
}

int probe_pseudoconvexity(int n, int index, long trials, std::uint64_t seed) {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{std::vector<double>(n, 0.0)});
  const PseudoconvexityReport rep = pseudoconvexity_probe(ctx, index - 1, trials, seed);
  Record r;
  r.set("command", "probe");
  r.set("kind", "pseudoconvexity");
  r.set("n", n);
  r.set("i", index);
  r.set("samples", rep.samples);
  r.set("seed", static_cast<unsigned long long>(seed));
  r.set("min_quadratic", rep.min_quadratic);
  return finish_probe(r, rep.nonpositive);
}

int probe_sublevel(const std::vector<double>& rates, int index, double alpha_level, long trials,
                   std::uint64_t seed) {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{rates});
  const SublevelReport rep = sublevel_probe(ctx, index - 1, alpha_level, trials, seed);
  Record r;
  r.set("command", "probe");
  r.set("kind", "sublevel");
  r.set("rates", Record::array_of(rates));
  r.set("i", index);
  r.set("alpha_level", alpha_level);
  r.set("pairs", rep.pairs);
  r.set("seed", static_cast<unsigned long long>(seed));
  r.set("worst_slack", rep.worst_slack);
  return finish_probe(r, rep.violations);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted-Aloha stability-region inner bound: membership, controls, bounds, volumes"};
  app.require_subcommand(1);

  std::string rates_str, set_id, method, probe_kind, family, c_list_str;
  int n = 2, density = 101, index = 1, n_min = 2, n_max = 5, workers = 0;
  double tol = kBoundaryTol, c = 2.0, alpha = 0.05, alpha_level = 0.0;
  std::uint64_t samples = 1000000;
  long trials = 1000, probe_samples = 100000;
  std::optional<std::uint64_t> seed_flag;
  bool force = false, csv = true;

  auto* mem = app.add_subcommand("membership", "Classify a rate vector and report controls");
  mem->add_option("--rates", rates_str, "comma-separated rates (decimals or fractions)")
      ->required();
  mem->add_option("--tol", tol, "boundary tolerance on |f|");

  auto* vol = app.add_subcommand("volume", "Volume of a bound family (exact or Monte-Carlo)");
  vol->add_option("--set", set_id, "family id")->required();
  vol->add_option("--n", n, "dimension")->required()->check(CLI::Range(2, 16));
  vol->add_option("--method", method, "exact|mc")->required()
      ->check(CLI::IsMember({"exact", "mc"}));
  vol->add_option("--samples", samples, "Monte-Carlo samples");
  vol->add_option("--seed", seed_flag, "RNG seed (default: ALOHA_SEED or 0)");
  vol->add_option("--c", c, "ellipsoid center scalar");
  vol->add_option("--alpha", alpha, "CI confidence complement");
  vol->add_option("--workers", workers, "worker threads (0 = auto)");
  vol->add_flag("--force", force, "allow the large-n exact region volume");

  auto* tab = app.add_subcommand("table", "Raw and normalized volume tables (CSV)");
  tab->add_option("--n-min", n_min)->check(CLI::Range(2, 7));
  tab->add_option("--n-max", n_max)->check(CLI::Range(2, 7));
  tab->add_option("--samples", samples, "Monte-Carlo samples per cell");
  tab->add_option("--seed", seed_flag, "RNG seed (default: ALOHA_SEED or 0)");
  tab->add_option("--alpha", alpha, "CI confidence complement");
  tab->add_option("--c", c, "ellipsoid center scalar");
  tab->add_option("--workers", workers, "worker threads (0 = auto)");
  tab->add_flag("--csv", csv, "emit CSV (default)");

  auto* bnd = app.add_subcommand("bounds", "Membership verdict per bound family at a point");
  bnd->add_option("--rates", rates_str)->required();
  bnd->add_option("--c", c, "ellipsoid center scalar");
  bnd->add_option("--tol", tol);

  auto* cloud = app.add_subcommand("boundary-cloud", "Boundary points x(p) on a facet grid (CSV)");
  cloud->add_option("--n", n)->check(CLI::Range(2, 16));
  cloud->add_option("--density", density)->check(CLI::Range(2, 4096));
  cloud->add_flag("--csv", csv, "emit CSV (default)");

  auto* probe = app.add_subcommand("probe", "Property suites; nonzero violations exit 5");
  probe->add_option("kind", probe_kind, "convexity|pseudoconvexity|sublevel|sandwich|monotonicity")
      ->required()
      ->check(CLI::IsMember({"convexity", "pseudoconvexity", "sublevel", "sandwich",
                             "monotonicity"}));
  probe->add_option("--n", n)->check(CLI::Range(2, 16));
  probe->add_option("--rates", rates_str);
  probe->add_option("--samples", probe_samples);
  probe->add_option("--trials", trials);
  probe->add_option("--seed", seed_flag);
  probe->add_option("--c", c_list_str, "c grid (monotonicity) or scalar (sandwich)");
  probe->add_option("--family", family, "ei|eo|si (monotonicity)");
  probe->add_option("--i", index, "excess-rate index, 1-based");
  probe->add_option("--alpha-level", alpha_level, "sublevel threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    const std::uint64_t seed = resolve_seed(seed_flag);
    if (app.got_subcommand(mem)) {
      rc = cmd_membership(parse_list(rates_str), tol);
    } else if (app.got_subcommand(vol)) {
      rc = cmd_volume(set_id, n, method, samples, seed, c, alpha, workers, force);
    } else if (app.got_subcommand(tab)) {
      if (n_min > n_max) throw std::invalid_argument("--n-min exceeds --n-max");
      rc = cmd_table(n_min, n_max, samples, seed, alpha, c, workers);
    } else if (app.got_subcommand(bnd)) {
      rc = cmd_bounds(parse_list(rates_str), c, tol);
    } else if (app.got_subcommand(cloud)) {
      rc = cmd_boundary_cloud(n, density);
    } else if (app.got_subcommand(probe)) {
      if (probe_kind == "sandwich") {
        const double c_scalar = c_list_str.empty() ? 2.0 : parse_list(c_list_str).at(0);
        rc = probe_sandwich(n, probe_samples, seed, c_scalar);
      } else if (probe_kind == "monotonicity") {
        std::vector<double> cs;
        if (!c_list_str.empty()) cs = parse_list(c_list_str);
        const long mono_samples = probe->count("--samples") ? probe_samples : 10000;
        rc = probe_monotonicity(family, n, cs, mono_samples, seed);
      } else if (probe_kind == "convexity") {
        if (rates_str.empty()) throw std::invalid_argument("probe convexity needs --rates");
        rc = probe_convexity(parse_list(rates_str), trials, seed);
      } else if (probe_kind == "pseudoconvexity") {
        rc = probe_pseudoconvexity(n, index, trials, seed);
      } else {
        if (rates_str.empty()) throw std::invalid_argument("probe sublevel needs --rates");
        rc = probe_sublevel(parse_list(rates_str), index, alpha_level, trials, seed);
      }
    }
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const UnsupportedMethod& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUnsupported;
  } catch (const DimensionTooLarge& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUnsupported;
  } catch (const PropertyViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitViolation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }

  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  std::fprintf(stderr, "# elapsed_ms=%lld\n", static_cast<long long>(ms));
  return rc;
}
