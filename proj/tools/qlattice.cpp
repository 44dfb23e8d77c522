// qlattice: run walk ensembles, print predictions, certify closed forms.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlattice/analytic_oracle.hpp"
#include "qlattice/compare.hpp"
#include "qlattice/constants.hpp"
#include "qlattice/ensemble.hpp"
#include "qlattice/lattice_units.hpp"
#include "qlattice/path_enumerator.hpp"
#include "qlattice/quantum_force.hpp"
#include "qlattice/results_io.hpp"

namespace {

using namespace qlattice;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Seed of the multinomial replicas used when no --tv-threshold is given.
constexpr std::uint64_t kCalibrationSeed = 0x5EEDCA1Bull;

struct Options {
  std::string scenario;
  long np = 0;  // 0: scenario default
  long nt = 0;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string format = "csv";
  std::string mode = "trained";
  long delta = 2;
  double p1 = 0.5;
  std::string sources = "-2,0,2";
  std::string probs;
  long ell = 50;
  std::optional<double> p;
  long ring_sources = 16;
  long emission_gap = 0;
  std::string dump_bosons;
  std::optional<double> tv_threshold;
  double q_tolerance = 0.01;
  unsigned threads = default_threads();
  long max_tau = 8;
  std::string p_grid;
  double mass = constants::electron_mass;
  long n_obs = 1;
  std::optional<double> beta;
  long xi = 0;
  long tau = 1;
  std::optional<double> e;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SourceSet multi_sources(const Options& o) {
  std::vector<long> positions;
  for (const auto& s : split_list(o.sources)) positions.push_back(std::stol(s));
  std::vector<double> probs;
  if (o.probs.empty()) {
    probs.assign(positions.size(), 1.0 / static_cast<double>(positions.size()));
  } else {
    for (const auto& s : split_list(o.probs)) probs.push_back(parse_rational(s).convert_to<double>());
  }
  return SourceSet::make(positions, probs);
}

SourceSet scenario_sources(const Options& o) {
  if (o.scenario == "two-slit") return SourceSet::two_slit(o.delta, o.p1);
  return multi_sources(o);
}

int finish(const EnsembleHistogram& hist, const SiteLaw& law, const Options& o, bool require_chi2) {
  CompareOptions copt;
  copt.require_chi2 = require_chi2;
  copt.tv_threshold = o.tv_threshold
                          ? *o.tv_threshold
                          : calibrate_tv_threshold(law.prob, hist.n_particles, kCalibrationSeed);
  const auto report = compare(hist, law, copt);
  emit_results(make_table(hist, report), parse_format(o.format), o.out);
  std::cerr << hist.scenario << ": tv=" << report.tv << " threshold=" << report.tv_threshold
            << " chi2=" << report.chi2 << " dof=" << report.dof
            << " p=" << report.chi2_p_value << (report.pass ? " PASS" : " FAIL") << "\n";
  return report.pass ? kExitPass : kExitFail;
}

int run_free(const Options& o) {
  FreeEnsembleSpec spec;
  spec.n_particles = o.np > 0 ? o.np : 50000;
  spec.n_steps = o.nt > 0 ? o.nt : 300;
  spec.seed = o.seed;
  spec.threads = o.threads;
  if (o.p) spec.momentum = MomentumLaw::fixed(*o.p);
  const auto hist = run_free_ensemble(spec);
  const long tau = spec.n_steps;
  const auto law = o.p ? SiteLaw::tabulate(-tau, tau, [&](long xi) { return rho_pmf<double>(xi, tau, *o.p); })
                       : SiteLaw::tabulate(-tau, tau, [&](long xi) {
                           return ensemble_density_free<double>(SitePoint{xi, tau});
                         });
  return finish(hist, law, o, true);
}

int run_interference(const Options& o) {
  const auto sources = scenario_sources(o);
  const bool full = o.mode == "full";
  const long np = o.np > 0 ? o.np : (full ? 100 : 50000);
  const long nt = o.nt > 0 ? o.nt : 300;
  EnsembleHistogram hist;
  if (full) {
    FullRunSpec spec;
    spec.sources = sources;
    spec.n_particles = np;
    spec.n_steps = nt;
    spec.seed = o.seed;
    spec.emission_gap = o.emission_gap;
    if (o.p) spec.momentum = MomentumLaw::fixed(*o.p);
    auto result = run_full(spec);
    if (!o.dump_bosons.empty()) write_text(o.dump_bosons, bosons_to_csv(result.site_bosons));
    hist = std::move(result.histogram);
  } else {
    if (!o.dump_bosons.empty()) {
      throw CLI::ValidationError("--dump-bosons", "site bosons exist only in full mode");
    }
    TrainedLatticeSpec spec;
    spec.sources = sources;
    spec.n_particles = np;
    spec.n_steps = nt;
    spec.seed = o.seed;
    spec.threads = o.threads;
    if (o.p) spec.momentum = MomentumLaw::fixed(*o.p);
    hist = run_trained(spec);
  }
  const auto law = SiteLaw::tabulate(hist.lo, hist.hi(), [&](long xi) {
                     return std::labs(xi) <= nt ? interference_density(SitePoint{xi, nt}, sources) : 0.0;
                   }).normalized();
  return finish(hist, law, o, false);
}

int run_ring_scenario(const Options& o) {
  RingSpec spec;
  spec.ell = o.ell;
  spec.p = o.p.value_or(0.33);
  spec.n_particles = o.np > 0 ? o.np : 200;
  spec.n_steps = o.nt > 0 ? o.nt : 10000;
  spec.seed = o.seed;
  spec.mode = o.mode == "full" ? LatticeMode::Full : LatticeMode::Trained;
  spec.ring_sources = o.ring_sources;
  spec.threads = o.threads;
  const auto result = run_ring(spec);
  const double predicted = ring_momentum(spec.p, spec.ell).q();
  const double mean = result.mean_q();
  const bool pass = std::abs(mean - predicted) <= o.q_tolerance;

  if (parse_format(o.format) == Format::Json) {
    nlohmann::json j;
    j["metadata"] = {{"scenario", result.histogram.scenario}, {"seed", spec.seed},
                     {"n_particles", spec.n_particles},      {"n_steps", spec.n_steps},
                     {"ell", spec.ell},                      {"p", spec.p},
                     {"version", QLATTICE_VERSION}};
    j["mean_q"] = mean;
    j["predicted_q"] = predicted;
    j["q_tolerance"] = o.q_tolerance;
    j["pass"] = pass;
    j["q_estimates"] = result.q_estimates;
    j["site_counts"] = result.histogram.counts;
    write_text(o.out, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out.precision(17);
    out << "# scenario=" << result.histogram.scenario << "\n# seed=" << spec.seed
        << "\n# n_particles=" << spec.n_particles << "\n# n_steps=" << spec.n_steps
        << "\n# ell=" << spec.ell << "\n# p=" << spec.p << "\n# version=" << QLATTICE_VERSION
        << "\n# mean_q=" << mean << "\n# predicted_q=" << predicted
        << "\n# pass=" << (pass ? "true" : "false") << "\nparticle,q_estimate\n";
    for (std::size_t i = 0; i < result.q_estimates.size(); ++i) {
      out << i << ',' << result.q_estimates[i] << "\n";
    }
    write_text(o.out, out.str());
  }
  std::cerr << "ring: mean q=" << mean << " predicted=" << predicted << (pass ? " PASS" : " FAIL") << "\n";
  return pass ? kExitPass : kExitFail;
}

int run_predict(const Options& o) {
  const auto point = SitePoint::make(o.xi, o.tau);
  const double p = o.p.value_or(0.0);
  nlohmann::json j;
  j["xi"] = o.xi;
  j["tau"] = o.tau;
  j["p"] = p;
  j["rho_pmf"] = rho_pmf<double>(o.xi, o.tau, p);
  if (std::abs(p) < 1.0) j["rho_gaussian_limit"] = rho_gaussian_limit(o.xi, o.tau, p);
  j["energy_site_mean"] = energy_site_mean<double>(point);
  if (o.tau >= 2) j["energy_site_variance"] = energy_site_variance<double>(point);
  j["ensemble_density_free"] = ensemble_density_free<double>(point);
  j["qm_density_single"] = qm_density_single<double>(o.tau);
  const auto action = action_value<double>(point);
  j["sigma_action"] = action.sigma_action;
  j["phase"] = action.phase();
  j["qm_phase"] = std::numbers::pi * qm_phase_over_pi<double>(point);
  j["two_slit_density"] = interference_density(point, SourceSet::two_slit(o.delta, o.p1));
  j["multi_slit_density"] = interference_density(point, multi_sources(o));
  j["ring_q"] = ring_momentum(p, o.ell).q();
  const double e = o.e.value_or((1.0 + p * p) / 2.0);
  j["e"] = e;
  j["matter_wave_frequency"] = matter_wave_frequency(e);
  if (parse_format(o.format) == Format::Json) {
    write_text(o.out, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out.precision(17);
    out << "quantity,value\n";
    for (const auto& [k, v] : j.items()) out << k << ',' << v.get<double>() << "\n";
    write_text(o.out, out.str());
  }
  return kExitPass;
}

int run_verify(const Options& o) {
  std::vector<Rational> grid;
  if (o.p_grid.empty()) {
    grid = default_certification_grid();
  } else {
    for (const auto& s : split_list(o.p_grid)) grid.push_back(parse_rational(s));
  }
  const auto report = certify(o.max_tau, grid);
  write_text(o.out, to_json(report).dump(2) + "\n");
  std::cerr << "verify: " << (report.all_exact() ? "all closed forms exact" : "deviation found") << "\n";
  return report.all_exact() ? kExitPass : kExitFail;
}

int run_units(const Options& o) {
  const auto scale = lattice_scale_from_mass(o.mass);
  const auto unc = uncertainty_product(o.n_obs, scale);
  nlohmann::json j;
  j["mass"] = scale.mass;
  j["X"] = scale.X;
  j["T"] = scale.T;
  j["X_over_T"] = scale.X / scale.T;
  j["mass_X2_over_T"] = scale.mass * scale.X * scale.X / scale.T;
  j["uncertainty"] = {{"N", o.n_obs}, {"dv", unc.dv}, {"dx", unc.dx}, {"product", unc.product}};
  if (o.beta) {
    const auto img = lorentz_transform(o.xi, o.tau, o.p.value_or(0.0), Frame::make(*o.beta));
    j["lorentz"] = {{"beta", *o.beta}, {"xi", img.xi}, {"tau", img.tau}, {"p", img.p}, {"b", img.b}};
  }
  write_text(o.out, j.dump(2) + "\n");
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice random-walk ensembles, closed-form predictions and exact certification"};
  app.set_version_flag("--version", std::string(QLATTICE_VERSION));
  app.set_config("--config", "", "Scenario file (TOML key = value); flags override it");
  app.fallthrough();
  Options o;

  app.add_option("--scenario", o.scenario, "Subcommand to run when none is given (config files)")
      ->check(CLI::IsMember({"free", "two-slit", "multi-slit", "ring", "predict", "verify", "units"}));
  app.add_option("--np", o.np, "Number of particles")->check(CLI::PositiveNumber);
  app.add_option("--nt", o.nt, "Number of steps per particle")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Master seed")->envname("QLATTICE_SEED");
  app.add_option("--out", o.out, "Output path, - for stdout");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--mode", o.mode, "trained or full")->check(CLI::IsMember({"trained", "full"}));
  app.add_flag_callback("--trained", [&] { o.mode = "trained"; }, "Trained lattice (default)");
  app.add_flag_callback("--full", [&] { o.mode = "full"; }, "Full lattice memory");
  app.add_option("--delta", o.delta, "Two-slit source separation (even)");
  app.add_option("--p1", o.p1, "Probability of the source at +delta/2");
  app.add_option("--sources", o.sources, "Comma-separated source sites");
  app.add_option("--probs", o.probs, "Comma-separated source probabilities (default equal)");
  app.add_option("--ell", o.ell, "Ring circumference");
  app.add_option("--p", o.p, "Fixed momentum propensity (default: uniform on [-1,1])");
  app.add_option("--ring-sources,--ring_sources", o.ring_sources, "Apparent sources in trained ring mode");
  app.add_option("--emission-gap,--emission_gap", o.emission_gap, "Lattice ticks between emissions (full mode)");
  app.add_option("--dump-bosons", o.dump_bosons, "Write resident site bosons to this CSV (full mode)");
  app.add_option("--tv-threshold,--tv_threshold", o.tv_threshold,
                 "TV pass threshold (default: 99th percentile of 100 multinomial replicas)");
  app.add_option("--q-tolerance", o.q_tolerance, "Ring: allowed |mean q - predicted q|");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--max-tau", o.max_tau, "verify: largest tau");
  app.add_option("--p-grid", o.p_grid, "verify: comma-separated rationals");
  app.add_option("--mass", o.mass, "units: particle mass in kg");
  app.add_option("--n-obs", o.n_obs, "units: observation length N");
  app.add_option("--beta", o.beta, "units: frame velocity V/c");
  app.add_option("--xi", o.xi, "Site");
  app.add_option("--tau", o.tau, "Time");
  app.add_option("--e", o.e, "predict: energy propensity");

  for (const char* name : {"free", "two-slit", "multi-slit", "ring", "predict", "verify", "units"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("free")->description("Free walkers, compared with 1/(2tau+1) or rho_pmf");
  app.get_subcommand("two-slit")->description("Two sources at +-delta/2");
  app.get_subcommand("multi-slit")->description("Sources at --sources with --probs");
  app.get_subcommand("ring")->description("Ring of circumference --ell; reports mean q");
  app.get_subcommand("predict")->description("Closed-form values at (--xi, --tau)");
  app.get_subcommand("verify")->description("Exact certification against path enumeration");
  app.get_subcommand("units")->description("Lattice scale for --mass");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto chosen = app.get_subcommands();
  if (!chosen.empty()) o.scenario = chosen.front()->get_name();
  if (o.scenario.empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (o.scenario == "free") return run_free(o);
    if (o.scenario == "two-slit" || o.scenario == "multi-slit") return run_interference(o);
    if (o.scenario == "ring") return run_ring_scenario(o);
    if (o.scenario == "predict") return run_predict(o);
    if (o.scenario == "verify") return run_verify(o);
    return run_units(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number (" << e.what() << ")\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
