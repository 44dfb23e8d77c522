#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "qlattice/analytic_oracle.hpp"
#include "qlattice/results_io.hpp"

using namespace qlattice;

namespace {

ResultTable sample_table() {
  FreeEnsembleSpec spec;
  spec.n_particles = 4000;
  spec.n_steps = 300;
  spec.seed = 12;
  const auto hist = run_free_ensemble(spec);
  const auto law = SiteLaw::tabulate(-300, 300, [](long xi) {
    return ensemble_density_free(SitePoint::make(xi, 300));
  });
  return make_table(hist, compare(hist, law));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qlattice_test_" + name)).string();
}

void check_same(const ResultTable& a, const ResultTable& b) {
  CHECK(a.scenario == b.scenario);
  CHECK(a.seed == b.seed);
  CHECK(a.n_particles == b.n_particles);
  CHECK(a.n_steps == b.n_steps);
  CHECK(a.version == b.version);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].xi == b.rows[i].xi);
    CHECK(a.rows[i].count == b.rows[i].count);
    CHECK(a.rows[i].frequency == b.rows[i].frequency);
    CHECK(a.rows[i].expected == b.rows[i].expected);
    CHECK(a.rows[i].std_residual == b.rows[i].std_residual);
  }
  REQUIRE(a.summary.has_value() == b.summary.has_value());
  if (a.summary) {
    CHECK(a.summary->tv == b.summary->tv);
    CHECK(a.summary->chi2 == b.summary->chi2);
    CHECK(a.summary->dof == b.summary->dof);
    CHECK(a.summary->chi2_p_value == b.summary->chi2_p_value);
    CHECK(a.summary->max_std_residual == b.summary->max_std_residual);
    CHECK(a.summary->pass == b.summary->pass);
  }
}

}  // namespace

TEST_CASE("free run writes a 601-row CSV") {
  const auto t = sample_table();
  const auto csv = to_csv(t);
  std::istringstream in(csv);
  std::string line;
  long data = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!header) {
      CHECK(line == "xi,count,frequency,expected,std_residual");
      header = true;
      continue;
    }
    ++data;
  }
  CHECK(data == 601);
  CHECK(csv.find("# scenario=free-uniform") != std::string::npos);
  CHECK(csv.find("# seed=12") != std::string::npos);
  CHECK(csv.find("# version=") != std::string::npos);
}

TEST_CASE("CSV and JSON round trips are bit-exact") {
  const auto t = sample_table();
  check_same(t, table_from_csv(to_csv(t)));
  check_same(t, table_from_json(nlohmann::json::parse(to_json(t).dump())));

  const auto csv_path = temp_path("rt.csv");
  const auto json_path = temp_path("rt.json");
  emit_results(t, Format::Csv, csv_path);
  emit_results(t, Format::Json, json_path);
  check_same(t, read_results(csv_path));
  check_same(t, read_results(json_path));
  std::remove(csv_path.c_str());
  std::remove(json_path.c_str());
}

TEST_CASE("JSON report fields") {
  auto t = sample_table();
  const auto j = to_json(t);
  for (const char* key : {"tv", "tv_threshold", "chi2", "dof", "chi2_p_value", "max_std_residual", "pass"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["metadata"]["n_steps"] == 300);
  CHECK(j["rows"].size() == 601);
  t.summary->chi2 = std::numeric_limits<double>::infinity();
  const auto back = table_from_json(nlohmann::json::parse(to_json(t).dump()));
  CHECK(std::isinf(back.summary->chi2));
}

TEST_CASE("formats") {
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("json") == Format::Json);
  CHECK_THROWS_AS(parse_format("xml"), DomainError);
}

TEST_CASE("I/O failures name the path") {
  const std::string bad = "/nonexistent-dir/qlattice/out.csv";
  try {
    emit_results(sample_table(), Format::Csv, bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
  try {
    read_results(bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
  CHECK_THROWS_AS(table_from_csv("a,b\n1,2\n"), IoError);
  CHECK_THROWS_AS(table_from_json(nlohmann::json::parse("{}")), IoError);
}

TEST_CASE("boson dump rows") {
  std::vector<BosonRecord> recs{{3, 40, SiteBoson{{-1, 1}, 0.25, -0.5, 7}},
                                {-2, 41, SiteBoson{{1, -1}, -0.125, 0.25, 0}}};
  const auto csv = bosons_to_csv(recs);
  CHECK(csv.rfind("xi,tau,key,particle_source,register_source,w,w0_scaled,ell\n", 0) == 0);
  CHECK(csv.find("3,40,-2,-1,1,0.25,-0.5,7\n") != std::string::npos);
  CHECK(csv.find("-2,41,2,1,-1,-0.125,0.25,0\n") != std::string::npos);
}

TEST_CASE("certification report as JSON") {
  const auto j = to_json(certify(3, {Rational(0), Rational(1, 2)}));
  CHECK(j["max_tau"] == 3);
  CHECK(j["all_exact"] == true);
  CHECK(j["p_values"][1] == "1/2");
  for (const auto& e : j["entries"]) {
    CHECK(e["exact"] == true);
    CHECK(e["max_deviation"] == "0");
  }
}
