#pragma once

// Flat-file output of histograms, comparison reports, boson dumps and
// certification reports. Reals are written with 17 significant digits so
// files read back bit-exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlattice/compare.hpp"
#include "qlattice/ensemble.hpp"
#include "qlattice/path_enumerator.hpp"
#include "qlattice/quantum_force.hpp"

namespace qlattice {

struct ResultRow {
  long xi = 0;
  std::int64_t count = 0;
  double frequency = 0.0;
  double expected = 0.0;
  double std_residual = 0.0;
};

struct ResultSummary {
  double tv = 0.0;
  double tv_threshold = 1.0;
  double chi2 = 0.0;
  long dof = 0;
  double chi2_p_value = 1.0;
  double max_std_residual = 0.0;
  bool pass = false;
};

struct ResultTable {
  std::string scenario;
  std::uint64_t seed = 0;
  long n_particles = 0;
  long n_steps = 0;
  std::string version = QLATTICE_VERSION;
  std::vector<ResultRow> rows;
  std::optional<ResultSummary> summary;
};

enum class Format { Csv, Json };

Format parse_format(const std::string& name);

ResultTable make_table(const EnsembleHistogram& hist, const ComparisonReport& report);

std::string to_csv(const ResultTable& table);
nlohmann::json to_json(const ResultTable& table);
ResultTable table_from_csv(const std::string& text);
ResultTable table_from_json(const nlohmann::json& j);

/// Writes to `path`, or to stdout when path is "-". Throws IoError.
void emit_results(const ResultTable& table, Format format, const std::string& path);
ResultTable read_results(const std::string& path);

/// CSV rows xi,tau,key,particle_source,register_source,w,w0_scaled,ell.
std::string bosons_to_csv(const std::vector<BosonRecord>& bosons);

nlohmann::json to_json(const CertificationReport& report);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace qlattice
