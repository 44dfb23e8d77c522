#include "qlattice/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace qlattice {

namespace {

std::string real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("malformed real '" + s + "'");
  }
  if (used != s.size()) throw IoError("malformed real '" + s + "'");
  return v;
}

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double json_real(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw DomainError("unknown format '" + name + "' (expected csv or json)");
}

ResultTable make_table(const EnsembleHistogram& hist, const ComparisonReport& report) {
  if (report.lo != hist.lo || report.expected.size() != static_cast<Eigen::Index>(hist.counts.size())) {
    throw DomainError("make_table: report and histogram windows differ");
  }
  ResultTable t;
  t.scenario = hist.scenario;
  t.seed = hist.seed;
  t.n_particles = hist.n_particles;
  t.n_steps = hist.n_steps;
  for (long xi = hist.lo; xi <= hist.hi(); ++xi) {
    const auto i = static_cast<Eigen::Index>(xi - hist.lo);
    t.rows.push_back({xi, hist.count(xi), report.frequency(i), report.expected(i), report.std_residual(i)});
  }
  t.summary = ResultSummary{report.tv, report.tv_threshold, report.chi2, report.dof,
                            report.chi2_p_value, report.max_std_residual, report.pass};
  return t;
}

std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  out << "# scenario=" << t.scenario << "\n"
      << "# seed=" << t.seed << "\n"
      << "# n_particles=" << t.n_particles << "\n"
      << "# n_steps=" << t.n_steps << "\n"
      << "# version=" << t.version << "\n";
  if (t.summary) {
    const auto& s = *t.summary;
    out << "# tv=" << real(s.tv) << "\n"
        << "# tv_threshold=" << real(s.tv_threshold) << "\n"
        << "# chi2=" << real(s.chi2) << "\n"
        << "# dof=" << s.dof << "\n"
        << "# chi2_p_value=" << real(s.chi2_p_value) << "\n"
        << "# max_std_residual=" << real(s.max_std_residual) << "\n"
        << "# pass=" << (s.pass ? "true" : "false") << "\n";
  }
  out << "xi,count,frequency,expected,std_residual\n";
  for (const auto& r : t.rows) {
    out << r.xi << ',' << r.count << ',' << real(r.frequency) << ',' << real(r.expected) << ','
        << real(r.std_residual) << "\n";
  }
  return out.str();
}

ResultTable table_from_csv(const std::string& text) {
  ResultTable t;
  t.version.clear();
  ResultSummary s;
  bool has_summary = false;
  bool header_seen = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "scenario") t.scenario = val;
      else if (key == "seed") t.seed = std::stoull(val);
      else if (key == "n_particles") t.n_particles = std::stol(val);
      else if (key == "n_steps") t.n_steps = std::stol(val);
      else if (key == "version") t.version = val;
      else {
        has_summary = true;
        if (key == "tv") s.tv = parse_real(val);
        else if (key == "tv_threshold") s.tv_threshold = parse_real(val);
        else if (key == "chi2") s.chi2 = parse_real(val);
        else if (key == "dof") s.dof = std::stol(val);
        else if (key == "chi2_p_value") s.chi2_p_value = parse_real(val);
        else if (key == "max_std_residual") s.max_std_residual = parse_real(val);
        else if (key == "pass") s.pass = val == "true";
      }
      continue;
    }
    if (!header_seen) {
      if (line != "xi,count,frequency,expected,std_residual") throw IoError("unexpected CSV header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw IoError("CSV row with " + std::to_string(cells.size()) + " cells");
    t.rows.push_back({std::stol(cells[0]), std::stoll(cells[1]), parse_real(cells[2]),
                      parse_real(cells[3]), parse_real(cells[4])});
  }
  if (!header_seen) throw IoError("CSV without header row");
  if (has_summary) t.summary = s;
  return t;
}

nlohmann::json to_json(const ResultTable& t) {
  nlohmann::json j;
  j["metadata"] = {{"scenario", t.scenario},
                   {"seed", t.seed},
                   {"n_particles", t.n_particles},
                   {"n_steps", t.n_steps},
                   {"version", t.version}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"xi", r.xi},
                    {"count", r.count},
                    {"frequency", real_json(r.frequency)},
                    {"expected", real_json(r.expected)},
                    {"std_residual", real_json(r.std_residual)}});
  }
  j["rows"] = rows;
  if (t.summary) {
    const auto& s = *t.summary;
    j["tv"] = real_json(s.tv);
    j["tv_threshold"] = real_json(s.tv_threshold);
    j["chi2"] = real_json(s.chi2);
    j["dof"] = s.dof;
    j["chi2_p_value"] = real_json(s.chi2_p_value);
    j["max_std_residual"] = real_json(s.max_std_residual);
    j["pass"] = s.pass;
  }
  return j;
}

ResultTable table_from_json(const nlohmann::json& j) {
  ResultTable t;
  try {
    const auto& m = j.at("metadata");
    t.scenario = m.at("scenario").get<std::string>();
    t.seed = m.at("seed").get<std::uint64_t>();
    t.n_particles = m.at("n_particles").get<long>();
    t.n_steps = m.at("n_steps").get<long>();
    t.version = m.at("version").get<std::string>();
    for (const auto& r : j.at("rows")) {
      t.rows.push_back({r.at("xi").get<long>(), r.at("count").get<std::int64_t>(),
                        json_real(r.at("frequency")), json_real(r.at("expected")),
                        json_real(r.at("std_residual"))});
    }
    if (j.contains("tv")) {
      t.summary = ResultSummary{json_real(j.at("tv")),       json_real(j.at("tv_threshold")),
                                json_real(j.at("chi2")),     j.at("dof").get<long>(),
                                json_real(j.at("chi2_p_value")), json_real(j.at("max_std_residual")),
                                j.at("pass").get<bool>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed result JSON: ") + e.what());
  }
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit_results(const ResultTable& table, Format format, const std::string& path) {
  write_text(path, format == Format::Csv ? to_csv(table) : to_json(table).dump(2) + "\n");
}

ResultTable read_results(const std::string& path) {
  const std::string text = read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return table_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("'" + path + "': " + e.what());
    }
  }
  return table_from_csv(text);
}

std::string bosons_to_csv(const std::vector<BosonRecord>& bosons) {
  std::ostringstream out;
  out << "xi,tau,key,particle_source,register_source,w,w0_scaled,ell\n";
  for (const auto& r : bosons) {
    const auto& b = r.boson;
    out << r.xi << ',' << r.tau << ',' << b.key.delta() << ',' << b.key.particle_source << ','
        << b.key.register_source << ',' << real(b.w) << ',' << real(b.w0_scaled) << ',' << b.ell
        << "\n";
  }
  return out.str();
}

nlohmann::json to_json(const CertificationReport& report) {
  nlohmann::json j;
  j["max_tau"] = report.max_tau;
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : report.p_values) ps.push_back(p.str());
  j["p_values"] = ps;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"name", e.name},
                       {"instances", e.instances},
                       {"max_deviation", e.max_deviation.str()},
                       {"exact", e.exact()}});
  }
  j["entries"] = entries;
  j["all_exact"] = report.all_exact();
  return j;
}

}  // namespace qlattice
