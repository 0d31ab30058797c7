#include "socolab/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "socolab/report_io.hpp"

namespace socolab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool wants(const ExperimentConfig& cfg, const std::string& fmt) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), fmt) !=
         cfg.formats.end();
}

CsvTable rounds_table(const RegretReport& rep) {
  CsvTable t;
  std::istringstream hdr(kRoundsHeader);
  std::string col;
  while (std::getline(hdr, col, ',')) t.header.push_back(col);
  const std::string agent = to_string(rep.agent);
  for (int ri = 0; ri < rep.runs; ++ri) {
    const RunSeries& rs = rep.series[ri];
    if (rs.failed) continue;
    for (int tt = 1; tt <= rep.T; ++tt) {
      t.rows.push_back({std::to_string(ri), std::to_string(tt), agent,
                        to_string(rs.phase[tt]),
                        format_number(rs.hitting[tt]),
                        format_number(rs.switching[tt]),
                        format_number(rs.cum_cost[tt]),
                        format_number(rs.cum_regret[tt])});
    }
  }
  return t;
}

std::vector<std::string> summary_row(const RegretReport& rep) {
  return {to_string(rep.agent),
          std::to_string(rep.T),
          std::to_string(rep.runs),
          format_number(rep.stats.mean),
          format_number(rep.stats.se),
          format_number(rep.stats.median),
          format_number(rep.stats.trimmed_mean),
          std::to_string(rep.failures)};
}

CsvTable make_summary_table() {
  CsvTable t;
  std::istringstream hdr(kSummaryHeader);
  std::string col;
  while (std::getline(hdr, col, ',')) t.header.push_back(col);
  return t;
}

// Plots are derived from the CSV tables rather than the in-memory reports,
// so a chart can always be regenerated offline from the written files.
PlotSeries mean_cum_regret_series(const CsvTable& rounds,
                                  const std::string& name) {
  PlotSeries s;
  s.name = name;
  std::map<int, std::pair<double, int>> acc;  // t -> (sum, count)
  for (const auto& row : rounds.rows) {
    const int t = std::stoi(row[1]);
    auto& slot = acc[t];
    slot.first += std::stod(row[7]);
    ++slot.second;
  }
  for (const auto& [t, slot] : acc) {
    s.xs.push_back(t);
    s.ys.push_back(slot.first / slot.second);
  }
  return s;
}

struct ManifestBuilder {
  json j;

  ManifestBuilder(const std::string& command, const ExperimentConfig& cfg) {
    j["version"] = kSoftwareVersion;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["master_seed"] = cfg.master_seed;
    j["resolved_config"] = cfg.to_toml();
    j["outputs"] = json::array();
    j["failures"] = json::object();
    j["warnings"] = json::array();
    j["diagnostics"] = {{"weyl_violations", 0},
                        {"max_recursion_residual", 0.0}};
  }

  void add_output(const std::string& name) { j["outputs"].push_back(name); }
  void add_failures(const std::string& agent, int count) {
    j["failures"][agent] = j["failures"].value(agent, 0) + count;
  }
  void add_warning(const std::string& w) { j["warnings"].push_back(w); }
  void merge_diagnostics(const DiagnosticTotals& d) {
    j["diagnostics"]["weyl_violations"] =
        j["diagnostics"]["weyl_violations"].get<long>() + d.weyl_violations;
    j["diagnostics"]["max_recursion_residual"] = std::max(
        j["diagnostics"]["max_recursion_residual"].get<double>(),
        d.max_recursion_residual);
  }

  std::string dump() const { return j.dump(2) + "\n"; }
};

void note_underdetermined(ManifestBuilder& mb, const ExperimentConfig& cfg,
                          double c1) {
  const long m = std::llround(c1 * cfg.params.rank_hint * cfg.env.d);
  if (m < cfg.env.d * (cfg.env.d + 1) / 2) {
    std::ostringstream os;
    os << "c1=" << c1 << " gives m=" << m << " < d(d+1)/2 = "
       << cfg.env.d * (cfg.env.d + 1) / 2
       << " measurements: recovery is under-determined";
    mb.add_warning(os.str());
  }
}

ExperimentArtifacts finalize(const ExperimentConfig& cfg, ManifestBuilder& mb,
                             std::vector<std::string> files) {
  ExperimentArtifacts art;
  art.directory = cfg.output_directory;
  for (const auto& f : files) mb.add_output(fs::path(f).filename().string());
  art.manifest_path = (fs::path(cfg.output_directory) / "manifest.json").string();
  write_file(art.manifest_path, mb.dump());
  files.push_back(art.manifest_path);
  art.files = std::move(files);
  return art;
}

bool is_explorer(AgentKind k) {
  return k == AgentKind::scale || k == AgentKind::hyscale;
}

}  // namespace

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg, int jobs) {
  if (cfg.T_list.size() != 1)
    throw ConfigError("run: expected a single T (use sweep for T_list)");
  const int T = cfg.T_list[0];
  ManifestBuilder mb("run", cfg);
  std::vector<std::string> files;
  CsvTable summary = make_summary_table();
  std::vector<PlotSeries> curves;

  const std::string resolved_path =
      (fs::path(cfg.output_directory) / "config.resolved.toml").string();
  write_file(resolved_path, cfg.to_toml());
  files.push_back(resolved_path);

  for (AgentKind agent : cfg.agents) {
    const RegretReport rep = evaluate_regret(agent, cfg.params, cfg.env, T,
                                             cfg.runs, cfg.master_seed, jobs);
    const CsvTable rounds = rounds_table(rep);
    if (wants(cfg, "csv")) {
      const std::string path =
          (fs::path(cfg.output_directory) /
           ("rounds_" + std::string(to_string(agent)) + ".csv")).string();
      write_file(path, to_csv(rounds));
      files.push_back(path);
    }
    summary.rows.push_back(summary_row(rep));
    mb.add_failures(to_string(agent), rep.failures);
    mb.merge_diagnostics(rep.diagnostics);
    if (is_explorer(agent)) note_underdetermined(mb, cfg, cfg.params.c1);
    curves.push_back(mean_cum_regret_series(rounds, to_string(agent)));
  }

  if (wants(cfg, "csv")) {
    const std::string path =
        (fs::path(cfg.output_directory) / "summary.csv").string();
    write_file(path, to_csv(summary));
    files.push_back(path);
  }
  if (wants(cfg, "svg")) {
    const std::string path =
        (fs::path(cfg.output_directory) / "regret_curves.svg").string();
    write_file(path, render_line_chart("mean cumulative regret", "round",
                                       "cumulative regret", curves));
    files.push_back(path);
  }
  return finalize(cfg, mb, std::move(files));
}

ExperimentArtifacts sweep_experiment(const ExperimentConfig& cfg, int jobs) {
  if (cfg.T_list.size() < 2)
    throw ConfigError("sweep: expected T_list with at least two horizons");
  ManifestBuilder mb("sweep", cfg);
  std::vector<std::string> files;
  CsvTable table = make_summary_table();
  std::vector<PlotSeries> curves;
  json slopes = json::object();

  const std::string resolved_path =
      (fs::path(cfg.output_directory) / "config.resolved.toml").string();
  write_file(resolved_path, cfg.to_toml());
  files.push_back(resolved_path);

  for (AgentKind agent : cfg.agents) {
    PlotSeries s;
    s.name = to_string(agent);
    std::vector<double> xs, ys;
    bool positive = true;
    for (int T : cfg.T_list) {
      const RegretReport rep = evaluate_regret(agent, cfg.params, cfg.env, T,
                                               cfg.runs, cfg.master_seed, jobs);
      table.rows.push_back(summary_row(rep));
      mb.add_failures(to_string(agent), rep.failures);
      mb.merge_diagnostics(rep.diagnostics);
      s.xs.push_back(T);
      s.ys.push_back(rep.stats.mean);
      if (rep.stats.mean > 0.0) {
        xs.push_back(T);
        ys.push_back(rep.stats.mean);
      } else {
        positive = false;
      }
    }
    if (positive && xs.size() >= 2)
      slopes[to_string(agent)] = loglog_slope(xs, ys);
    if (is_explorer(agent)) note_underdetermined(mb, cfg, cfg.params.c1);
    curves.push_back(std::move(s));
  }
  mb.j["extras"]["loglog_slopes"] = slopes;

  if (wants(cfg, "csv")) {
    const std::string path =
        (fs::path(cfg.output_directory) / "sweep.csv").string();
    write_file(path, to_csv(table));
    files.push_back(path);
  }
  if (wants(cfg, "svg")) {
    const std::string path =
        (fs::path(cfg.output_directory) / "horizon_sweep.svg").string();
    write_file(path, render_line_chart("mean regret vs horizon", "T",
                                       "mean regret", curves));
    files.push_back(path);
  }
  return finalize(cfg, mb, std::move(files));
}

ExperimentArtifacts tune_c1_experiment(const ExperimentConfig& cfg, int jobs) {
  if (cfg.c1_grid.empty())
    throw ConfigError("tune-c1: config needs [run] c1_grid");
  if (cfg.T_list.size() != 1)
    throw ConfigError("tune-c1: expected a single T");
  const int T = cfg.T_list[0];
  ManifestBuilder mb("tune-c1", cfg);
  std::vector<std::string> files;

  const std::string resolved_path =
      (fs::path(cfg.output_directory) / "config.resolved.toml").string();
  write_file(resolved_path, cfg.to_toml());
  files.push_back(resolved_path);

  const C1Profile prof = c1_line_search(cfg.env, cfg.params, cfg.c1_grid, T,
                                        cfg.runs, cfg.master_seed, jobs);
  CsvTable table;
  std::istringstream hdr(kProfileHeader);
  std::string col;
  while (std::getline(hdr, col, ',')) table.header.push_back(col);
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    table.rows.push_back({format_number(prof.grid[i]), std::to_string(T),
                          std::to_string(cfg.runs),
                          format_number(prof.mean_regret[i]),
                          format_number(prof.se[i]),
                          std::to_string(prof.failures[i])});
    note_underdetermined(mb, cfg, prof.grid[i]);
  }
  mb.j["extras"]["best_c1"] = prof.best_c1;

  if (wants(cfg, "csv")) {
    const std::string path =
        (fs::path(cfg.output_directory) / "c1_profile.csv").string();
    write_file(path, to_csv(table));
    files.push_back(path);
  }
  if (wants(cfg, "svg")) {
    PlotSeries s;
    s.name = "scale";
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
      if (!prof.usable[i]) continue;
      s.xs.push_back(prof.grid[i]);
      s.ys.push_back(prof.mean_regret[i]);
    }
    const std::string path =
        (fs::path(cfg.output_directory) / "c1_profile.svg").string();
    write_file(path, render_line_chart("mean regret vs exploration multiplier",
                                       "c1", "mean regret", {s}));
    files.push_back(path);
  }
  return finalize(cfg, mb, std::move(files));
}

Matrix read_matrix_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix file: " + path);
  Matrix M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::runtime_error("ragged matrix file: " + path);
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

std::string diagnose_report(const std::string& model_path,
                            const std::string& estimate_path, int rank_hint) {
  const Matrix A = read_matrix_csv(model_path);
  const Matrix est = read_matrix_csv(estimate_path);
  const SpectralForm f = sym_eig(A);
  int r = rank_hint;
  if (r <= 0) {  // infer: eigenvalues above a relative floor
    const double top = std::max(1e-300, f.eigenvalues.cwiseAbs().maxCoeff());
    r = 0;
    for (int i = 0; i < f.eigenvalues.size(); ++i)
      if (f.eigenvalues(i) > 1e-10 * top) ++r;
    if (r == 0) r = 1;
  }
  std::vector<double> eigenvalues;
  for (int i = 0; i < r; ++i) eigenvalues.push_back(f.eigenvalues(i));
  const CostModel model = make_cost_matrix_with_basis(
      static_cast<int>(A.rows()), r, eigenvalues, f.basis);
  return format_spectral_diagnostics(spectral_diagnostics(model, est));
}

}  // namespace socolab
