/*
 * Copyright 2026 The queueq Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "queueq/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "queueq/error.hpp"
#include "queueq/parallel.hpp"
#include "queueq/queue_sim.hpp"

namespace queueq {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::kIo, fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  }

  void write(const std::string& name, const std::string& contents, CommandReport& report) const {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, fmt::format("cannot open '{}' for writing", path.string()));
    out << contents;
    if (!out) fail(ErrorCode::kIo, fmt::format("write to '{}' failed", path.string()));
    report.files.push_back(path.string());
  }

 private:
  fs::path dir_;
};

json service_json(const ServiceSpec& spec, const ServiceDist& dist) {
  json j{{"family", spec.family}, {"beta", spec.beta}, {"cv", dist.cv()}};
  if (dist.mixture()) {
    j["p"] = dist.mixture()->p;
    j["beta1"] = dist.mixture()->beta1;
    j["beta2"] = dist.mixture()->beta2;
    j["xi"] = dist.mixture()->xi;
  }
  return j;
}

json equilibrium_json(const EquilibriumResult& r) {
  json intervals = json::array();
  for (const auto& [a, b] : r.root_intervals) intervals.push_back({a, b});
  return json{{"p_star", r.p_star.probs()},
              {"w_star", r.w_star},
              {"x0", r.x0},
              {"residual", r.residual},
              {"mode", std::string(mode_name(r.mode))},
              {"iterations", r.iterations},
              {"fell_back", r.fell_back},
              {"root_intervals", intervals},
              {"w", r.profile.w}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kInvalidInput, fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_p_csv(const std::string& text, const std::string& path) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::size_t column = std::string::npos;
  std::vector<double> values;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (column == std::string::npos) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "p_t" || cells[i] == "p" || cells[i] == "p_star") column = i;
      }
      if (column == std::string::npos) {
        fail(ErrorCode::kInvalidInput, fmt::format("'{}' has no p_t column", path));
      }
      continue;
    }
    if (column >= cells.size()) fail(ErrorCode::kInvalidInput, fmt::format("short row in '{}'", path));
    try {
      values.push_back(std::stod(cells[column]));
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidInput, fmt::format("bad number '{}' in '{}'", cells[column], path));
    }
  }
  return values;
}

std::vector<double> gscan_points(const GscanSection& g) {
  if (!g.points.empty()) return g.points;
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((g.stop - g.start) / g.step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double x = g.start + static_cast<double>(k) * g.step;
    out.push_back(std::round(x * 1e12) / 1e12);
  }
  return out;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

std::string csv_header(const RunConfig& cfg, std::uint64_t seed) {
  return fmt::format("# queueq {} config={:016x} seed={}\n", QUEUEQ_VERSION, cfg.hash(), seed);
}

std::optional<double> table1_reference(double beta, int service_case) {
  static constexpr double kTable[3][3] = {{2.2, 3.0, 4.3}, {4.6, 5.7, 7.5}, {7.8, 9.1, 11.2}};
  if (service_case < 1 || service_case > 3) return std::nullopt;
  for (int b = 3; b <= 5; ++b) {
    if (beta == b) return kTable[b - 3][service_case - 1];
  }
  return std::nullopt;
}

ServiceSpec table1_service(double beta, int service_case, double mixture_cv) {
  switch (service_case) {
    case 1: return ServiceSpec{"deterministic", beta, 0.0};
    case 2: return ServiceSpec{"geometric", beta, 0.0};
    case 3: return ServiceSpec{"geom_mixture", beta, mixture_cv};
  }
  fail(ErrorCode::kInvalidConfig, fmt::format("unknown service case {}", service_case));
}

std::vector<Table1Cell> compute_table1(const RunConfig& cfg) {
  struct Job {
    double beta;
    int service_case;
    double mixture_cv;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.table1.betas.size(); ++i) {
    const double beta = cfg.table1.betas[i];
    const double cv = cfg.table1.mixture_cv.empty() ? 1.3 + 0.1 * beta : cfg.table1.mixture_cv[i];
    for (int k : cfg.table1.cases) jobs.push_back(Job{beta, k, cv});
  }
  const bool standard_game = cfg.game.lambda == 5.0 && cfg.game.horizon == 20;
  std::vector<std::optional<Table1Cell>> cells(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    ServiceSpec spec = table1_service(job.beta, job.service_case, job.mixture_cv);
    ServiceDist dist = [&] {
      try {
        return spec.build();
      } catch (const Error& e) {
        fail(ErrorCode::kInvalidConfig, fmt::format("table1 beta={} case={}: {}", job.beta, job.service_case, e.what()));
      }
    }();
    auto result = solve(cfg.solver, cfg.game.lambda, dist, cfg.game.horizon);
    std::optional<double> reference;
    const bool standard_cv = job.service_case != 3 || std::fabs(job.mixture_cv - (1.3 + 0.1 * job.beta)) < 1e-12;
    if (standard_game && standard_cv) reference = table1_reference(job.beta, job.service_case);
    cells[i] = Table1Cell{job.beta, job.service_case, spec, dist.cv(), std::move(result), reference};
  });
  std::vector<Table1Cell> out;
  for (auto& c : cells) out.push_back(std::move(*c));
  return out;
}

CommandReport cmd_equilibrium(const RunConfig& cfg) {
  const ServiceDist dist = cfg.service.build();
  const EquilibriumResult r = solve(cfg.solver, cfg.game.lambda, dist, cfg.game.horizon);
  CommandReport report;
  OutputDir out(cfg.output.directory);
  if (cfg.output.json) {
    json j = equilibrium_json(r);
    j["lambda"] = cfg.game.lambda;
    j["T"] = cfg.game.horizon;
    j["service"] = service_json(cfg.service, dist);
    j["config_hash"] = fmt::format("{:016x}", cfg.hash());
    out.write("equilibrium.json", j.dump(2) + "\n", report);
  }
  if (cfg.output.csv) {
    std::string csv = csv_header(cfg, 0) + "t,p_t,ev_t,w_t\n";
    for (std::size_t t = 0; t < r.p_star.slots(); ++t) {
      csv += fmt::format("{},{},{},{}\n", t, format_double(r.p_star[t]), format_double(r.profile.ev[t]),
                         format_double(r.profile.w[t]));
    }
    out.write("profile.csv", csv, report);
  }
  report.text = fmt::format("equilibrium: {} beta={} cv={:.4f} lambda={} T={}\n  w* = {:.6f}  p0* = {:.6f}  x0 = {}  "
                            "residual = {:.3e}  mode = {}{}\n",
                            cfg.service.family, cfg.service.beta, dist.cv(), cfg.game.lambda, cfg.game.horizon,
                            r.w_star, r.p_star[0], r.x0, r.residual, mode_name(r.mode),
                            r.fell_back ? " (warning: G not monotone, fell back to grid scan)" : "");
  if (cfg.solver.report_all_roots) {
    for (const auto& [a, b] : r.root_intervals) report.text += fmt::format("  delta-root x0 in [{}, {}]\n", a, b);
  }
  return report;
}

CommandReport cmd_table1(const RunConfig& cfg) {
  const auto cells = compute_table1(cfg);
  CommandReport report;
  OutputDir out(cfg.output.directory);
  std::string csv = csv_header(cfg, 0) +
                    "beta,case,family,cv,w_star,p0,x0,residual,mode,reference_w_star,abs_error\n";
  json rows = json::array();
  report.text = "beta case family          cv      w*       reference\n";
  for (const auto& c : cells) {
    const std::string ref = c.reference ? format_double(*c.reference) : "";
    const std::string err = c.reference ? format_double(std::fabs(c.result.w_star - *c.reference)) : "";
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", format_double(c.beta), c.service_case, c.service.family,
                       format_double(c.cv), format_double(c.result.w_star), format_double(c.result.p_star[0]),
                       format_double(c.result.x0), format_double(c.result.residual), mode_name(c.result.mode), ref, err);
    json row{{"beta", c.beta},           {"case", c.service_case},         {"family", c.service.family},
             {"cv", c.cv},               {"w_star", c.result.w_star},      {"p_star", c.result.p_star.probs()},
             {"x0", c.result.x0},        {"residual", c.result.residual},  {"mode", std::string(mode_name(c.result.mode))}};
    if (c.reference) row["reference_w_star"] = *c.reference;
    rows.push_back(row);
    report.text += fmt::format("{:<4} {:<4} {:<15} {:<7.2f} {:<8.3f} {}\n", c.beta, c.service_case, c.service.family,
                               c.cv, c.result.w_star, c.reference ? fmt::format("{:.1f}", *c.reference) : "-");
  }
  if (cfg.output.csv) out.write("table1.csv", csv, report);
  if (cfg.output.json) {
    out.write("table1.json",
              json{{"lambda", cfg.game.lambda}, {"T", cfg.game.horizon}, {"cells", rows},
                   {"config_hash", fmt::format("{:016x}", cfg.hash())}}
                      .dump(2) + "\n",
              report);
  }
  return report;
}

CommandReport cmd_abm(const RunConfig& cfg) {
  const ServiceDist dist = cfg.service.build();
  const std::size_t reps = cfg.abm.replications;
  std::vector<std::optional<AbmTrace>> traces(reps);
  parallel_for(reps, [&](std::size_t r) { traces[r] = run_abm(cfg.abm_config(r), dist); });

  CommandReport report;
  OutputDir out(cfg.output.directory);
  const std::string header = csv_header(cfg, cfg.abm.seed);
  const auto& first = traces.front()->checkpoints;
  const std::size_t slots = cfg.game.horizon + 1;

  // Replication-averaged p_bar per checkpoint.
  std::vector<std::vector<double>> mean_p(first.size(), std::vector<double>(slots, 0.0));
  std::vector<double> mean_w(first.size(), 0.0);
  for (const auto& tr : traces) {
    for (std::size_t c = 0; c < first.size(); ++c) {
      for (std::size_t t = 0; t < slots; ++t) mean_p[c][t] += tr->checkpoints[c].p_bar[t] / static_cast<double>(reps);
      mean_w[c] += tr->checkpoints[c].w_bar / static_cast<double>(reps);
    }
  }

  if (cfg.output.csv) {
    std::string trace = header + "replication,day,slot,p_bar\n";
    std::string summary = header + "replication,day,w_bar\n";
    for (std::size_t r = 0; r < reps; ++r) {
      for (const auto& cp : traces[r]->checkpoints) {
        for (std::size_t t = 0; t < slots; ++t) {
          trace += fmt::format("{},{},{},{}\n", r, cp.day, t, format_double(cp.p_bar[t]));
        }
        summary += fmt::format("{},{},{}\n", r, cp.day, format_double(cp.w_bar));
      }
    }
    out.write("trace.csv", trace, report);
    out.write("summary.csv", summary, report);
    for (std::size_t c = 0; c < first.size(); ++c) {
      std::string cp = header + "slot,p_bar\n";
      for (std::size_t t = 0; t < slots; ++t) cp += fmt::format("{},{}\n", t, format_double(mean_p[c][t]));
      out.write(fmt::format("checkpoint_{}.csv", first[c].day), cp, report);
    }
  }
  if (cfg.output.json) {
    json reps_json = json::array();
    for (std::size_t r = 0; r < reps; ++r) {
      json cps = json::array();
      for (const auto& cp : traces[r]->checkpoints) {
        cps.push_back({{"day", cp.day}, {"p_bar", cp.p_bar.probs()}, {"w_bar", cp.w_bar}});
      }
      reps_json.push_back({{"seed", traces[r]->seed}, {"checkpoints", cps}});
    }
    json averaged = json::array();
    for (std::size_t c = 0; c < first.size(); ++c) {
      averaged.push_back({{"day", first[c].day}, {"p_bar", mean_p[c]}, {"w_bar", mean_w[c]}});
    }
    out.write("abm.json",
              json{{"seed", cfg.abm.seed},
                   {"config_hash", fmt::format("{:016x}", cfg.hash())},
                   {"replications", reps_json},
                   {"averaged", averaged}}
                      .dump(2) + "\n",
              report);
  }
  report.text = fmt::format("abm: N={} lambda={} T={} eta={} days={} seed={} replications={}\n", cfg.abm.customers,
                            cfg.game.lambda, cfg.game.horizon, cfg.abm.eta, cfg.abm.days, cfg.abm.seed, reps);
  for (std::size_t c = 0; c < first.size(); ++c) {
    report.text += fmt::format("  day {:>6}: p_bar[0] = {:.4f}  w_bar = {:.4f}\n", first[c].day, mean_p[c][0], mean_w[c]);
  }
  return report;
}

CommandReport cmd_gscan(const RunConfig& cfg) {
  const ServiceDist dist = cfg.service.build();
  const auto xs = gscan_points(cfg.gscan);
  std::vector<double> g(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { g[i] = mass_G(xs[i], cfg.game.lambda, dist, cfg.game.horizon); });

  CommandReport report;
  std::string csv = csv_header(cfg, 0) + "x0,G,beyond_unit,nonmonotone\n";
  std::size_t decreases = 0;
  std::optional<std::pair<double, double>> bracket;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool down = i > 0 && xs[i] > xs[i - 1] && g[i] < g[i - 1] - 1e-10;
    decreases += down;
    if (i > 0 && !bracket && g[i - 1] < 1.0 && g[i] >= 1.0) bracket = std::pair{xs[i - 1], xs[i]};
    csv += fmt::format("{},{},{},{}\n", format_double(xs[i]), format_double(g[i]), xs[i] > 1.0 ? 1 : 0, down ? 1 : 0);
  }
  OutputDir out(cfg.output.directory);
  out.write("gscan.csv", csv, report);
  report.text = fmt::format("gscan: {} points, {} non-monotone adjacent pair(s)\n", xs.size(), decreases);
  if (bracket) report.text += fmt::format("  G crosses 1 in [{}, {}]\n", bracket->first, bracket->second);
  return report;
}

ArrivalDist read_arrival_file(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<double> values;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kInvalidInput, fmt::format("'{}' is not valid JSON: {}", path, e.what()));
    }
    const json& arr = j.is_object() ? (j.contains("p_star") ? j.at("p_star") : json()) : j;
    if (!arr.is_array()) fail(ErrorCode::kInvalidInput, fmt::format("'{}' has no p_star array", path));
    for (const auto& e : arr) {
      if (!e.is_number()) fail(ErrorCode::kInvalidInput, fmt::format("'{}' has a non-numeric entry", path));
      values.push_back(e.get<double>());
    }
  } else {
    values = parse_p_csv(text, path);
  }
  try {
    return ArrivalDist(std::move(values));
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("'{}': {}", path, e.what()));
  }
}

CommandReport cmd_verify(const RunConfig& cfg, const std::string& p_file) {
  const ServiceDist dist = cfg.service.build();
  const ArrivalDist p = read_arrival_file(p_file);
  const double tol = cfg.verify.tol > 0.0 ? cfg.verify.tol
                                          : equilibrium_tolerance(cfg.solver.delta, cfg.game.lambda, dist);
  const VerifyReport v = verify_equilibrium(p, cfg.game.lambda, dist, tol, cfg.verify.mass_threshold);

  CommandReport report;
  bool passed = v.is_equilibrium;
  report.text = fmt::format("verify: {} slots, tol = {:.4g}\n  equilibrium condition: {} (w_min = {:.6f}, "
                            "max violation = {:.3e})\n",
                            p.slots(), tol, v.is_equilibrium ? "PASS" : "FAIL", v.w_min, v.max_violation);
  std::vector<std::size_t> violating;
  for (std::size_t t = 0; t < p.slots(); ++t) {
    if (v.violating[t]) violating.push_back(t);
  }
  if (!violating.empty()) {
    report.text += "  violating slots:";
    for (auto t : violating) report.text += fmt::format(" {}(w={:.4f})", t, v.profile.w[t]);
    report.text += "\n";
  }

  json j{{"is_equilibrium", v.is_equilibrium}, {"w_min", v.w_min},        {"w_min_supported", v.w_min_supported},
         {"max_violation", v.max_violation},  {"tol", tol},               {"w", v.profile.w},
         {"violating_slots", violating},      {"p", p.probs()}};

  if (cfg.verify.monte_carlo_days > 0) {
    const auto mc = monte_carlo_waits(p, cfg.game.lambda, dist, cfg.verify.monte_carlo_days, cfg.verify.seed);
    bool mc_ok = true;
    json slots = json::array();
    for (std::size_t t = 0; t < p.slots(); ++t) {
      const auto& e = mc.slots[t];
      const bool checked = e.arrivals >= 100;
      const double z = e.std_error > 0.0 ? (e.mean_wait - v.profile.w[t]) / e.std_error : 0.0;
      const bool ok = !checked || std::fabs(z) <= 3.0;
      mc_ok = mc_ok && ok;
      slots.push_back({{"slot", t}, {"mean_wait", e.mean_wait}, {"std_error", e.std_error},
                       {"arrivals", e.arrivals}, {"z", z}, {"checked", checked}, {"ok", ok}});
    }
    report.text += fmt::format("  monte carlo ({} days, seed {}): {} within 3 standard errors\n",
                               cfg.verify.monte_carlo_days, cfg.verify.seed, mc_ok ? "PASS" : "FAIL");
    j["monte_carlo"] = {{"days", mc.days}, {"seed", cfg.verify.seed}, {"passed", mc_ok}, {"slots", slots}};
    passed = passed && mc_ok;
  }
  j["passed"] = passed;
  OutputDir out(cfg.output.directory);
  out.write("verify.json", j.dump(2) + "\n", report);
  report.status = passed ? 0 : 4;
  return report;
}

}  // namespace queueq
