#include "ksrobin/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace ksr {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::size_t worker_count() {
  if (const char* env = std::getenv(workers_env); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const long n = std::strtol(env, &end, 10);
    if (errno != 0 || *end != '\0' || n <= 0 || n > 4096)
      throw ValidationError(std::string(workers_env) + " must be a positive integer, got '" + env +
                            "'");
    return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ComputeError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw ComputeError("error writing '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ComputeError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : "nan"; }

/// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must not throw.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<std::pair<double, double>> series(const Trajectory& traj,
                                              double DiagnosticsRecord::*field) {
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.emplace_back(s.record.t, s.record.*field);
  return out;
}

ordered_json status_json(const TerminationStatus& st) {
  ordered_json j;
  j["kind"] = to_string(st.kind);
  j["t_final"] = st.t_final;
  j["reason"] = st.reason;
  j["estimated_blowup_time"] =
      st.estimated_blowup_time ? ordered_json(*st.estimated_blowup_time) : ordered_json(nullptr);
  return j;
}

ordered_json assessment_json(const BlowupAssessment& a) {
  ordered_json j;
  j["verdict"] = to_string(a.verdict);
  j["t_blowup"] = a.t_blowup ? ordered_json(*a.t_blowup) : ordered_json(nullptr);
  j["supercritical_mass_n2"] = a.criteria.supercritical_mass_n2;
  j["odi_respected"] = a.criteria.odi_respected ? ordered_json(*a.criteria.odi_respected)
                                                : ordered_json(nullptr);
  j["lyapunov_diverging"] = a.criteria.lyapunov_diverging;
  j["kappa"] = a.kappa;
  j["theta_exponent"] = a.theta_exponent;
  return j;
}

std::string summary_line(const std::string& label, const Trajectory& traj,
                         const BlowupAssessment& a) {
  const auto& r = traj.samples.back().record;
  std::string s = label.empty() ? "" : label + ": ";
  s += "status=" + std::string(to_string(traj.status.kind)) +
       " t_final=" + format_double(traj.status.t_final) + " steps=" + std::to_string(traj.steps) +
       " mass_u=" + format_double(r.mass_u) + " linf_u=" + format_double(r.linf_u) +
       " lyapunov=" + format_double(r.lyapunov) + " assessment=" + to_string(a.verdict);
  return s;
}

void write_manifest(OutputManifest& m, const std::string& dir, const std::string& command,
                    ordered_json extra) {
  ordered_json j;
  j["run_id"] = m.run_id;
  j["command"] = command;
  j["status"] = m.status;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  // relative to the manifest so that an output tree can be moved
  auto files = ordered_json::array();
  for (const auto& p : m.paths) files.push_back(fs::path(p).lexically_relative(dir).generic_string());
  j["files"] = std::move(files);
  j["summary"] = m.summary;
  j["config_echo"] = m.config_echo;
  m.manifest_path = join(dir, "manifest.json");
  write_text(m.manifest_path, j.dump(2) + "\n");
}

void require_snapshot_geometry(const RunConfig& cfg, const std::string& source) {
  if (!cfg.snapshot_times.empty() && cfg.domain.n != 2)
    throw ValidationError(source + ": output.snapshot_times requires domain.n = 2");
}

} // namespace

void write_timeseries_dat(const std::vector<std::pair<double, double>>& s,
                          const std::string& path) {
  if (s.empty()) throw ValidationError("refusing to write an empty series to '" + path + "'");
  auto out = open_out(path);
  out << "a b\n";
  for (const auto& [t, v] : s) out << format_double(t) << ' ' << format_double(v) << '\n';
  finish(out, path);
}

void write_snapshot_csv(const Image2D& img, const std::string& path) {
  if (img.resolution == 0 || img.values.size() != img.resolution * img.resolution)
    throw ValidationError("snapshot image is empty or inconsistent");
  auto out = open_out(path);
  out << "# x_min x_max y_min y_max resolution\n";
  out << "# " << format_double(img.x_min) << ' ' << format_double(img.x_max) << ' '
      << format_double(img.y_min) << ' ' << format_double(img.y_max) << ' ' << img.resolution
      << '\n';
  for (std::size_t j = 0; j < img.resolution; ++j) {
    for (std::size_t i = 0; i < img.resolution; ++i) {
      if (i) out << ',';
      const double x = img.values[j * img.resolution + i];
      out << (std::isnan(x) ? std::string("NaN") : format_double(x));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_diagnostics_tsv(const Trajectory& traj, const std::string& path) {
  auto out = open_out(path);
  out << "t\tmass_u\tmass_v\tlinf_u\tl2_u\tl4_u\tboundary_flux\tlyapunov\tdissipation\tmoment\t"
         "theta\tweighted_mass\tclipped_mass\n";
  for (const auto& s : traj.samples) {
    const auto& r = s.record;
    const auto lp = [&](int p) {
      auto it = r.lp_u.find(p);
      return it == r.lp_u.end() ? std::string("nan") : format_double(it->second);
    };
    out << format_double(r.t) << '\t' << format_double(r.mass_u) << '\t'
        << format_double(r.mass_v) << '\t' << format_double(r.linf_u) << '\t' << lp(2) << '\t'
        << lp(4) << '\t' << format_double(r.boundary_flux) << '\t' << format_double(r.lyapunov)
        << '\t' << opt(r.dissipation) << '\t' << format_double(r.moment) << '\t'
        << format_double(r.theta) << '\t' << opt(r.weighted_mass) << '\t'
        << format_double(r.clipped_mass) << '\n';
  }
  finish(out, path);
}

OutputManifest cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir) {
  const auto doc = load_config(config_path);
  const auto spec = to_run_spec(doc);
  require_snapshot_geometry(spec.config, doc.source());
  const auto dir = out_dir.value_or(spec.output.dir);

  const auto traj = advance(spec.config);
  const auto assessment = assess(traj);
  make_dir(dir);

  OutputManifest m;
  m.run_id = content_hash(spec.canonical);
  m.config_echo = spec.canonical;
  m.status = to_string(traj.status.kind);
  m.summary = summary_line("", traj, assessment);

  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = join(dir, name);
    writer(path);
    m.paths.push_back(path);
  };
  emit("plotMax.dat", [&](const std::string& p) {
    write_timeseries_dat(series(traj, &DiagnosticsRecord::linf_u), p);
  });
  emit("plotMass.dat", [&](const std::string& p) {
    write_timeseries_dat(series(traj, &DiagnosticsRecord::mass_u), p);
  });
  emit("diagnostics.tsv", [&](const std::string& p) { write_diagnostics_tsv(traj, p); });

  const auto grid = spec.config.make_grid();
  std::vector<double> missed;
  for (double ts : spec.config.snapshot_times) {
    auto it = std::find_if(traj.samples.begin(), traj.samples.end(),
                           [ts](const Sample& s) { return s.state.time == ts; });
    if (it == traj.samples.end()) {
      missed.push_back(ts);
      continue;
    }
    emit("snapshot_t" + format_double(ts) + ".csv", [&](const std::string& p) {
      write_snapshot_csv(reconstruct_2d(it->state, grid, spec.output.snapshot_resolution), p);
    });
  }
  emit("config.resolved", [&](const std::string& p) { write_text(p, spec.canonical); });

  ordered_json extra;
  extra["termination"] = status_json(traj.status);
  extra["assessment"] = assessment_json(assessment);
  extra["steps"] = traj.steps;
  extra["rejected_steps"] = traj.rejected_steps;
  extra["snapshots_not_reached"] = missed;
  write_manifest(m, dir, "run", std::move(extra));
  return m;
}

OutputManifest cmd_compare(const std::string& config_path,
                           const std::optional<std::string>& out_dir) {
  const auto doc = load_config(config_path);
  const auto spec = to_compare_spec(doc);
  const auto dir = out_dir.value_or(spec.output.dir);
  const auto workers = worker_count();

  const auto n = spec.variants.size();
  std::vector<std::optional<Trajectory>> trajs(n);
  std::vector<std::string> errors(n);
  std::vector<bool> validation(n, false);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      trajs[i] = advance(spec.variants[i].second);
    } catch (const ValidationError& e) {
      errors[i] = e.what();
      validation[i] = true;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    const auto msg = "variant " + spec.variants[i].first + ": " + errors[i];
    if (validation[i]) throw ValidationError(msg);
    throw ComputeError(msg);
  }

  make_dir(dir);
  OutputManifest m;
  m.run_id = content_hash(spec.canonical);
  m.config_echo = spec.canonical;

  ordered_json variants = ordered_json::object();
  std::set<double> times;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& name = spec.variants[i].first;
    const auto& traj = *trajs[i];
    const auto a = assess(traj);
    for (const auto& [file, field] :
         {std::pair{"plotMax" + name + ".dat", &DiagnosticsRecord::linf_u},
          std::pair{"plotMass" + name + ".dat", &DiagnosticsRecord::mass_u}}) {
      const auto path = join(dir, file);
      write_timeseries_dat(series(traj, field), path);
      m.paths.push_back(path);
    }
    const auto diag = join(dir, "diagnostics_" + name + ".tsv");
    write_diagnostics_tsv(traj, diag);
    m.paths.push_back(diag);

    for (const auto& s : traj.samples) times.insert(s.record.t);
    if (!m.summary.empty()) m.summary += "\n";
    m.summary += summary_line(name, traj, a);
    if (!m.status.empty()) m.status += ",";
    m.status += name + "=" + to_string(traj.status.kind);

    ordered_json v;
    v["termination"] = status_json(traj.status);
    v["assessment"] = assessment_json(a);
    v["config_echo"] = echo_run_config(spec.variants[i].second);
    variants[name] = std::move(v);
  }

  // joined table at the union of sample times; "nan" where a variant has no sample
  const auto table = join(dir, "comparison.tsv");
  {
    auto out = open_out(table);
    out << "t";
    for (const auto& [name, cfg] : spec.variants) out << "\tmass_" << name;
    for (const auto& [name, cfg] : spec.variants) out << "\tlinf_" << name;
    out << '\n';
    std::vector<std::map<double, const DiagnosticsRecord*>> index(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& s : trajs[i]->samples) index[i][s.record.t] = &s.record;
    for (double t : times) {
      out << format_double(t);
      for (std::size_t i = 0; i < n; ++i) {
        auto it = index[i].find(t);
        out << '\t' << (it == index[i].end() ? "nan" : format_double(it->second->mass_u));
      }
      for (std::size_t i = 0; i < n; ++i) {
        auto it = index[i].find(t);
        out << '\t' << (it == index[i].end() ? "nan" : format_double(it->second->linf_u));
      }
      out << '\n';
    }
    finish(out, table);
  }
  m.paths.push_back(table);

  const auto resolved = join(dir, "config.resolved");
  write_text(resolved, spec.canonical);
  m.paths.push_back(resolved);

  ordered_json extra;
  extra["variants"] = std::move(variants);
  write_manifest(m, dir, "compare", std::move(extra));
  return m;
}

namespace {

struct SweepCell {
  std::vector<std::string> values;
  RunConfig config;
  std::string verdict{"-"};
  std::string conditions{"-"};
  std::string trace{"-"};
  std::string status{"not_run"};
  std::string t_final{"nan"};
  std::string mass_final{"nan"};
  std::string linf_final{"nan"};
  std::string run_id{"-"};
  std::string note;
};

std::string conditions_text(const RegimeVerdict& v) {
  if (v.satisfied_conditions.empty()) return "none";
  std::string s;
  for (auto c : v.satisfied_conditions) {
    if (!s.empty()) s += ",";
    s += to_string(c);
  }
  return s;
}

void sanitize(std::string& s) {
  for (auto& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
}

} // namespace

OutputManifest cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_dir) {
  const auto doc = load_config(config_path);
  const auto spec = to_sweep_spec(doc);
  const auto dir = out_dir.value_or(spec.output.dir);
  const auto workers = worker_count();

  // Cartesian product in axis-key order, last axis fastest.
  std::vector<SweepCell> cells(1);
  for (const auto& axis : spec.axes) {
    std::vector<SweepCell> next;
    for (const auto& cell : cells) {
      for (const auto& value : axis.values) {
        auto c = cell;
        c.values.push_back(value);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }

  parallel_for(cells.size(), workers, [&](std::size_t i) {
    auto& cell = cells[i];
    try {
      cell.config = spec.base;
      for (std::size_t k = 0; k < spec.axes.size(); ++k)
        apply_run_key(cell.config, spec.axes[k].key, cell.values[k]);
      cell.config.validate();
      cell.run_id = content_hash(echo_run_config(cell.config));

      const auto trace =
          spec.trace_c ? TraceConstantEstimate::user(*spec.trace_c)
                       : estimate_trace_constant(build_grid(cell.config.domain, cell.config.cells), 2);
      const auto verdict = classify(cell.config.params, cell.config.source, trace);
      cell.verdict = verdict.bounded ? "bounded" : "unclassified";
      cell.conditions = conditions_text(verdict);
      cell.trace = format_double(trace.value);

      if (!spec.classify_only) {
        const auto traj = advance(cell.config);
        const auto& r = traj.samples.back().record;
        cell.status = to_string(traj.status.kind);
        cell.t_final = format_double(traj.status.t_final);
        cell.mass_final = format_double(r.mass_u);
        cell.linf_final = format_double(r.linf_u);
      }
    } catch (const std::exception& e) {
      cell.status = "error";
      cell.note = e.what();
      sanitize(cell.note);
    }
  });

  make_dir(dir);
  OutputManifest m;
  m.run_id = content_hash(spec.canonical);
  m.config_echo = spec.canonical;

  const auto table = join(dir, "sweep.tsv");
  {
    auto out = open_out(table);
    for (const auto& axis : spec.axes) out << axis.key << '\t';
    out << "verdict\tconditions\ttrace_c\tstatus\tt_final\tmass_final\tlinf_final\trun_id\tnote\n";
    for (const auto& c : cells) {
      for (const auto& v : c.values) out << v << '\t';
      out << c.verdict << '\t' << c.conditions << '\t' << c.trace << '\t' << c.status << '\t'
          << c.t_final << '\t' << c.mass_final << '\t' << c.linf_final << '\t' << c.run_id << '\t'
          << (c.note.empty() ? "-" : c.note) << '\n';
    }
    finish(out, table);
  }
  m.paths.push_back(table);
  const auto resolved = join(dir, "config.resolved");
  write_text(resolved, spec.canonical);
  m.paths.push_back(resolved);

  std::map<std::string, int> counts;
  for (const auto& c : cells) ++counts[c.status];
  for (const auto& [k, v] : counts) {
    if (!m.status.empty()) m.status += ",";
    m.status += k + "=" + std::to_string(v);
  }
  m.summary = "sweep: " + std::to_string(cells.size()) + " cells, " + m.status;

  ordered_json extra;
  extra["cells"] = cells.size();
  extra["classify_only"] = spec.classify_only;
  extra["workers"] = std::min(workers, cells.size());
  write_manifest(m, dir, "sweep", std::move(extra));
  return m;
}

ClassifyResult cmd_classify(const ClassifyRequest& req) {
  std::vector<std::string> missing;
  auto need = [&](const std::optional<double>& x, const char* name) {
    if (!x) missing.emplace_back(name);
  };
  need(req.tau, "--tau");
  need(req.chi, "--chi");
  need(req.h, "--h");
  need(req.alpha, "--alpha");
  need(req.b, "--b");
  need(req.c, "--c");
  if (!missing.empty()) {
    std::string msg = "missing required parameters:";
    for (const auto& s : missing) msg += " " + s;
    throw ValidationError(msg);
  }
  if (*req.tau != 0.0 && *req.tau != 1.0) throw ValidationError("--tau must be 0 or 1");

  ModelParams p{*req.chi, *req.h, *req.alpha, static_cast<int>(*req.tau)};
  SourceSpec s{req.a.value_or(0.0), *req.b, *req.c};
  p.validate();
  s.validate();

  ClassifyResult out;
  if (req.trace_c) {
    out.trace = TraceConstantEstimate::user(*req.trace_c);
  } else {
    const DomainSpec d{req.n, req.radius};
    d.validate();
    out.trace = estimate_trace_constant(build_grid(d, req.cells), 2);
  }
  out.verdict = classify(p, s, out.trace);

  std::ostringstream t;
  t << "verdict: " << (out.verdict.bounded ? "bounded" : "no listed condition satisfied") << '\n';
  t << "conditions: " << conditions_text(out.verdict) << '\n';
  if (out.verdict.witness)
    t << "witness: eps1 = " << format_double(out.verdict.witness->eps1)
      << ", eps2 = " << format_double(out.verdict.witness->eps2) << '\n';
  else
    t << "witness: none\n";
  t << "trace_constant: " << format_double(out.trace.value) << " (" << to_string(out.trace.kind)
    << ", p = " << out.trace.p << ")\n";
  if (!out.verdict.notes.empty()) {
    auto notes = out.verdict.notes;
    while (!notes.empty() && notes.back() == ' ') notes.pop_back();
    t << "notes: " << notes << '\n';
  }
  out.text = t.str();
  return out;
}

} // namespace ksr
