// Command-line front end. Talks to the solver only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "ksrobin/ksrobin.h"

namespace {

using CommandFn = ksr_status (*)(const char*, const char*, ksr_manifest**);

int report_failure(ksr_status s) {
  std::cerr << "error: " << ksr_last_error() << '\n';
  return ksr_exit_code(s);
}

int run_batch(CommandFn fn, const std::string& config, const std::optional<std::string>& out,
              bool list_paths) {
  ksr_manifest* m = nullptr;
  const auto s = fn(config.c_str(), out ? out->c_str() : nullptr, &m);
  if (s != KSR_OK) return report_failure(s);
  std::cout << ksr_manifest_summary(m) << '\n';
  std::cout << "run_id=" << ksr_manifest_run_id(m) << " manifest=" << ksr_manifest_file(m) << '\n';
  if (list_paths) {
    for (size_t i = 0; i < ksr_manifest_path_count(m); ++i)
      std::cout << "  " << ksr_manifest_path(m, i) << '\n';
  }
  ksr_manifest_free(m);
  return 0;
}

struct ClassifyArgs {
  std::optional<double> chi, h, alpha, tau, a, b, c, trace_c;
  std::optional<double> n, radius, cells;
};

int run_classify(const ClassifyArgs& args) {
  ksr_classify_request* req = ksr_classify_request_new();
  if (!req) {
    std::cerr << "error: out of memory\n";
    return 2;
  }
  const std::pair<const char*, const std::optional<double>*> fields[] = {
      {"chi", &args.chi}, {"h", &args.h},           {"alpha", &args.alpha},
      {"tau", &args.tau}, {"a", &args.a},           {"b", &args.b},
      {"c", &args.c},     {"trace_c", &args.trace_c}, {"n", &args.n},
      {"radius", &args.radius}, {"cells", &args.cells}};
  for (const auto& [name, value] : fields) {
    if (!*value) continue;
    if (const auto s = ksr_classify_request_set(req, name, **value); s != KSR_OK) {
      ksr_classify_request_free(req);
      return report_failure(s);
    }
  }
  ksr_verdict* v = nullptr;
  const auto s = ksr_classify(req, &v);
  ksr_classify_request_free(req);
  if (s != KSR_OK) return report_failure(s);
  if (ksr_verdict_trace_estimated(v))
    std::cerr << "warning: trace constant not supplied; using a numerically estimated lower "
                 "bound, so a bounded verdict via Estimate_b is not certified\n";
  std::cout << ksr_verdict_text(v);
  ksr_verdict_free(v);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Keller-Segel solver with Robin boundary conditions and positive flux"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ksr_version()));

  std::string config;
  std::optional<std::string> out_dir;
  bool list_paths = false;

  auto add_batch = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "configuration file")->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--list", list_paths, "print every emitted file");
    return sub;
  };
  auto* run = add_batch("run", "advance one configuration and write its data files");
  auto* compare = add_batch("compare", "run the listed variants on shared grid and step settings");
  auto* sweep = add_batch("sweep", "classify and run every cell of a parameter grid");

  ClassifyArgs args;
  auto* classify = app.add_subcommand("classify", "evaluate the boundedness conditions");
  classify->set_help_flag("--help", "print this help message and exit"); // frees -h/--h
  classify->add_option("--tau", args.tau, "0 parabolic-elliptic, 1 fully parabolic");
  classify->add_option("--chi", args.chi, "chemosensitivity");
  classify->add_option("--h", args.h, "Robin coefficient");
  classify->add_option("--alpha", args.alpha, "boundary flux fraction in [0,1]");
  classify->add_option("--a", args.a, "linear growth rate (default 0; does not enter the conditions)");
  classify->add_option("--b", args.b, "quadratic damping");
  classify->add_option("--c", args.c, "gradient damping");
  classify->add_option("--trace-c", args.trace_c, "trace constant (estimated when omitted)");
  classify->add_option("--n", args.n, "dimension used to estimate the trace constant (default 2)");
  classify->add_option("--radius", args.radius, "ball radius used for the estimate (default 1)");
  classify->add_option("--cells", args.cells, "grid cells used for the estimate (default 1024)");

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
    return 1;
  }

  if (*run) return run_batch(&ksr_run, config, out_dir, list_paths);
  if (*compare) return run_batch(&ksr_compare, config, out_dir, list_paths);
  if (*sweep) return run_batch(&ksr_sweep, config, out_dir, list_paths);
  if (*classify) return run_classify(args);
  return 1;
}
