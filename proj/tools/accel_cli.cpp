// Command-line front end: run one configured solve, compare several, or
// print the series-extrapolation demo table.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "accel/extrapolation.hpp"
#include "accel/harness.hpp"
#include "accel/problems.hpp"

namespace {

struct FlagSet {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_run_options(CLI::App* cmd, FlagSet& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");
  static const char* keys[] = {"problem", "method",  "window", "restart",
                               "beta",    "mode",    "backend", "tol",
                               "max-fevals", "seed", "out",    "nx",
                               "lambda",  "mu",      "n",      "kappa",
                               "kind",    "cells",   "perturbation"};
  for (const char* key : keys) {
    cmd->add_option_function<std::string>(
        std::string("--") + key,
        [&flags, key](const std::string& v) {
          flags.overrides.emplace_back(key, v);
        },
        "");
  }
}

accel::RunConfig resolve_config(const FlagSet& flags) {
  accel::RunConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw std::runtime_error("cannot open config file '" +
                                      flags.config_path + "'");
    cfg = accel::parse_config(in);
  }
  for (const auto& [key, value] : flags.overrides)
    accel::apply_config_key(cfg, key, value);
  return cfg;
}

int emit_outcome(const accel::RunConfig& cfg, const accel::RunOutcome& out) {
  if (out.exit_code == 1) {
    std::cerr << "error: " << out.error << "\n";
    return 1;
  }
  if (cfg.out.empty()) {
    accel::write_trace_csv(std::cout, out.trace);
  } else {
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open output file '" << cfg.out << "'\n";
      return 1;
    }
    accel::write_trace_csv(os, out.trace);
  }
  return out.exit_code;
}

int cmd_run(const FlagSet& flags) {
  accel::RunConfig cfg;
  try {
    cfg = resolve_config(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return emit_outcome(cfg, accel::run_config(cfg));
}

int cmd_compare(const std::vector<std::string>& config_files,
                const std::string& out_path) {
  std::map<std::string, int> label_uses;
  std::printf("%-24s %14s %8s %10s %s\n", "label", "resnorm", "fevals",
              "time_s", "status");
  std::ostringstream combined;
  combined << "label,iter,fevals,resnorm,time_s,event\n";
  int worst = 0;
  for (const auto& path : config_files) {
    std::string label = std::filesystem::path(path).stem().string();
    const int uses = label_uses[label]++;
    if (uses > 0) label += "-" + std::to_string(uses + 1);

    accel::RunOutcome out;
    std::ifstream in(path);
    if (!in) {
      out.exit_code = 1;
      out.error = "cannot open config file '" + path + "'";
    } else {
      try {
        out = accel::run_config(accel::parse_config(in));
      } catch (const std::exception& e) {
        out.exit_code = 1;
        out.error = e.what();
      }
    }
    worst = std::max(worst, out.exit_code);

    if (out.exit_code == 1) {
      std::printf("%-24s %14s %8s %10s error: %s\n", label.c_str(), "-", "-",
                  "-", out.error.c_str());
      continue;
    }
    const auto& t = out.trace;
    const double time_s =
        t.records.empty() ? 0.0 : t.records.back().time_s;
    std::printf("%-24s %14.6e %8ld %10.3f %s\n", label.c_str(),
                t.final_resnorm(), t.final_fevals(), time_s,
                out.exit_code == 0 ? "converged" : "budget");
    std::ostringstream rows;
    accel::write_trace_csv(rows, t);
    std::istringstream lines(rows.str());
    std::string line;
    std::getline(lines, line);  // skip the per-trace header
    while (std::getline(lines, line))
      combined << label << ',' << line << '\n';
  }
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open output file '" << out_path << "'\n";
      return 1;
    }
    os << combined.str();
  }
  return worst;
}

int cmd_pi_demo(int n, double z, int max_order) {
  const auto seq = accel::atan_partial_sums(n, z);
  const double limit = std::atan(z);

  // Aitken and its iterated form over the raw sequence.
  std::vector<double> aitken1, aitken2;
  for (size_t i = 0; i + 2 < seq.size(); ++i) {
    try {
      aitken1.push_back(accel::aitken_scalar(seq[i], seq[i + 1], seq[i + 2]));
    } catch (const accel::NumericalError&) {
      break;
    }
  }
  for (size_t i = 0; i + 2 < aitken1.size(); ++i) {
    try {
      aitken2.push_back(
          accel::aitken_scalar(aitken1[i], aitken1[i + 1], aitken1[i + 2]));
    } catch (const accel::NumericalError&) {
      break;
    }
  }

  accel::EpsilonTable<double> table(max_order);
  std::printf("%4s %12s %12s %12s", "step", "raw", "aitken", "aitken2");
  for (int k = 2; k <= max_order; k += 2) std::printf("     eps-ord%d", k);
  std::printf("\n");
  for (size_t j = 1; j < seq.size(); ++j) {
    table.push(seq[j]);
    std::printf("%4zu %12.4e", j, std::abs(seq[j] - limit));
    if (j >= 3 && j - 3 < aitken1.size())
      std::printf(" %12.4e", std::abs(aitken1[j - 3] - limit));
    else
      std::printf(" %12s", "-");
    if (j >= 5 && j - 5 < aitken2.size())
      std::printf(" %12.4e", std::abs(aitken2[j - 5] - limit));
    else
      std::printf(" %12s", "-");
    for (int k = 2; k <= max_order; k += 2) {
      if (table.columns() > k)
        std::printf(" %12.4e", std::abs(table.entry(k) - limit));
      else
        std::printf(" %12s", "-");
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iterative-solver benchmark harness"};
  app.require_subcommand(1);

  FlagSet run_flags;
  CLI::App* run = app.add_subcommand("run", "execute one configured solve");
  add_run_options(run, run_flags);

  std::vector<std::string> compare_files;
  std::string compare_out;
  CLI::App* compare =
      app.add_subcommand("compare", "run several configs, tabulate results");
  compare->add_option("configs", compare_files, "config files, one per row");
  compare->add_option("--out", compare_out, "combined CSV path");

  int demo_n = 30, demo_order = 8;
  double demo_z = 1.0;
  CLI::App* demo =
      app.add_subcommand("pi_demo", "series extrapolation error table");
  demo->add_option("--n", demo_n, "number of series terms");
  demo->add_option("--z", demo_z, "series argument");
  demo->add_option("--max-order", demo_order, "highest extrapolation order");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(run_flags);
  if (compare->parsed()) return cmd_compare(compare_files, compare_out);
  return cmd_pi_demo(demo_n, demo_z, demo_order);
}
