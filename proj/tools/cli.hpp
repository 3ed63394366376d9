// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sskernel/entropy.hpp"
#include "sskernel/grid.hpp"
#include "sskernel/io.hpp"
#include "sskernel/kernels.hpp"
#include "sskernel/processes.hpp"
#include "sskernel/svg.hpp"
#include "sskernel/sysid.hpp"
#include "sskernel/verify.hpp"

namespace sskernel::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kVerifyFailed = 2 };

struct RunConfig {
  std::string config_file;
  std::uint64_t seed = 0;
  long long paths = 1;
  unsigned threads = 1;
  std::string grid;
  std::string process;
  std::string kernel;
  double beta = 1.0;
  double lambda = 1.0;
  double sigma2 = 1.0;
  std::string out;
  std::string emit_gram;
  std::string svg;
  // verify
  std::string suite = "all";
  long long verify_paths = 200000;
  std::string curves = "entropy_rate_curves.csv";
  // entropy
  long long n_max = 0;
  // estimate
  std::string data;
  long long m = 0;
  std::string diagnostics;
  std::string beta_grid = "0.05,2,20";
  std::string lambda_grid = "1e-4,1e2,15";
  std::string sigma2_grid = "1e-4,1e2,15";
};

namespace detail {

inline std::vector<double> parse_axis(const std::string& text, const std::string& flag) {
  const auto parts = io::split(text);
  if (parts.size() != 3) throw std::runtime_error(flag + " expects 'lo,hi,count'");
  const double count = io::parse_number(parts[2], flag);
  if (count < 1 || count != std::floor(count)) throw std::runtime_error(flag + " count must be a positive integer");
  try {
    return log_space(io::parse_number(parts[0], flag), io::parse_number(parts[1], flag),
                     static_cast<std::size_t>(count));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(flag + ": " + e.what());
  }
}

inline void require_positive_flag(double v, const char* flag) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::runtime_error(std::string(flag) + " must be positive");
}

// Flags win over config-file values: only options absent from the command line are filled.
inline void apply_config_file(const std::string& path, CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error(path + ": config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw std::runtime_error(path + ": unknown key '" + key + "' for command '" + sub.get_name() + "'");
    }
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number() || value.is_boolean()) {
      text = value.dump();
    } else {
      throw std::runtime_error(path + ": key '" + key + "' must be a string, number or boolean");
    }
    opt->add_result(text);
    opt->run_callback();
  }
}

inline void write_svg(const std::string& path, const std::string& title, const std::vector<svg::Series>& series,
                      const std::vector<svg::Band>& bands = {}) {
  auto out = io::open_output(path);
  svg::write_plot(out, title, series, bands);
}

inline int run_simulate(const RunConfig& cfg, std::ostream& out) {
  const TimeGrid grid = io::parse_grid(cfg.grid);
  if (cfg.paths < 1) throw std::runtime_error("--paths must be at least 1");
  require_positive_flag(cfg.lambda, "--lambda");
  std::optional<ProcessPaths> paths;
  KernelSpec kernel = WienerKernel(cfg.lambda);
  if (cfg.process == "white") {
    paths = sample_white(grid, cfg.lambda, cfg.seed, cfg.paths, cfg.threads);
    kernel = WhiteNoiseKernel(cfg.lambda);
  } else if (cfg.process == "wiener") {
    paths = sample_wiener(grid, cfg.lambda, cfg.seed, cfg.paths, cfg.threads);
  } else {
    require_positive_flag(cfg.beta, "--beta");
    paths = sample_stable_spline(grid, cfg.beta, cfg.lambda, cfg.seed, cfg.paths, cfg.threads);
    kernel = TcKernel(cfg.beta, cfg.lambda);
  }
  {
    auto file = io::open_output(cfg.out);
    io::write_paths(file, *paths);
  }
  out << "wrote " << paths->n_paths() << " " << cfg.process << " paths on " << grid.size()
      << " grid points to " << cfg.out << '\n';
  if (!cfg.emit_gram.empty()) {
    auto file = io::open_output(cfg.emit_gram);
    io::write_matrix(file, gram(kernel, grid).entries());
    out << "wrote " << family_name(kernel) << " Gram matrix to " << cfg.emit_gram << '\n';
  }
  return kOk;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out) {
  if (cfg.verify_paths < 2) throw std::runtime_error("--paths must be at least 2 for verify");
  verify::SuiteOptions opt;
  opt.seed = cfg.seed;
  opt.paths = cfg.verify_paths;
  opt.threads = cfg.threads;
  const auto results = verify::run_suite(cfg.suite, opt);
  bool all_passed = true;
  for (const auto& r : results) {
    all_passed = all_passed && r.passed;
    char line[256];
    std::snprintf(line, sizeof line, "%-4s  %-14s %-72s", r.passed ? "PASS" : "FAIL", r.suite.c_str(),
                  r.name.c_str());
    out << line << r.detail << '\n';
  }
  out << (all_passed ? "all " : "some ") << "checks " << (all_passed ? "passed" : "FAILED") << " ("
      << results.size() << " total)\n";
  if (!cfg.curves.empty()) {
    const std::size_t n_max = cfg.n_max > 0 ? static_cast<std::size_t>(cfg.n_max) : 200;
    auto file = io::open_output(cfg.curves);
    verify::write_rate_curves(file, n_max);
    out << "wrote entropy-rate curves to " << cfg.curves << '\n';
  }
  return all_passed ? kOk : kVerifyFailed;
}

inline int run_entropy(const RunConfig& cfg, std::ostream& out) {
  const TimeGrid grid = io::parse_grid(cfg.grid);
  if (grid.size() < 2) throw std::runtime_error("entropy needs a grid with at least two points");
  KernelSpec spec = WienerKernel(1.0);
  if (cfg.kernel == "tc") {
    require_positive_flag(cfg.beta, "--beta");
    require_positive_flag(cfg.lambda, "--lambda");
    spec = TcKernel(cfg.beta, cfg.lambda);
  } else if (cfg.kernel == "wiener") {
    require_positive_flag(cfg.lambda, "--lambda");
    spec = WienerKernel(cfg.lambda);
  } else {
    require_positive_flag(cfg.sigma2, "--sigma2");
    spec = WhiteNoiseKernel(cfg.sigma2);
  }
  const std::size_t available = grid.size() - 1;
  const std::size_t n_max = cfg.n_max > 0 ? static_cast<std::size_t>(cfg.n_max) : available;
  if (n_max > available) {
    throw std::runtime_error("--n-max " + std::to_string(n_max) + " exceeds the " +
                             std::to_string(available) + " non-origin grid points");
  }
  const auto curve = entropy_rate_curve(spec, grid, n_max);
  const auto& last = curve.back();
  out << "kernel " << family_name(spec) << ", n = " << last.n << '\n'
      << "  joint entropy   " << io::format_number(last.joint_entropy) << " nats\n"
      << "  rate            " << io::format_number(last.rate) << " nats/sample\n"
      << "  reference rate  " << io::format_number(last.reference_rate) << " nats/sample\n";
  if (std::holds_alternative<WienerKernel>(spec)) {
    out << "  chain-rule residual " << io::format_number(chain_rule_residual(grid.prefix(n_max + 1), cfg.lambda))
        << '\n';
  }
  if (!cfg.out.empty()) {
    auto file = io::open_output(cfg.out);
    file << "n,joint_entropy,rate,reference_rate,log_spacing_sum\n";
    for (const auto& r : curve) {
      file << r.n << ',' << io::format_number(r.joint_entropy) << ',' << io::format_number(r.rate) << ','
           << io::format_number(r.reference_rate) << ',' << io::format_number(r.log_spacing_sum) << '\n';
    }
    out << "wrote entropy-rate curve to " << cfg.out << '\n';
  }
  if (!cfg.svg.empty()) {
    svg::Series rate{"rate", {}, {}, "#1f77b4"};
    svg::Series ref{"reference", {}, {}, "#d62728"};
    for (const auto& r : curve) {
      rate.x.push_back(static_cast<double>(r.n));
      rate.y.push_back(r.rate);
      ref.x.push_back(static_cast<double>(r.n));
      ref.y.push_back(r.reference_rate);
    }
    write_svg(cfg.svg, "Entropy rate (nats/sample)", {rate, ref});
  }
  return kOk;
}

inline int run_estimate(const RunConfig& cfg, std::ostream& out) {
  const IODataset data = io::read_io_dataset(cfg.data);
  EstimationConfig config;
  if (cfg.m < 0) throw std::runtime_error("--m must be positive");
  if (cfg.m > 0) config.m = static_cast<std::size_t>(cfg.m);
  config.search.beta = parse_axis(cfg.beta_grid, "--beta-grid");
  config.search.lambda = parse_axis(cfg.lambda_grid, "--lambda-grid");
  config.search.sigma2 = parse_axis(cfg.sigma2_grid, "--sigma2-grid");
  const EstimationResult result = estimate_impulse_response(data, config);
  {
    auto file = io::open_output(cfg.out);
    io::write_estimate(file, result, data.sample_period());
  }
  const std::string diag_path =
      cfg.diagnostics.empty() ? std::filesystem::path(cfg.out).replace_extension(".json").string()
                              : cfg.diagnostics;
  nlohmann::ordered_json diag;
  diag["beta"] = result.beta;
  diag["lambda"] = result.lambda;
  diag["sigma2"] = result.sigma2;
  diag["log_evidence"] = result.log_evidence;
  diag["log_evidence_dual"] = result.log_evidence_dual;
  diag["residual_norm"] = result.residual_norm;
  diag["degrees_of_freedom"] = result.degrees_of_freedom;
  diag["points_evaluated"] = result.points_evaluated;
  diag["points_finite"] = result.points_finite;
  diag["config"] = {{"data", cfg.data},
                    {"m", result.f_mean.size()},
                    {"samples", data.size()},
                    {"sample_period", data.sample_period()},
                    {"beta_grid", config.search.beta},
                    {"lambda_grid", config.search.lambda},
                    {"sigma2_grid", config.search.sigma2}};
  {
    auto file = io::open_output(diag_path);
    file << diag.dump(2) << '\n';
  }
  out << "selected beta = " << io::format_number(result.beta) << ", lambda = " << io::format_number(result.lambda)
      << ", sigma2 = " << io::format_number(result.sigma2) << '\n'
      << "log evidence = " << io::format_number(result.log_evidence) << '\n'
      << "wrote " << result.f_mean.size() << " coefficients to " << cfg.out << " and diagnostics to " << diag_path
      << '\n';
  if (!cfg.svg.empty()) {
    svg::Series mean{"posterior mean", {}, {}, "#1f77b4"};
    svg::Band band;
    for (Eigen::Index k = 0; k < result.f_mean.size(); ++k) {
      const double t = static_cast<double>(k) * data.sample_period();
      mean.x.push_back(t);
      mean.y.push_back(result.f_mean(k));
      band.x.push_back(t);
      band.lower.push_back(result.f_mean(k) - 2.0 * result.f_std(k));
      band.upper.push_back(result.f_mean(k) + 2.0 * result.f_std(k));
    }
    write_svg(cfg.svg, "Impulse response estimate (mean +/- 2 std)", {mean}, {band});
  }
  return kOk;
}

}  // namespace detail

/// Parses argv (including the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Stable spline kernel, discrete-time Wiener process and maximum-entropy toolkit", "sskernel"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", cfg.config_file, "JSON file with option values; flags override it")
      ->check(CLI::ExistingFile);

  // Required options are checked after the config file is merged in.
  std::vector<CLI::Option*> mandatory;
  auto need = [&mandatory](CLI::Option* opt) { mandatory.push_back(opt); };

  auto* simulate = app.add_subcommand("simulate", "Sample white-noise, Wiener or stable-spline paths");
  need(simulate->add_option("--process", cfg.process, "white | wiener | stable_spline")
      ->check(CLI::IsMember({"white", "wiener", "stable_spline"})));
  need(simulate->add_option("--grid", cfg.grid, "uniform:n,Ts | csv:file | t0,t1,..."));
  simulate->add_option("--lambda", cfg.lambda, "Process variance scale");
  simulate->add_option("--beta", cfg.beta, "Decay rate of the stable-spline transform");
  simulate->add_option("--paths", cfg.paths, "Number of paths");
  simulate->add_option("--seed", cfg.seed, "Random seed");
  simulate->add_option("--threads", cfg.threads, "Worker threads (output does not depend on it)");
  need(simulate->add_option("--out", cfg.out, "Output CSV of paths"));
  simulate->add_option("--emit-gram", cfg.emit_gram, "Also write the matching Gram matrix as CSV");

  auto* verify_cmd = app.add_subcommand("verify", "Run the numerical property suite");
  verify_cmd->add_option("--suite", cfg.suite, "all | white_bound | increments | wiener_cov | wiener_maxent | tc_equivalence | psd")
      ->check(CLI::IsMember({"all", "white_bound", "increments", "wiener_cov", "wiener_maxent", "tc_equivalence", "psd"}));
  verify_cmd->add_option("--seed", cfg.seed, "Random seed");
  verify_cmd->add_option("--paths", cfg.verify_paths, "Monte Carlo paths per check");
  verify_cmd->add_option("--threads", cfg.threads, "Worker threads");
  verify_cmd->add_option("--curves", cfg.curves, "Output CSV of entropy-rate curves (empty to skip)");
  verify_cmd->add_option("--n-max", cfg.n_max, "Length of the entropy-rate curves");

  auto* entropy_cmd = app.add_subcommand("entropy", "Entropy-rate report for a kernel on a grid");
  need(entropy_cmd->add_option("--kernel", cfg.kernel, "tc | wiener | white")
      ->check(CLI::IsMember({"tc", "wiener", "white"})));
  need(entropy_cmd->add_option("--grid", cfg.grid, "uniform:n,Ts | csv:file | t0,t1,..."));
  entropy_cmd->add_option("--beta", cfg.beta, "TC decay rate");
  entropy_cmd->add_option("--lambda", cfg.lambda, "TC / Wiener scale");
  entropy_cmd->add_option("--sigma2", cfg.sigma2, "White-noise variance");
  entropy_cmd->add_option("--n-max", cfg.n_max, "Largest n (default: all non-origin points)");
  entropy_cmd->add_option("--out", cfg.out, "Output CSV of the curve");
  entropy_cmd->add_option("--svg", cfg.svg, "Optional SVG plot of the rate curve");

  auto* estimate = app.add_subcommand("estimate", "Impulse-response estimation with a TC prior");
  need(estimate->add_option("--data", cfg.data, "Input CSV with columns t,u,y"));
  estimate->add_option("--m", cfg.m, "Number of impulse-response coefficients (default min(N, 100))");
  need(estimate->add_option("--out", cfg.out, "Output CSV k,t,f_mean,f_std"));
  estimate->add_option("--diagnostics", cfg.diagnostics, "Diagnostics JSON (default: <out>.json)");
  estimate->add_option("--beta-grid", cfg.beta_grid, "lo,hi,count (log-spaced)");
  estimate->add_option("--lambda-grid", cfg.lambda_grid, "lo,hi,count (log-spaced)");
  estimate->add_option("--sigma2-grid", cfg.sigma2_grid, "lo,hi,count (log-spaced)");
  estimate->add_option("--svg", cfg.svg, "Optional SVG plot of the estimate");

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "sskernel: error: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!cfg.config_file.empty()) detail::apply_config_file(cfg.config_file, *active);
    for (const CLI::Option* opt : mandatory) {
      if (active->get_option_no_throw(opt->get_name()) == opt && opt->count() == 0) {
        throw std::runtime_error(opt->get_name() + " is required");
      }
    }
    if (active == simulate) return detail::run_simulate(cfg, out);
    if (active == verify_cmd) return detail::run_verify(cfg, out);
    if (active == entropy_cmd) return detail::run_entropy(cfg, out);
    return detail::run_estimate(cfg, out);
  } catch (const CLI::ParseError& e) {
    err << "sskernel: error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "sskernel: error: " << e.what() << '\n';
  }
  return kInvalid;
}

}  // namespace sskernel::cli
