#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qchsh/channels.hpp"
#include "qchsh/chsh.hpp"
#include "qchsh/protocols.hpp"
#include "qchsh/run_record.hpp"
#include "qchsh/seesaw.hpp"
#include "qchsh/types.hpp"

namespace {

using namespace qchsh;

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::string config_path;
  std::string out_path;
  bool json = false;
  double step = 0.01;
  std::string p1_range = "0.48:0.5";
  std::string p2_range = "0.48:0.5";
};

// Seed precedence: --seed, then CHSH_SEED, then the config file, then the
// built-in default.
SeesawConfig resolve_config(const Options& opt) {
  SeesawConfig c;
  if (!opt.config_path.empty()) c = apply_config_file(opt.config_path, c);
  if (!opt.seed) {
    if (const char* env = std::getenv("CHSH_SEED")) {
      try {
        std::size_t used = 0;
        const std::string text(env);
        c.seed = std::stoull(text, &used);
        if (used != text.size()) throw parameter_error("");
      } catch (const std::exception&) {
        throw parameter_error("CHSH_SEED must be an unsigned integer");
      }
    }
  } else {
    c.seed = *opt.seed;
  }
  if (opt.restarts) c.restarts = *opt.restarts;
  return c;
}

void add_common(CLI::App* sub, Options& opt, bool with_out = true) {
  sub->add_option_function<std::uint64_t>(
      "--seed", [&opt](std::uint64_t v) { opt.seed = v; },
      "RNG seed (overrides CHSH_SEED and the config file; default 1)");
  sub->add_option_function<int>(
      "--restarts", [&opt](int v) { opt.restarts = v; },
      "see-saw restarts (overrides the config file; default 20)");
  sub->add_option("--config", opt.config_path, "key=value config file");
  if (with_out) sub->add_option("--out", opt.out_path, "also write the result to this file");
}

void write_out(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) return;
  std::ofstream f(opt.out_path);
  if (!f) throw parameter_error("cannot open output file '" + opt.out_path + "'");
  f << text;
}

std::pair<double, double> parse_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw parameter_error("range '" + text + "' is not of the form lo:hi");
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, colon);
    const std::string hi_text = text.substr(colon + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw parameter_error("");
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw parameter_error("");
    return {lo, hi};
  } catch (const std::exception&) {
    throw parameter_error("range '" + text + "' is not of the form lo:hi");
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void emit_record(const Options& opt, RunRecord record) {
  const std::string text = to_json(record) + "\n";
  std::cout << text;
  write_out(opt, text);
}

int run_check_breaking(const Options& opt, const std::string& spec) {
  const auto start = std::chrono::steady_clock::now();
  const ChannelParam param = parse_channel_spec(spec);
  const SeesawConfig config = resolve_config(opt);
  BreakingReport report;
  report.channel = param;
  report.breaking = verify_breaking(param);
  report.threshold = breaking_threshold(param.family);
  report.numeric_max = single_channel_max_value(param, config);

  if (opt.json) {
    RunRecord record;
    record.command = "check-breaking";
    record.config = config;
    record.descriptor = make_descriptor(ProtocolKind::SingleChannel, param);
    record.breaking = report;
    record.seed = config.seed;
    record.wall_time = seconds_since(start);
    emit_record(opt, std::move(record));
    return 0;
  }
  std::ostringstream out;
  out << std::setprecision(10);
  out << "channel:     " << spec_string(param) << "\n"
      << "breaking:    " << (report.breaking ? "true" : "false") << "\n"
      << "threshold:   " << report.threshold << "\n"
      << "numeric_max: " << report.numeric_max << "\n";
  std::cout << out.str();
  write_out(opt, out.str());
  return 0;
}

int run_activate(const Options& opt, const std::string& protocol, const std::string& spec1,
                 const std::string& spec2) {
  const auto start = std::chrono::steady_clock::now();
  const ProtocolKind kind = kind_from_code(protocol);
  const ChannelParam p1 = parse_channel_spec(spec1);
  std::optional<ChannelParam> p2;
  if (!spec2.empty()) p2 = parse_channel_spec(spec2);
  const ProtocolDescriptor descriptor = make_descriptor(kind, p1, p2);
  const SeesawConfig config = resolve_config(opt);

  const ActivationResult result = activation_search(descriptor, config);

  RunRecord record;
  record.command = "activate";
  record.config = config;
  record.descriptor = descriptor;
  record.activation = summarize(result);
  record.seed = config.seed;
  record.wall_time = seconds_since(start);
  emit_record(opt, std::move(record));
  return 0;
}

int run_sweep(const Options& opt, const std::string& protocol, const std::string& family1,
              const std::string& family2) {
  const auto start = std::chrono::steady_clock::now();
  const ProtocolKind kind = kind_from_code(protocol);
  const auto [p1_lo, p1_hi] = parse_range(opt.p1_range);
  const auto [p2_lo, p2_hi] = parse_range(opt.p2_range);
  const SeesawConfig config = resolve_config(opt);

  const SweepResult grid =
      robustness_sweep(kind, family_from_code(family1), family_from_code(family2), p1_lo, p1_hi,
                       p2_lo, p2_hi, opt.step, config);
  const std::string csv = sweep_csv(grid);

  if (opt.json) {
    RunRecord record;
    record.command = "sweep";
    record.config = config;
    record.sweep = grid;
    record.seed = config.seed;
    record.wall_time = seconds_since(start);
    std::cout << to_json(record) << "\n";
  } else if (opt.out_path.empty()) {
    std::cout << csv;
  }
  write_out(opt, csv);
  return 0;
}

int run_reproduce_table(const Options& opt) {
  const SeesawConfig config = resolve_config(opt);
  const std::vector<TableRowResult> rows = reproduce_table(config);
  std::ostringstream out;
  out << std::left << std::setw(16) << "protocol" << std::setw(16) << "channel1" << std::setw(24)
      << "channel2" << std::right << std::setw(11) << "published" << std::setw(11) << "achieved"
      << std::setw(11) << "margin" << "  status\n";
  int failed = 0;
  for (const TableRowResult& row : rows) {
    const double achieved = row.result.seesaw.best_value;
    const double margin = achieved - row.row.published;
    const bool pass = achieved >= row.row.published - 5e-3 && achieved > 2.0 + 1e-4;
    failed += pass ? 0 : 1;
    out << std::left << std::setw(16) << kind_code(row.row.kind) << std::setw(16)
        << spec_string(row.row.channel1) << std::setw(24) << spec_string(row.row.channel2)
        << std::right << std::fixed << std::setprecision(5) << std::setw(11) << row.row.published
        << std::setw(11) << achieved << std::showpos << std::setw(11) << margin << std::noshowpos
        << "  " << (pass ? "PASS" : "FAIL") << "\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  out << (failed == 0 ? "all rows within tolerance\n"
                      : std::to_string(failed) + " row(s) below tolerance\n");
  std::cout << out.str();
  write_out(opt, out.str());
  return 0;
}

int run_superactivate(const Options& opt, const std::string& spec1, const std::string& spec2) {
  const auto start = std::chrono::steady_clock::now();
  const ChannelParam p1 = parse_channel_spec(spec1);
  const ChannelParam p2 = parse_channel_spec(spec2);
  const SeesawConfig config = resolve_config(opt);

  const SuperactivationResult result = superactivate(p1, p2, config);

  RunRecord record;
  record.command = "superactivate";
  record.config = config;
  record.descriptor = make_descriptor(ProtocolKind::Bidirectional, p1, p2,
                                      p1.family == p2.family && p1.p == p2.p);
  record.superactivation = summarize(result);
  record.seed = config.seed;
  record.wall_time = seconds_since(start);
  emit_record(opt, std::move(record));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "CHSH nonlocality toolbox: channel breaking checks, activation searches,\n"
      "robustness sweeps, and two-copy super-activation."};
  app.require_subcommand(1);
  app.footer(
      "config file keys and defaults:\n"
      "  epsilon=0.1  perturb_probability=0.5  stall_threshold=10\n"
      "  value_equality_tol=1e-7  max_iterations=2000  restarts=20  seed=1\n"
      "precedence: defaults < config file < CHSH_SEED (seed only) < flags");

  Options opt;
  std::string spec1, spec2, protocol, family1, family2;

  CLI::App* check = app.add_subcommand("check-breaking", "analytic + numerical breaking verdict");
  check->add_option("channel", spec1, "channel spec, family:p (dep|ad|loss|er)")->required();
  check->add_flag("--json", opt.json, "emit a JSON run record instead of text");
  add_common(check, opt);

  CLI::App* act = app.add_subcommand("activate", "see-saw activation search");
  act->add_option("protocol", protocol, "single_channel | unidirectional | bidirectional")
      ->required();
  act->add_option("channel1", spec1, "first channel spec, family:p")->required();
  act->add_option("channel2", spec2, "second channel spec (two-channel protocols)");
  act->add_flag("--json", opt.json, "accepted for symmetry; output is always JSON");
  add_common(act, opt);

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over (p1, p2)");
  sweep->add_option("protocol", protocol, "unidirectional | bidirectional")->required();
  sweep->add_option("family1", family1, "first channel family (dep|ad|loss|er)")->required();
  sweep->add_option("family2", family2, "second channel family")->required();
  sweep->add_option("--p1-range", opt.p1_range, "first parameter range lo:hi")
      ->capture_default_str();
  sweep->add_option("--p2-range", opt.p2_range, "second parameter range lo:hi")
      ->capture_default_str();
  sweep->add_option("--step", opt.step, "grid step")->capture_default_str();
  sweep->add_flag("--json", opt.json, "emit a JSON run record on stdout instead of CSV");
  add_common(sweep, opt);

  CLI::App* table = app.add_subcommand("reproduce-table", "rerun the six published activations");
  add_common(table, opt);

  CLI::App* super = app.add_subcommand("superactivate", "two-copy super-activation scheme");
  super->add_option("channel1", spec1, "first channel spec, family:p")->required();
  super->add_option("channel2", spec2, "second channel spec")->required();
  super->add_flag("--json", opt.json, "accepted for symmetry; output is always JSON");
  add_common(super, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return run_check_breaking(opt, spec1);
    if (act->parsed()) return run_activate(opt, protocol, spec1, spec2);
    if (sweep->parsed()) return run_sweep(opt, protocol, family1, family2);
    if (table->parsed()) return run_reproduce_table(opt);
    if (super->parsed()) return run_superactivate(opt, spec1, spec2);
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
