// qkdguess: guessing-probability and key-rate analysis of qubit QKD
// protocols on Bell-diagonal states.
//
//   qkdguess rate     --protocol bb84 --eps 0.1
//   qkdguess pestar   --protocol sixstate --eps 0.1 --starts 32 --seed 7
//   qkdguess critical --protocol sixstate
//   qkdguess table1   --phi1 0,22.5,45 --deg --out table.csv
//   qkdguess scatter  --protocol bb84 --samples 3800 --seed 1 --out s.csv
//
// Exit codes: 0 success, 1 usage, 2 infeasible rates or no crossing,
// 3 optimizer restarts disagree (result still printed).

#include <cmath>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdguess/analysis.hpp"
#include "qkdguess/error.hpp"
#include "qkdguess/io.hpp"
#include "qkdguess/keyrate.hpp"

using namespace qkdguess;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInfeasible = 2, kNotConverged = 3 };

struct Common {
  std::string protocol = "bb84";
  std::vector<double> eps;
  std::uint64_t seed = 0;
  int starts = 32;
  std::size_t samples = 4000;
  std::string out = "-";
  std::string format;
  int threads = 0;
  bool deg = false;
  bool numeric = false;
  std::vector<double> phi1{0.0, std::numbers::pi / 8, std::numbers::pi / 4, 3 * std::numbers::pi / 8,
                           std::numbers::pi / 2};
};

double to_radians(double x, bool deg) { return deg ? x * std::numbers::pi / 180.0 : x; }

ProtocolConfig protocol_of(const Common& c) {
  ProtocolConfig config = load_protocol(c.protocol);
  if (c.deg && c.protocol != "bb84" && c.protocol != "sixstate") {
    for (auto& d : config.directions) d = {to_radians(d.theta, true), to_radians(d.phi, true)};
    config.validate();
  }
  return config;
}

OptimizerOptions optimizer_of(const Common& c) {
  OptimizerOptions o;
  o.starts = c.starts;
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

std::string render(const std::string& format, const json& j, const std::string& csv) {
  if (format == "json") return j.dump(2) + "\n";
  return csv;
}

int cmd_rate(const Common& c) {
  const auto config = protocol_of(c);
  const auto rep = secure_key_rate(config, c.eps);
  write_output(c.out, render(c.format, to_json(rep), to_csv(rep)));
  return kOk;
}

int cmd_pestar(const Common& c) {
  const auto config = protocol_of(c);
  const auto res = maximize_guessing(config, c.eps, optimizer_of(c));
  write_output(c.out, render(c.format, to_json(res), to_csv(res)));
  if (!res.converged) {
    std::cerr << "warning: best optimizer restarts disagree by more than 1e-4\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_critical(const Common& c) {
  const auto config = protocol_of(c);
  CriticalOptions opts;
  opts.optimizer = optimizer_of(c);
  opts.prefer_closed_form = !c.numeric;
  const auto rep = critical_report(config, opts);
  write_output(c.out, render(c.format, to_json(rep), to_csv(rep)));
  return kOk;
}

int cmd_table1(const Common& c) {
  std::vector<double> phi1;
  for (double p : c.phi1) phi1.push_back(to_radians(p, c.deg));
  CriticalOptions opts;
  opts.optimizer = optimizer_of(c);
  const auto rows = table1_scan(phi1, opts);
  const std::string csv = format_table1_csv(rows);
  write_output(c.out, render(c.format, csv_to_json(csv), csv));
  return kOk;
}

int cmd_scatter(const Common& c) {
  const auto config = protocol_of(c);
  const auto pts = scatter(config, c.samples, c.seed);
  const std::string csv = format_scatter_csv(pts);
  write_output(c.out, render(c.format, csv_to_json(csv), csv));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eavesdropper guessing probability and secure key rates for qubit QKD"};
  app.require_subcommand(1);
  Common c;

  auto add_protocol = [&](CLI::App* sub) {
    sub->add_option("--protocol", c.protocol, "bb84, sixstate, or a protocol JSON file")->capture_default_str();
  };
  auto add_output = [&](CLI::App* sub, const std::string& default_format) {
    sub->add_option("--out", c.out, "output path, '-' for stdout")->capture_default_str();
    sub->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_str(default_format);
    sub->add_flag("--deg", c.deg, "angles are given in degrees");
    sub->add_option("--threads", c.threads, "OpenMP threads, 0 = auto")->check(CLI::NonNegativeNumber);
  };
  auto add_optimizer = [&](CLI::App* sub) {
    sub->add_option("--starts", c.starts, "optimizer restarts")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  };

  auto* rate = app.add_subcommand("rate", "entropic secure key rate");
  add_protocol(rate);
  rate->add_option("--eps", c.eps, "one symmetric rate or one per basis")->delimiter(',')->required();
  add_output(rate, "json");

  auto* pestar = app.add_subcommand("pestar", "maximum guessing probability P_E*");
  add_protocol(pestar);
  pestar->add_option("--eps", c.eps, "one symmetric rate or one per basis")->delimiter(',')->required();
  add_optimizer(pestar);
  add_output(pestar, "json");

  auto* critical = app.add_subcommand("critical", "critical error rates for P_B = P_E* and R = 0");
  add_protocol(critical);
  add_optimizer(critical);
  critical->add_flag("--numeric", c.numeric, "use the optimizer even where a closed form exists");
  add_output(critical, "json");

  auto* table1 = app.add_subcommand("table1", "critical rates of the four-state protocol over phi1");
  table1->add_option("--phi1", c.phi1, "comma-separated phi1 values")->delimiter(',');
  add_optimizer(table1);
  add_output(table1, "csv");

  auto* scatter_cmd = app.add_subcommand("scatter", "random (P_B, P_E) samples");
  add_protocol(scatter_cmd);
  scatter_cmd->add_option("--samples", c.samples, "number of samples")->capture_default_str();
  scatter_cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
  add_output(scatter_cmd, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  if (c.format.empty()) c.format = (table1->parsed() || scatter_cmd->parsed()) ? "csv" : "json";
  set_default_threads(c.threads);

  try {
    if (rate->parsed()) return cmd_rate(c);
    if (pestar->parsed()) return cmd_pestar(c);
    if (critical->parsed()) return cmd_critical(c);
    if (table1->parsed()) return cmd_table1(c);
    if (scatter_cmd->parsed()) return cmd_scatter(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::InfeasibleRates:
      case ErrorKind::NoCrossing:
      case ErrorKind::SingularDirection:
        return kInfeasible;
      default:
        return kUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
