#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "fedmap/error.hpp"
#include "fedmap/harness.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

int cmd_run(const std::string& path, bool oracle, bool timings, bool no_dns, const std::string& report_path) {
  const fedmap::Scenario s = fedmap::load_scenario(path);
  fedmap::RunOptions opts;
  opts.oracle = oracle;
  opts.timings = timings;
  opts.dns_wire = !no_dns;
  const nlohmann::json report = fedmap::run_scenario(s, opts);
  for (const auto& q : report["queries"]) {
    std::cout << (q["ok"].get<bool>() ? "ok   " : "FAIL ") << q["id"].get<std::string>() << " ("
              << q["type"].get<std::string>() << ")";
    if (q.contains("error")) std::cout << " error=" << q["error"]["code"].get<std::string>();
    if (q.contains("oracle") && !q["oracle"]["match"].get<bool>()) std::cout << " oracle-diff";
    std::cout << '\n';
  }
  const auto& sum = report["summary"];
  std::cout << s.name << ": " << sum["queries"] << " queries, " << sum["failed_queries"] << " failed, "
            << sum["oracle_diffs"] << " oracle diffs\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw fedmap::ScenarioError("cannot write report '" + report_path + "'");
    out << report.dump(2) << '\n';
  }
  return report["ok"].get<bool>() ? 0 : 1;
}

int cmd_serve(const std::string& path) {
  const fedmap::Scenario s = fedmap::load_scenario(path);
  fedmap::Deployment d(s);
  nlohmann::json servers = nlohmann::json::array();
  for (const auto& r : d.records()) servers.push_back({{"server_id", r.server_id}, {"endpoint", r.endpoint}});
  nlohmann::json info{{"dns", "127.0.0.1:" + std::to_string(d.dns_port())},
                      {"suffix", s.suffix},
                      {"registration_level", s.registration_level},
                      {"servers", servers}};
  if (s.root) info["root"] = d.record(*s.root).endpoint;
  std::cout << info.dump(2) << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated map simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and report");
  std::string scenario_path, report_path;
  bool oracle = false, timings = false, no_dns = false;
  run->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_flag("--oracle", oracle, "Compare against the centralized oracle");
  run->add_option("--report", report_path, "Write the JSON report here");
  run->add_flag("--timings", timings, "Record per-query latencies");
  run->add_flag("--no-dns", no_dns, "Resolve through the in-process registry instead of UDP");

  auto* gen = app.add_subcommand("gen", "Generate a random partitioned world");
  fedmap::GenParams gp;
  std::string out_dir;
  gen->add_option("--seed", gp.seed, "RNG seed")->required();
  gen->add_option("--zones", gp.zones, "Number of zones")->required()->check(CLI::PositiveNumber);
  gen->add_option("--nodes", gp.nodes, "Number of nodes")->required()->check(CLI::PositiveNumber);
  gen->add_option("--portal-density", gp.portal_density, "Share of inter-zone edges kept")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--level", gp.registration_level, "Registration level")->check(CLI::Range(0, fedmap::kMaxCellLevel));
  gen->add_option("--routes", gp.route_queries, "Route queries to emit")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* serve = app.add_subcommand("serve", "Start a scenario's servers and DNS frontend until interrupted");
  std::string serve_path;
  serve->add_option("scenario", serve_path, "Scenario JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scenario_path, oracle, timings, no_dns, report_path);
    if (*gen) {
      if (gp.nodes < gp.zones) throw fedmap::ContractViolation("--nodes must be at least --zones");
      fedmap::write_world(fedmap::gen_random_world(gp), out_dir);
      std::cout << "wrote " << gp.zones << " zones to " << out_dir << '\n';
      return 0;
    }
    if (*serve) return cmd_serve(serve_path);
  } catch (const fedmap::Error& e) {
    std::cerr << "of-sim: " << fedmap::errc_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
