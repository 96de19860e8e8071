// saev_cli - run, sweep, compare, and validate fleet simulations
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saev/saev.hpp"

namespace fs = std::filesystem;
using namespace saev;

namespace {

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "mdpp") return PolicyKind::Mdpp;
  if (name == "nearest_fcfs") return PolicyKind::NearestFcfs;
  if (name == "charger_chasing") return PolicyKind::ChargerChasing;
  if (name == "nonev_noreb") return PolicyKind::NonEvNoReb;
  throw CLI::ValidationError("--policy", "unknown policy: " + name);
}

struct CommonArgs {
  std::string scenario_path;
  std::string policy = "mdpp";
  std::string v_list = "0.1";
  std::string seed_list;
  std::optional<std::int64_t> horizon_min;
  std::string max_wait = "";
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--scenario", a.scenario_path, "scenario file")->required();
  cmd->add_option("--policy", a.policy, "mdpp | nearest_fcfs | charger_chasing | nonev_noreb");
  cmd->add_option("--V", a.v_list, "penalty constant (comma list for sweep)");
  cmd->add_option("--seed", a.seed_list, "seed or comma list of seeds");
  cmd->add_option("--horizon-min", a.horizon_min, "override horizon in minutes");
  cmd->add_option("--max-wait-min", a.max_wait, "abandonment limit in minutes, or 'none'");
  cmd->add_option("--out", a.out_dir, "output directory");
}

std::vector<std::uint64_t> parse_seeds(const std::string& s, std::uint64_t fallback) {
  if (s.empty()) return {fallback};
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

std::vector<double> parse_v_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = std::stod(item);
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      std::cerr << "warning: duplicate V=" << item << " ignored\n";
      continue;
    }
    out.push_back(v);
  }
  return out;
}

struct EffectiveConfig {
  Scenario sc;
  PolicyConfig policy;
  std::vector<std::uint64_t> seeds;
};

EffectiveConfig effective_config(const CommonArgs& a, double V) {
  EffectiveConfig cfg{load_scenario(a.scenario_path), {parse_policy(a.policy), V}, {}};
  if (a.horizon_min) cfg.sc.horizon_min = static_cast<double>(*a.horizon_min);
  if (!a.max_wait.empty()) {
    if (a.max_wait == "none")
      cfg.sc.max_wait_min.reset();
    else
      cfg.sc.max_wait_min = std::stod(a.max_wait);
  }
  cfg.seeds = parse_seeds(a.seed_list, cfg.sc.seed);
  return cfg;
}

EngineOptions engine_options(const Scenario& sc, const PolicyConfig& policy) {
  EngineOptions opt;
  opt.policy = policy;
  opt.cost_refresh_period = SimDuration::from_minutes(sc.cost_refresh_min);
  if (sc.max_wait_min) opt.max_wait = SimDuration::from_minutes(*sc.max_wait_min);
  opt.horizon = SimTime::from_minutes(sc.horizon_min);
  opt.log_events = true;
  return opt;
}

void write_manifest(const fs::path& dir, const CommonArgs& a, const Scenario& sc,
                    const PolicyConfig& policy, std::uint64_t seed) {
  std::ofstream out(dir / "manifest.txt");
  out << "scenario = " << fs::absolute(a.scenario_path).string() << "\n";
  out << "policy = " << policy_name(policy.kind) << "\n";
  out << "V = " << fmt(policy.V) << "\n";
  out << "seed = " << seed << "\n";
  out << "horizon_min = " << fmt(sc.horizon_min) << "\n";
  out << "max_wait_min = " << (sc.max_wait_min ? fmt(*sc.max_wait_min) : "none") << "\n";
  out << "cost_refresh_min = " << fmt(sc.cost_refresh_min) << "\n";
  out << "fleet.size = " << sc.fleet.size << "\n";
  out << "fleet.capacity_kwh = " << fmt(sc.fleet.capacity_kwh) << "\n";
}

void write_outputs(const fs::path& dir, const RunResult& res, const AuditReport& audit) {
  fs::create_directories(dir);
  {
    // headline metrics; keys sorted for stable bytes
    std::ofstream out(dir / "metrics.json");
    out << "{\n";
    out << "  \"lost_customers\": " << res.lost << ",\n";
    out << "  \"mean_wait_to_assignment_min\": " << fmt(res.mean_wait_to_assignment_min) << ",\n";
    out << "  \"mean_wait_to_pickup_min\": " << fmt(res.mean_wait_to_pickup_min) << ",\n";
    out << "  \"mean_waiting_customers\": " << fmt(res.mean_waiting_customers) << ",\n";
    out << "  \"total_dispatch_km\": " << fmt(res.total_dispatch_km, 3) << ",\n";
    out << "  \"arrivals\": " << res.arrivals << ",\n";
    out << "  \"served\": " << res.served << ",\n";
    out << "  \"picked_up\": " << res.picked_up << ",\n";
    out << "  \"waiting_at_end\": " << res.waiting_at_end << ",\n";
    out << "  \"audit_violations\": " << audit.violations.size() << "\n";
    out << "}\n";
  }
  {
    std::ofstream out(dir / "assignments.csv");
    out << "time_min,vehicle_id,customer_id,node_id,cost_min,H_at_assign\n";
    for (const AssignmentRecord& a : res.assignments)
      out << format_minutes(a.time) << "," << a.vehicle << "," << a.customer << "," << a.node
          << "," << format_minutes(a.cost) << "," << format_minutes(a.hol_wait) << "\n";
  }
  {
    std::ofstream out(dir / "events.log");
    for (const std::string& line : res.event_log) out << line << "\n";
  }
  {
    std::ofstream out(dir / "waiting_series.csv");
    out << "time_min,waiting_count,sum_hol_wait_min\n";
    for (const SeriesPoint& p : res.waiting_series)
      out << format_minutes(p.time) << "," << p.waiting_count << "," << fmt(p.sum_hol_wait_min)
          << "\n";
  }
}

struct RunOutcome {
  RunResult res;
  AuditReport audit;
};

RunOutcome run_one(const Scenario& sc, const NetworkModel& net, const PolicyConfig& policy,
                   std::uint64_t seed) {
  auto fleet = build_fleet(sc, net);
  auto trips = scenario_trips(sc, net, seed);
  RunResult res = run_simulation(net, fleet, trips, engine_options(sc, policy));
  AuditReport audit = audit_run(res, fleet, net.battery(), policy);
  return {std::move(res), std::move(audit)};
}

int cmd_run(const CommonArgs& a) {
  auto vs = parse_v_list(a.v_list);
  EffectiveConfig cfg = effective_config(a, vs.front());
  NetworkModel net = build_network(cfg.sc);
  bool violated = false;
  for (std::uint64_t seed : cfg.seeds) {
    RunOutcome out = run_one(cfg.sc, net, cfg.policy, seed);
    fs::path dir = fs::path(a.out_dir) / ("seed_" + std::to_string(seed));
    write_outputs(dir, out.res, out.audit);
    write_manifest(dir, a, cfg.sc, cfg.policy, seed);
    for (const std::string& v : out.audit.violations)
      std::cerr << "audit violation (seed " << seed << "): " << v << "\n";
    violated = violated || !out.audit.clean();
    std::cout << "seed " << seed << ": served " << out.res.served << "/" << out.res.arrivals
              << ", mean wait " << fmt(out.res.mean_wait_to_assignment_min, 3)
              << " min, dispatch " << fmt(out.res.total_dispatch_km, 3) << " km -> "
              << dir.string() << "\n";
  }
  return violated ? 2 : 0;
}

int cmd_sweep(const CommonArgs& a) {
  auto vs = parse_v_list(a.v_list);
  if (vs.size() < 2) {
    std::cerr << "sweep needs at least two V values\n";
    return 1;
  }
  EffectiveConfig cfg = effective_config(a, vs.front());
  NetworkModel net = build_network(cfg.sc);
  fs::create_directories(a.out_dir);
  std::ofstream table(fs::path(a.out_dir) / "sweep.csv");
  table << "V,seed,mean_wait_min,mean_waiting_customers,lost,total_dispatch_km\n";
  bool violated = false;
  for (double V : vs) {
    double wait_sum = 0.0, km_sum = 0.0, waiting_sum = 0.0;
    std::int64_t lost_sum = 0;
    for (std::uint64_t seed : cfg.seeds) {
      RunOutcome out = run_one(cfg.sc, net, {cfg.policy.kind, V}, seed);
      violated = violated || !out.audit.clean();
      table << fmt(V) << "," << seed << "," << fmt(out.res.mean_wait_to_assignment_min) << ","
            << fmt(out.res.mean_waiting_customers) << "," << out.res.lost << ","
            << fmt(out.res.total_dispatch_km, 3) << "\n";
      wait_sum += out.res.mean_wait_to_assignment_min;
      km_sum += out.res.total_dispatch_km;
      waiting_sum += out.res.mean_waiting_customers;
      lost_sum += out.res.lost;
    }
    double n = static_cast<double>(cfg.seeds.size());
    table << fmt(V) << ",pooled," << fmt(wait_sum / n) << "," << fmt(waiting_sum / n) << ","
          << lost_sum << "," << fmt(km_sum / n, 3) << "\n";
    std::cout << "V=" << fmt(V) << ": pooled wait " << fmt(wait_sum / n, 3) << " min, dispatch "
              << fmt(km_sum / n, 3) << " km\n";
  }
  return violated ? 2 : 0;
}

int cmd_compare(const CommonArgs& a, const std::string& policies_arg) {
  std::vector<std::string> names;
  std::stringstream ss(policies_arg.empty() ? a.policy : policies_arg);
  std::string item;
  while (std::getline(ss, item, ',')) names.push_back(item);
  auto vs = parse_v_list(a.v_list);
  EffectiveConfig cfg = effective_config(a, vs.front());
  NetworkModel net = build_network(cfg.sc);
  fs::create_directories(a.out_dir);
  std::ofstream table(fs::path(a.out_dir) / "compare.csv");
  table << "policy,seed,mean_wait_min,mean_wait_pickup_min,lost,total_dispatch_km\n";
  bool violated = false;
  for (const std::string& name : names) {
    PolicyConfig pc{parse_policy(name), vs.front()};
    double wait_sum = 0.0, km_sum = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
      RunOutcome out = run_one(cfg.sc, net, pc, seed);
      violated = violated || !out.audit.clean();
      table << name << "," << seed << "," << fmt(out.res.mean_wait_to_assignment_min) << ","
            << fmt(out.res.mean_wait_to_pickup_min) << "," << out.res.lost << ","
            << fmt(out.res.total_dispatch_km, 3) << "\n";
      wait_sum += out.res.mean_wait_to_assignment_min;
      km_sum += out.res.total_dispatch_km;
    }
    double n = static_cast<double>(cfg.seeds.size());
    table << name << ",pooled," << fmt(wait_sum / n) << ",," << "," << fmt(km_sum / n, 3) << "\n";
    std::cout << name << ": pooled wait " << fmt(wait_sum / n, 3) << " min, dispatch "
              << fmt(km_sum / n, 3) << " km\n";
  }
  return violated ? 2 : 0;
}

int cmd_validate_example(double V) {
  if (V != 0.1 && V != 1.0) {
    std::cerr << "validate-example supports V = 0.1 or 1 only\n";
    return 1;
  }
  GoldenCheck check = validate_golden(V);
  if (check.pass) {
    std::cout << "validate-example V=" << fmt(V, 3) << ": pass\n";
    return 0;
  }
  std::cerr << "validate-example V=" << fmt(V, 3) << ": FAIL: " << check.detail << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAEV fleet dispatch simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, compare_args;
  std::string compare_policies;
  double validate_v = 0.1;

  CLI::App* run = app.add_subcommand("run", "simulate one policy across seeds");
  add_common(run, run_args);
  CLI::App* sweep = app.add_subcommand("sweep", "sweep the penalty constant V");
  add_common(sweep, sweep_args);
  CLI::App* compare = app.add_subcommand("compare", "compare policies on one scenario");
  add_common(compare, compare_args);
  compare->add_option("--policies", compare_policies, "comma list of policies");
  CLI::App* validate = app.add_subcommand("validate-example", "check the built-in example");
  validate->add_option("--V", validate_v, "0.1 or 1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (compare->parsed()) return cmd_compare(compare_args, compare_policies);
    if (validate->parsed()) return cmd_validate_example(validate_v);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
