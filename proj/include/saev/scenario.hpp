// scenario.hpp - scenario files, trip ingestion, synthetic demand
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "saev/csv.hpp"
#include "saev/network.hpp"
#include "saev/queueing.hpp"
#include "saev/rng.hpp"
#include "saev/sim.hpp"

namespace saev {

inline constexpr int kScenarioSchemaVersion = 1;

/// Per-zone Poisson demand: arrival rate, destination weights, and the
/// distribution over required charge levels.
struct DemandGeneratorSpec {
  std::vector<std::pair<ZoneId, double>> rate_per_hour;  // omitted zones are silent
  std::vector<std::pair<ZoneId, double>> dest_weights;   // shared by all origins
  std::vector<double> level_weights;                     // index 0 = level 1
};

struct FleetSpec {
  int size = 1;
  double capacity_kwh = 40.0;
  double initial_soc_frac = 1.0;
  std::string placement = "station_zones";  // or "all_zones"
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::filesystem::path dir;  // resolves relative file references
  std::string graph_file;
  std::string zones_file;
  std::string stations_file;
  FleetSpec fleet;
  BatteryModel battery;
  std::optional<std::string> trips_file;          // exactly one of these two
  std::optional<DemandGeneratorSpec> generator;
  std::optional<double> max_wait_min;             // unset = customers never leave
  double cost_refresh_min = 5.0;
  double horizon_min = 60.0;
  std::uint64_t seed = 1;

  [[nodiscard]] std::filesystem::path resolve(const std::string& name) const {
    std::filesystem::path p{name};
    return p.is_absolute() ? p : dir / p;
  }
};

struct ScenarioError : std::runtime_error {
  std::vector<std::string> errors;
  explicit ScenarioError(std::vector<std::string> errs)
      : std::runtime_error(join(errs)), errors(std::move(errs)) {}

  static std::string join(const std::vector<std::string>& errs) {
    std::string out = "scenario validation failed:";
    for (const auto& e : errs) out += "\n  " + e;
    return out;
  }
};

namespace detail {

inline std::vector<std::pair<ZoneId, double>> parse_zone_rates(const std::string& value) {
  // "zone:rate,zone:rate"
  std::vector<std::pair<ZoneId, double>> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected zone:value pairs");
    out.emplace_back(std::stoll(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return out;
}

inline std::string format_zone_rates(const std::vector<std::pair<ZoneId, double>>& rates) {
  std::ostringstream os;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i) os << ",";
    os << rates[i].first << ":" << rates[i].second;
  }
  return os.str();
}

inline std::vector<double> parse_doubles(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace detail

/// Parses the key = value scenario format, then validates everything it can;
/// all problems are reported at once, and nothing loads partially.
inline Scenario load_scenario(const std::filesystem::path& path) {
  std::vector<std::string> errors;
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot open " + path.string()});

  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        errors.push_back(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  Scenario sc;
  sc.dir = path.parent_path();

  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto required = [&](const char* key) -> std::optional<std::string> {
    auto v = take(key);
    if (!v) errors.push_back(std::string("missing required key: ") + key);
    return v;
  };
  auto parse = [&](const char* key, auto&& fn) {
    if (auto v = take(key)) {
      try {
        fn(*v);
      } catch (const std::exception& e) {
        errors.push_back(std::string(key) + ": " + e.what());
      }
    }
  };

  if (auto v = required("schema_version")) {
    try {
      sc.schema_version = std::stoi(*v);
      if (sc.schema_version != kScenarioSchemaVersion)
        errors.push_back("unsupported schema_version " + *v);
    } catch (const std::exception&) {
      errors.push_back("schema_version: not an integer");
    }
  }
  if (auto v = required("graph")) sc.graph_file = *v;
  if (auto v = required("zones")) sc.zones_file = *v;
  if (auto v = required("stations")) sc.stations_file = *v;

  parse("fleet.size", [&](const std::string& v) { sc.fleet.size = std::stoi(v); });
  parse("fleet.capacity_kwh",
        [&](const std::string& v) { sc.fleet.capacity_kwh = std::stod(v); });
  parse("fleet.initial_soc_frac",
        [&](const std::string& v) { sc.fleet.initial_soc_frac = std::stod(v); });
  parse("fleet.placement", [&](const std::string& v) { sc.fleet.placement = v; });
  parse("battery.km_per_kwh", [&](const std::string& v) { sc.battery.km_per_kwh = std::stod(v); });
  parse("battery.levels", [&](const std::string& v) { sc.battery.level_count = std::stoi(v); });
  parse("demand.trips", [&](const std::string& v) { sc.trips_file = v; });
  parse("demand.rate_per_hour", [&](const std::string& v) {
    if (!sc.generator) sc.generator.emplace();
    sc.generator->rate_per_hour = detail::parse_zone_rates(v);
  });
  parse("demand.dest_weights", [&](const std::string& v) {
    if (!sc.generator) sc.generator.emplace();
    sc.generator->dest_weights = detail::parse_zone_rates(v);
  });
  parse("demand.level_weights", [&](const std::string& v) {
    if (!sc.generator) sc.generator.emplace();
    sc.generator->level_weights = detail::parse_doubles(v);
  });
  parse("max_wait_min", [&](const std::string& v) {
    if (v != "none") sc.max_wait_min = std::stod(v);
  });
  parse("cost_refresh_min", [&](const std::string& v) { sc.cost_refresh_min = std::stod(v); });
  parse("horizon_min", [&](const std::string& v) { sc.horizon_min = std::stod(v); });
  parse("seed", [&](const std::string& v) { sc.seed = std::stoull(v); });

  for (const auto& [k, v] : kv) errors.push_back("unknown key: " + k);

  // semantic validation
  if (sc.fleet.size < 1) errors.push_back("fleet.size must be >= 1");
  if (!(sc.fleet.capacity_kwh > 0.0)) errors.push_back("fleet.capacity_kwh must be positive");
  if (sc.fleet.initial_soc_frac < 0.0 || sc.fleet.initial_soc_frac > 1.0)
    errors.push_back("fleet.initial_soc_frac must lie in [0, 1]");
  if (sc.fleet.placement != "station_zones" && sc.fleet.placement != "all_zones")
    errors.push_back("fleet.placement must be station_zones or all_zones");
  if (!(sc.battery.km_per_kwh > 0.0)) errors.push_back("battery.km_per_kwh must be positive");
  if (sc.battery.level_count < 1) errors.push_back("battery.levels must be >= 1");
  if (sc.trips_file && sc.generator)
    errors.push_back("demand.trips and demand.rate_per_hour are mutually exclusive");
  if (!sc.trips_file && !sc.generator)
    errors.push_back("one of demand.trips or demand.rate_per_hour is required");
  if (sc.generator) {
    for (auto [z, r] : sc.generator->rate_per_hour)
      if (r < 0.0) errors.push_back("negative arrival rate for zone " + std::to_string(z));
    for (auto [z, w] : sc.generator->dest_weights)
      if (w < 0.0) errors.push_back("negative destination weight for zone " + std::to_string(z));
    double lw = 0.0;
    for (double w : sc.generator->level_weights) {
      if (w < 0.0) errors.push_back("negative level weight");
      lw += w;
    }
    if (!sc.generator->level_weights.empty() && std::abs(lw - 1.0) > 1e-9)
      errors.push_back("level weights must sum to 1");
  }
  if (!(sc.horizon_min > 0.0)) errors.push_back("horizon_min must be positive");
  if (sc.max_wait_min && !(*sc.max_wait_min > 0.0))
    errors.push_back("max_wait_min must be positive or none");

  for (const std::string* f : {&sc.graph_file, &sc.zones_file, &sc.stations_file}) {
    if (f->empty()) continue;
    if (!std::filesystem::exists(sc.resolve(*f)))
      errors.push_back("missing file: " + sc.resolve(*f).string());
  }
  if (sc.trips_file && !std::filesystem::exists(sc.resolve(*sc.trips_file)))
    errors.push_back("missing file: " + sc.resolve(*sc.trips_file).string());

  if (!errors.empty()) throw ScenarioError(std::move(errors));
  return sc;
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "schema_version = " << sc.schema_version << "\n";
  out << "graph = " << sc.graph_file << "\n";
  out << "zones = " << sc.zones_file << "\n";
  out << "stations = " << sc.stations_file << "\n";
  out << "fleet.size = " << sc.fleet.size << "\n";
  out << "fleet.capacity_kwh = " << sc.fleet.capacity_kwh << "\n";
  out << "fleet.initial_soc_frac = " << sc.fleet.initial_soc_frac << "\n";
  out << "fleet.placement = " << sc.fleet.placement << "\n";
  out << "battery.km_per_kwh = " << sc.battery.km_per_kwh << "\n";
  out << "battery.levels = " << sc.battery.level_count << "\n";
  if (sc.trips_file) out << "demand.trips = " << *sc.trips_file << "\n";
  if (sc.generator) {
    out << "demand.rate_per_hour = " << detail::format_zone_rates(sc.generator->rate_per_hour)
        << "\n";
    if (!sc.generator->dest_weights.empty())
      out << "demand.dest_weights = " << detail::format_zone_rates(sc.generator->dest_weights)
          << "\n";
    if (!sc.generator->level_weights.empty()) {
      out << "demand.level_weights = ";
      for (std::size_t i = 0; i < sc.generator->level_weights.size(); ++i)
        out << (i ? "," : "") << sc.generator->level_weights[i];
      out << "\n";
    }
  }
  out << "max_wait_min = ";
  if (sc.max_wait_min)
    out << *sc.max_wait_min << "\n";
  else
    out << "none\n";
  out << "cost_refresh_min = " << sc.cost_refresh_min << "\n";
  out << "horizon_min = " << sc.horizon_min << "\n";
  out << "seed = " << sc.seed << "\n";
}

/// Loads the network triple referenced by a scenario.
inline NetworkModel build_network(const Scenario& sc) {
  RoadGraph g = load_graph_csv(sc.resolve(sc.graph_file).string());
  auto zones = load_zones_csv(sc.resolve(sc.zones_file).string());
  auto stations = load_stations_csv(sc.resolve(sc.stations_file).string());
  return NetworkModel(std::move(g), std::move(zones), std::move(stations), sc.battery);
}

/// Initial fleet: vehicles cycle over the placement zones in id order, all at
/// the configured SOC fraction, all present from t = 0.
inline std::vector<VehicleInit> build_fleet(const Scenario& sc, const NetworkModel& net) {
  std::vector<ZoneId> spots;
  if (sc.fleet.placement == "station_zones")
    for (const Station& s : net.stations()) spots.push_back(s.zone_id);
  if (spots.empty())
    for (const Zone& z : net.zones()) spots.push_back(z.id);
  std::sort(spots.begin(), spots.end());

  std::vector<VehicleInit> fleet;
  for (int i = 0; i < sc.fleet.size; ++i) {
    VehicleInit vi;
    vi.id = i + 1;
    vi.vertex = net.zone(spots[static_cast<std::size_t>(i) % spots.size()]).representative_vertex;
    vi.capacity_kwh = sc.fleet.capacity_kwh;
    vi.soc_kwh = sc.fleet.initial_soc_frac * sc.fleet.capacity_kwh;
    fleet.push_back(vi);
  }
  return fleet;
}

/// Poisson arrivals per zone, merged and re-sorted; ids follow the merged
/// order. Per-zone substreams keep the draw independent of zone ordering.
inline std::vector<CustomerRequest> generate_demand(const DemandGeneratorSpec& spec,
                                                    const NetworkModel& net, double horizon_min,
                                                    std::uint64_t seed) {
  std::vector<ZoneId> dest_ids;
  std::vector<double> dest_w;
  if (spec.dest_weights.empty()) {
    for (const Zone& z : net.zones()) {
      dest_ids.push_back(z.id);
      dest_w.push_back(1.0);
    }
  } else {
    for (auto [z, w] : spec.dest_weights) {
      dest_ids.push_back(z);
      dest_w.push_back(w);
    }
  }
  std::vector<double> level_w = spec.level_weights;
  if (level_w.empty())
    level_w.assign(static_cast<std::size_t>(net.battery().level_count),
                   1.0 / net.battery().level_count);

  struct Draft {
    SimTime t;
    ZoneId origin;
    ZoneId dest;
    int level;
  };
  std::vector<Draft> drafts;
  for (std::size_t zi = 0; zi < spec.rate_per_hour.size(); ++zi) {
    auto [zone, per_hour] = spec.rate_per_hour[zi];
    if (per_hour <= 0.0) continue;
    double per_min = per_hour / 60.0;
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(zone) + 1);
    double t = 0.0;
    while (true) {
      t += rng.exponential(per_min);
      if (t >= horizon_min) break;
      Draft d;
      d.t = SimTime::from_minutes(t);
      d.origin = zone;
      d.dest = dest_ids[rng.weighted_index(dest_w)];
      d.level = static_cast<int>(rng.weighted_index(level_w)) + 1;
      drafts.push_back(d);
    }
  }
  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.origin < b.origin;
  });

  std::vector<CustomerRequest> trips;
  trips.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    CustomerRequest r;
    r.id = static_cast<CustomerId>(i + 1);
    r.origin_zone = drafts[i].origin;
    r.dest_zone = drafts[i].dest;
    r.required_level = drafts[i].level;
    r.arrival = drafts[i].t;
    trips.push_back(r);
  }
  return trips;
}

struct TripStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double mean_distance_km = 0.0;  // over accepted trips with a known path
  double mean_duration_min = 0.0;
  std::vector<std::string> row_errors;
};

/// Reads `arrival_time_min,origin_zone,dest_zone,required_level` rows. Bad
/// rows are reported and skipped; out-of-order times are an error because the
/// file claims to be a log.
inline std::vector<CustomerRequest> ingest_trips(const std::string& path, const NetworkModel& net,
                                                 TripStats* stats = nullptr) {
  std::vector<CustomerRequest> trips;
  TripStats local;
  TripStats& st = stats ? *stats : local;
  double dist_sum = 0.0, dur_sum = 0.0;
  std::size_t dist_n = 0;
  SimTime prev = SimTime::from_ticks(std::numeric_limits<std::int64_t>::min());

  for (const auto& row : csv::read_file(path)) {
    auto fail = [&](const std::string& what) {
      st.row_errors.push_back(path + ":" + std::to_string(row.line_no) + ": " + what);
      ++st.rejected;
    };
    if (row.fields.size() != 4) {
      fail("expected arrival_time_min,origin_zone,dest_zone,required_level");
      continue;
    }
    CustomerRequest r;
    try {
      r.arrival = SimTime::from_minutes(std::stod(row.fields[0]));
      r.origin_zone = std::stoll(row.fields[1]);
      r.dest_zone = std::stoll(row.fields[2]);
      r.required_level = std::stoi(row.fields[3]);
    } catch (const std::exception&) {
      fail("unparseable field");
      continue;
    }
    if (!net.has_zone(r.origin_zone)) {
      fail("unknown origin zone " + std::to_string(r.origin_zone));
      continue;
    }
    if (!net.has_zone(r.dest_zone)) {
      fail("unknown destination zone " + std::to_string(r.dest_zone));
      continue;
    }
    if (r.required_level < 1 || r.required_level > net.battery().level_count) {
      fail("required level " + std::to_string(r.required_level) + " outside 1.." +
           std::to_string(net.battery().level_count));
      continue;
    }
    if (r.arrival < prev) {
      fail("arrival time out of order");
      continue;
    }
    prev = r.arrival;
    r.id = static_cast<CustomerId>(trips.size() + 1);
    trips.push_back(r);
    ++st.accepted;
    if (auto km = net.zone_trip_km(r.origin_zone, r.dest_zone)) {
      dist_sum += *km;
      ++dist_n;
      if (auto tt = net.zone_travel_time(r.origin_zone, r.dest_zone)) dur_sum += tt->minutes();
    }
  }
  if (dist_n) {
    st.mean_distance_km = dist_sum / static_cast<double>(dist_n);
    st.mean_duration_min = dur_sum / static_cast<double>(dist_n);
  }
  return trips;
}

/// Trips for a scenario: either the referenced file or generated demand.
inline std::vector<CustomerRequest> scenario_trips(const Scenario& sc, const NetworkModel& net,
                                                   std::uint64_t seed, TripStats* stats = nullptr) {
  if (sc.trips_file) return ingest_trips(sc.resolve(*sc.trips_file).string(), net, stats);
  return generate_demand(*sc.generator, net, sc.horizon_min, seed);
}

}  // namespace saev
