// regenbound: batch front end for splitting, bounds, coupling simulation and
// TV verification.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regenbound/alternating.hpp"
#include "regenbound/bounds.hpp"
#include "regenbound/coupling.hpp"
#include "regenbound/distribution.hpp"
#include "regenbound/empirics.hpp"
#include "regenbound/error.hpp"
#include "regenbound/parallel.hpp"
#include "regenbound/splitting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace regenbound;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

// Input problems that should exit with status 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(field + ": bad number '" + item + "'");
    }
  }
  return out;
}

json read_json_file(const std::string& field, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(field + ": cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(field + ": " + path + ": " + e.what());
  }
}

// family:params mini-syntax to the JSON form.
json dist_json(const std::string& field, const std::string& text) {
  if (!text.empty() && text[0] == '@') return read_json_file(field, text.substr(1));
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError(field + ": expected family:params, got '" + text + "'");
  const std::string family = text.substr(0, colon);
  const std::vector<double> v = parse_numbers(field, text.substr(colon + 1));
  auto need = [&](std::size_t n) {
    if (v.size() != n)
      throw InputError(field + ": " + family + " takes " + std::to_string(n) + " parameter(s)");
  };
  if (family == "exp") {
    need(1);
    return {{"kind", "exponential"}, {"rate", v[0]}};
  }
  if (family == "gamma") {
    need(2);
    return {{"kind", "gamma"}, {"shape", v[0]}, {"rate", v[1]}};
  }
  if (family == "weibull") {
    need(2);
    return {{"kind", "weibull"}, {"shape", v[0]}, {"scale", v[1]}};
  }
  if (family == "uniform") {
    need(2);
    return {{"kind", "uniform"}, {"lo", v[0]}, {"hi", v[1]}};
  }
  if (family == "det") {
    need(1);
    return {{"kind", "tabulated"}, {"points", json::array({json::array({v[0], 0.0, 1.0})})}};
  }
  if (family == "hyperexp") {
    if (v.empty() || v.size() % 2 != 0) throw InputError(field + ": hyperexp takes weight,rate pairs");
    json w = json::array();
    json r = json::array();
    for (std::size_t i = 0; i < v.size(); i += 2) {
      w.push_back(v[i]);
      r.push_back(v[i + 1]);
    }
    return {{"kind", "hyperexponential"}, {"weights", w}, {"rates", r}};
  }
  throw InputError(field + ": unknown family '" + family + "'");
}

json delay_json(const std::string& field, const std::string& text) {
  if (text == "stationary") return {{"kind", "stationary"}};
  if (text.rfind("age:", 0) == 0) {
    const auto v = parse_numbers(field, text.substr(4));
    if (v.size() != 1) throw InputError(field + ": age takes one value");
    return {{"kind", "fixed_age"}, {"age", v[0]}};
  }
  if (text.rfind("law:", 0) == 0) return {{"kind", "law"}, {"law", dist_json(field, text.substr(4))}};
  if (!text.empty() && text[0] == '@') return read_json_file(field, text.substr(1));
  throw InputError(field + ": expected age:<a>, stationary or law:<dist>");
}

// --f2 accepts a distribution or m2=VALUE for the bounds-only mode.
json idle_json(const std::string& field, const std::string& text) {
  if (text.rfind("m2=", 0) == 0) {
    const auto v = parse_numbers(field, text.substr(3));
    if (v.size() != 1) throw InputError(field + ": m2 takes one value");
    return {{"mean_bound", v[0]}};
  }
  return dist_json(field, text);
}

struct RawFlags {
  std::string config;
  std::string dist;
  std::string delay;
  std::string k;
  std::string exp_rate;
  std::optional<double> split_tol;
  std::optional<std::int64_t> replicas;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::string t_grid;
  std::optional<int> bins;
  std::string out_dir;
  std::string f1;
  std::string f2;
  std::string initial;
};

// The fully resolved configuration; echoed into every report.
struct RunConfig {
  std::string command;
  json dist;
  json delay = {{"kind", "fixed_age"}, {"age", 0.0}};
  std::vector<double> k;
  std::optional<std::string> exp_rate;  // "auto" or a number as text
  double split_tol = SplitDecomposition::kDefaultTol;
  std::int64_t replicas = 10000;
  std::optional<std::uint64_t> seed;
  double horizon = 0.0;
  std::vector<double> t_grid;
  int bins = 50;
  std::string out_dir = ".";
  json f1;
  json f2;
  int initial_state = 1;
  double initial_age = 0.0;

  json to_json() const {
    json j = {{"command", command},
              {"split_tol", split_tol},
              {"replicas", replicas},
              {"horizon", horizon},
              {"t_grid", t_grid},
              {"bins", bins},
              {"k", k},
              {"out_dir", out_dir}};
    j["exp_rate"] = exp_rate ? json(*exp_rate) : json(nullptr);
    j["seed"] = seed ? json(*seed) : json(nullptr);
    if (command == "alternating") {
      j["f1"] = f1;
      j["f2"] = f2;
      j["initial"] = {{"state", initial_state}, {"age", initial_age}};
    } else {
      j["dist"] = dist;
      j["delay"] = delay;
    }
    return j;
  }
};

template <class T>
T config_value(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config.") + key + ": wrong type");
  }
}

std::vector<double> config_numbers(const json& cfg, const char* key) {
  const json& v = cfg.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) return parse_numbers(std::string("config.") + key, v.get<std::string>());
  return config_value<std::vector<double>>(cfg, key);
}

RunConfig resolve(const std::string& command, const RawFlags& f) {
  RunConfig c;
  c.command = command;
  if (const char* env = std::getenv("REGENBOUND_OUTPUT_DIR"); env && *env) c.out_dir = env;

  if (!f.dist.empty()) c.dist = dist_json("--dist", f.dist);
  if (!f.delay.empty()) c.delay = delay_json("--delay", f.delay);
  if (!f.k.empty()) c.k = parse_numbers("--k", f.k);
  if (!f.exp_rate.empty()) c.exp_rate = f.exp_rate;
  if (f.split_tol) c.split_tol = *f.split_tol;
  if (f.replicas) c.replicas = *f.replicas;
  if (f.seed) c.seed = f.seed;
  if (f.horizon) c.horizon = *f.horizon;
  if (!f.t_grid.empty()) c.t_grid = parse_numbers("--t-grid", f.t_grid);
  if (f.bins) c.bins = *f.bins;
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  if (!f.f1.empty()) c.f1 = dist_json("--f1", f.f1);
  if (!f.f2.empty()) c.f2 = idle_json("--f2", f.f2);
  if (!f.initial.empty()) {
    const auto v = parse_numbers("--initial", f.initial);
    if (v.size() != 2) throw InputError("--initial: expected state,age");
    c.initial_state = static_cast<int>(v[0]);
    c.initial_age = v[1];
  }

  // The JSON config wins over flags.
  if (!f.config.empty()) {
    const json cfg = read_json_file("--config", f.config);
    if (!cfg.is_object()) throw InputError("--config: expected a JSON object");
    if (cfg.contains("dist")) c.dist = cfg["dist"];
    if (cfg.contains("delay")) c.delay = cfg["delay"];
    if (cfg.contains("k")) c.k = config_numbers(cfg, "k");
    if (cfg.contains("exp_rate")) {
      const json& e = cfg["exp_rate"];
      if (e.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << e.get<double>();
        c.exp_rate = os.str();
      } else if (e.is_string()) {
        c.exp_rate = e.get<std::string>();
      } else if (!e.is_null()) {
        throw InputError("config.exp_rate: expected \"auto\" or a number");
      }
    }
    if (cfg.contains("split_tol")) c.split_tol = config_value<double>(cfg, "split_tol");
    if (cfg.contains("replicas")) c.replicas = config_value<std::int64_t>(cfg, "replicas");
    if (cfg.contains("seed")) c.seed = config_value<std::uint64_t>(cfg, "seed");
    if (cfg.contains("horizon")) c.horizon = config_value<double>(cfg, "horizon");
    if (cfg.contains("t_grid")) c.t_grid = config_numbers(cfg, "t_grid");
    if (cfg.contains("bins")) c.bins = config_value<int>(cfg, "bins");
    if (cfg.contains("out_dir")) c.out_dir = config_value<std::string>(cfg, "out_dir");
    if (cfg.contains("f1")) c.f1 = cfg["f1"];
    if (cfg.contains("f2")) c.f2 = cfg["f2"];
    if (cfg.contains("initial")) {
      const json& i = cfg["initial"];
      if (i.contains("state")) c.initial_state = config_value<int>(i, "state");
      if (i.contains("age")) c.initial_age = config_value<double>(i, "age");
    }
  }

  if (!(c.split_tol > 0.0 && c.split_tol < 1e-2)) throw InputError("split_tol: must lie in (0, 1e-2)");
  if (c.replicas < 1) throw InputError("replicas: must be >= 1");
  if (!(c.horizon >= 0.0)) throw InputError("horizon: must be >= 0");
  if (c.bins < 2) throw InputError("bins: must be >= 2");
  for (double k : c.k)
    if (!(k >= 1.0)) throw InputError("k: values must be >= 1");
  if (c.exp_rate && *c.exp_rate != "auto") {
    const auto v = parse_numbers("exp_rate", *c.exp_rate);
    if (v.size() != 1 || !(v[0] > 0.0)) throw InputError("exp_rate: expected auto or a positive number");
  }
  return c;
}

Distribution load_dist(const char* field, const json& j) {
  if (j.is_null()) throw InputError(std::string(field) + ": missing");
  try {
    return Distribution::from_json(j);
  } catch (const InvalidArgument& e) {
    throw InputError(std::string(field) + ": " + e.what());
  }
}

void require_seed(const RunConfig& c) {
  if (!c.seed) throw InputError("--seed: required for " + c.command);
}

json envelope(const RunConfig& c) { return {{"schema_version", kSchemaVersion}, {"config", c.to_json()}}; }

fs::path prepare_out(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec || !fs::is_directory(c.out_dir)) throw InputError("out_dir: cannot create '" + c.out_dir + "'");
  return fs::path(c.out_dir);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("out_dir: cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("out_dir: write failed for '" + path.string() + "'");
}

void emit(const fs::path& dir, const std::string& name, const json& report) {
  const std::string text = report.dump(2) + "\n";
  write_file(dir / name, text);
  std::cout << text;
}

std::vector<BoundReport> collect_bounds(const RunConfig& c, const SplitDecomposition& split, const Delay& delay,
                                        json& out) {
  std::vector<BoundReport> reports;
  out = json::array();
  for (double k : c.k) {
    try {
      reports.push_back(polynomial_bound(split, delay, k, true));
      out.push_back(reports.back().to_json());
    } catch (const NotAdmissible& e) {
      out.push_back({{"mode", "polynomial"}, {"k", k}, {"error", e.what()}});
    }
  }
  if (c.exp_rate) {
    try {
      if (*c.exp_rate == "auto") {
        reports.push_back(exponential_bound_auto(split, delay, true));
      } else {
        reports.push_back(exponential_bound(split, delay, std::stod(*c.exp_rate), true));
      }
      out.push_back(reports.back().to_json());
    } catch (const NotAdmissible& e) {
      out.push_back({{"mode", "exponential"}, {"error", e.what()}});
    }
  }
  return reports;
}

int cmd_analyze(const RunConfig& c) {
  const Distribution d = load_dist("dist", c.dist);
  const ValidatedDistribution v = validate(d);
  const SplitDecomposition split = compute_split(v, c.split_tol);
  const fs::path dir = prepare_out(c);
  json r = envelope(c);
  r["distribution"] = d.to_json();
  r["mean"] = d.mean();
  r["kappa"] = split.kappa();
  r["kappa_error"] = split.kappa_error();
  r["trivial"] = split.trivial();
  r["psi_mass"] = split.mass(Component::Psi);
  r["cells"] = split.cells().size();
  r["mgf_abscissa"] = d.mgf_abscissa();
  const Distribution eq = split.equilibrium();
  json eqj = {{"mean", eq.raw_moment(1.0).finite() ? json(eq.mean()) : json(nullptr)},
              {"median", eq.quantile(0.5)},
              {"mgf_abscissa", eq.mgf_abscissa()}};
  r["equilibrium"] = eqj;
  r["split"] = split.to_json();
  emit(dir, "analyze.json", r);
  return kExitOk;
}

Delay make_delay(const RunConfig& c, const Distribution& period) {
  try {
    return Delay(period, delay_from_json(c.delay));
  } catch (const InvalidArgument& e) {
    throw InputError(std::string("delay: ") + e.what());
  }
}

int cmd_bounds(RunConfig c) {
  if (c.k.empty() && !c.exp_rate) c.k = {1.0};
  const Distribution d = load_dist("dist", c.dist);
  const SplitDecomposition split = compute_split(validate(d), c.split_tol);
  const Delay delay = make_delay(c, d);
  const fs::path dir = prepare_out(c);
  json r = envelope(c);
  r["kappa"] = split.kappa();
  r["kappa_error"] = split.kappa_error();
  json reports;
  const auto ok = collect_bounds(c, split, delay, reports);
  r["reports"] = reports;
  emit(dir, "bounds.json", r);
  return ok.empty() ? kExitFail : kExitOk;
}

int cmd_simulate(const RunConfig& c) {
  require_seed(c);
  const Distribution d = load_dist("dist", c.dist);
  const SplitDecomposition split = compute_split(validate(d), c.split_tol);
  const Delay delay = make_delay(c, d);
  const fs::path dir = prepare_out(c);

  const auto n = static_cast<std::size_t>(c.replicas);
  std::vector<std::string> lines(n);
  CouplingOptions opts;
  opts.horizon = c.horizon;
  parallel_for(n, [&](std::size_t i) {
    const UniformStream stream(*c.seed, Domain::coupling, i);
    lines[i] = simulate_coupling(split, delay, stream, opts).to_json().dump();
  });
  std::string jsonl;
  for (const auto& l : lines) jsonl += l + "\n";
  write_file(dir / "traces.jsonl", jsonl);

  const TauSummary s = sample_tau(split, delay, c.replicas, *c.seed, c.t_grid);
  std::ostringstream csv;
  csv.precision(17);
  csv << "replica,tau,attempts\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << i << ',';
    if (std::isnan(s.tau[i])) {
      csv << "";
    } else {
      csv << s.tau[i];
    }
    csv << ',' << s.attempts[i] << '\n';
  }
  write_file(dir / "tau.csv", csv.str());

  json r = envelope(c);
  r["kappa"] = split.kappa();
  r["tau"] = s.to_json();
  emit(dir, "simulate.json", r);
  return kExitOk;
}

int cmd_verify(RunConfig c) {
  require_seed(c);
  if (c.k.empty() && !c.exp_rate) c.k = {1.0};
  const Distribution d = load_dist("dist", c.dist);
  const SplitDecomposition split = compute_split(validate(d), c.split_tol);
  const Delay delay = make_delay(c, d);
  if (c.t_grid.empty()) {
    const double mu = d.mean();
    c.t_grid = {2 * mu, 4 * mu, 10 * mu, 20 * mu, 40 * mu};
  }
  const fs::path dir = prepare_out(c);
  json r = envelope(c);
  json reports_json;
  const auto reports = collect_bounds(c, split, delay, reports_json);
  TvCurve curve;
  try {
    curve = tv_curve(split, delay, c.t_grid, c.replicas, *c.seed, reports, c.bins);
  } catch (const InvalidArgument& e) {
    throw InputError(e.what());
  }
  write_file(dir / "tv_curve.csv", curve.to_csv());
  const VerifyReport v = verify(curve);
  r["kappa"] = split.kappa();
  r["reports"] = reports_json;
  r["curve"] = curve.to_json();
  r["verify"] = v.to_json();
  emit(dir, "verify.json", r);
  return v.ok ? kExitOk : kExitFail;
}

int cmd_alternating(RunConfig c) {
  if (c.f1.is_null()) throw InputError("--f1: missing");
  if (c.f2.is_null()) throw InputError("--f2: missing");
  AlternatingSpec spec = [&] {
    try {
      return AlternatingSpec::from_json({{"f1", c.f1}, {"f2", c.f2},
                                         {"initial", {{"state", c.initial_state}, {"age", c.initial_age}}}});
    } catch (const InvalidArgument& e) {
      throw InputError(e.what());
    }
  }();
  validate(spec);
  if (c.k.empty() && !c.exp_rate) c.k = {1.0};
  const SplitDecomposition split1 = compute_split(validate(spec.f1), c.split_tol);
  const fs::path dir = prepare_out(c);

  json r = envelope(c);
  const Occupancy occ = occupancy(spec);
  r["p"] = occ.p ? json(*occ.p) : json(nullptr);
  r["rho"] = occ.rho ? json(*occ.rho) : json(nullptr);
  r["kappa"] = split1.kappa();
  r["coupling_probability"] = effective_occupancy(spec) * split1.kappa();

  std::vector<BoundReport> reports;
  json reports_json = json::array();
  for (double k : c.k) {
    try {
      reports.push_back(alt_polynomial_bound(spec, split1, k));
      reports_json.push_back(reports.back().to_json());
    } catch (const NotAdmissible& e) {
      reports_json.push_back({{"mode", "polynomial"}, {"k", k}, {"error", e.what()}});
    }
  }
  if (c.exp_rate) {
    if (*c.exp_rate == "auto") throw InputError("exp_rate: alternating mode needs an explicit rate");
    try {
      reports.push_back(alt_exponential_bound(spec, split1, std::stod(*c.exp_rate)));
      reports_json.push_back(reports.back().to_json());
    } catch (const NotAdmissible& e) {
      reports_json.push_back({{"mode", "exponential"}, {"error", e.what()}});
    }
  }
  r["reports"] = reports_json;

  int status = kExitOk;
  if (c.seed && spec.has_idle_law()) {
    const auto n = static_cast<std::size_t>(c.replicas);
    std::vector<double> tau(n);
    std::vector<int> nu(n);
    std::vector<std::string> lines(n);
    parallel_for(n, [&](std::size_t i) {
      const UniformStream stream(*c.seed, Domain::alternating, i);
      const AltTrace tr = simulate_alt_coupling(spec, split1, stream, c.horizon);
      tau[i] = tr.tau ? *tr.tau : std::numeric_limits<double>::quiet_NaN();
      nu[i] = tr.nu;
      lines[i] = tr.to_json().dump();
    });
    std::string jsonl;
    for (const auto& l : lines) jsonl += l + "\n";
    write_file(dir / "alt_traces.jsonl", jsonl);
    const AltCheckReport check = alt_tau_bound_check(spec, split1.kappa(), tau, nu);
    r["check"] = check.to_json();
    const double cycle = spec.f1.mean() + spec.idle_mean();
    const Estimate o = occupancy_estimate(spec, 1e4 * cycle, std::min<std::int64_t>(c.replicas, 200), *c.seed);
    const double p = effective_occupancy(spec);
    r["occupancy"] = {{"estimate", o.value}, {"se", o.se}, {"ok", std::abs(o.value - p) <= 3.0 * o.se}};
    if (!check.ok() || std::abs(o.value - p) > 3.0 * o.se) status = kExitFail;
    if (!c.t_grid.empty()) {
      const TvCurve curve = alt_tv_curve(spec, c.t_grid, c.replicas, *c.seed, reports, c.bins);
      write_file(dir / "alt_tv_curve.csv", curve.to_csv());
      const VerifyReport v = verify(curve);
      r["curve"] = curve.to_json();
      r["verify"] = v.to_json();
      if (!v.ok) status = kExitFail;
    }
  }
  emit(dir, "alternating.json", r);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence-rate bounds for regenerative processes via coupling"};
  app.require_subcommand(1);
  RawFlags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file (wins over flags)");
    sub->add_option("--split-tol", f.split_tol, "splitting tolerance");
    sub->add_option("--out-dir", f.out_dir, "output directory (default $REGENBOUND_OUTPUT_DIR or .)");
  };
  auto add_dist = [&](CLI::App* sub) {
    sub->add_option("--dist", f.dist, "exp:r | gamma:k,r | weibull:k,s | uniform:lo,hi | hyperexp:w,r,... | det:x | @file.json");
    sub->add_option("--delay", f.delay, "age:<a> | stationary | law:<dist> (default age:0)");
  };
  auto add_modes = [&](CLI::App* sub) {
    sub->add_option("--k", f.k, "polynomial orders, comma separated");
    sub->add_option("--exp-rate", f.exp_rate, "auto or a rate for the exponential bound");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--replicas", f.replicas, "number of replicas");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--horizon", f.horizon, "simulate shared epochs up to this time after coupling");
    sub->add_option("--t-grid", f.t_grid, "comma separated time grid");
    sub->add_option("--bins", f.bins, "equiprobable bins for TV estimates");
  };

  auto* analyze = app.add_subcommand("analyze", "splitting report");
  add_common(analyze);
  add_dist(analyze);
  auto* bounds = app.add_subcommand("bounds", "polynomial and exponential constants");
  add_common(bounds);
  add_dist(bounds);
  add_modes(bounds);
  auto* simulate = app.add_subcommand("simulate", "coupling time samples and traces");
  add_common(simulate);
  add_dist(simulate);
  add_sim(simulate);
  auto* verify_cmd = app.add_subcommand("verify", "empirical TV curve against the bounds");
  add_common(verify_cmd);
  add_dist(verify_cmd);
  add_modes(verify_cmd);
  add_sim(verify_cmd);
  auto* alternating = app.add_subcommand("alternating", "alternating renewal pipeline");
  add_common(alternating);
  add_modes(alternating);
  add_sim(alternating);
  alternating->add_option("--f1", f.f1, "state-1 period law");
  alternating->add_option("--f2", f.f2, "state-2 period law or m2=VALUE");
  alternating->add_option("--initial", f.initial, "initial state,age (default 1,0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig c = resolve(command, f);
    if (command == "analyze") return cmd_analyze(c);
    if (command == "bounds") return cmd_bounds(c);
    if (command == "simulate") return cmd_simulate(c);
    if (command == "verify") return cmd_verify(c);
    return cmd_alternating(c);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConditionViolated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
