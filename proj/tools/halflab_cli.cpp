// halflab: batch experiment runner for the halving lab library.
//
// One subcommand per module: density, relate, construct, forge, mc.
// Config is a JSON object; --seed/--horizon/--tol override config keys.
// Reports are deterministic for a fixed config: timestamps only appear in
// the side manifest written next to --out.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "halflab/constructions.hpp"
#include "halflab/density.hpp"
#include "halflab/errors.hpp"
#include "halflab/forcing.hpp"
#include "halflab/montecarlo.hpp"
#include "halflab/rational.hpp"
#include "halflab/relations.hpp"
#include "halflab/schema_text.hpp"
#include "halflab/sets.hpp"

namespace {

using halflab::Rat;
using json = nlohmann::json;

std::string f12(double v) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(12) << v;
  return out.str();
}

std::string rat_text(const Rat& v) { return halflab::format_rational(v); }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << v;
  return out.str();
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// ---------- config access ----------

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw halflab::parse_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw halflab::parse_error("config '" + path + "': " + e.what());
  }
}

void check_keys(const json& cfg, std::initializer_list<const char*> allowed) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || it.key() == key;
    if (!ok) throw halflab::parse_error("config: unexpected key '" + it.key() + "'");
  }
}

std::uint64_t u64_key(const json& cfg, const char* key, std::optional<std::uint64_t> def) {
  if (!cfg.contains(key)) {
    if (def) return *def;
    throw halflab::parse_error(std::string("config: missing key '") + key + "'");
  }
  const json& v = cfg[key];
  if (!v.is_number_unsigned()) {
    throw halflab::parse_error(std::string("config: '") + key + "' must be an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

std::string str_key(const json& cfg, const char* key, std::optional<std::string> def) {
  if (!cfg.contains(key)) {
    if (def) return *def;
    throw halflab::parse_error(std::string("config: missing key '") + key + "'");
  }
  const json& v = cfg[key];
  if (!v.is_string()) {
    throw halflab::parse_error(std::string("config: '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

Rat rat_key(const json& cfg, const char* key, const Rat& def) {
  if (!cfg.contains(key)) return def;
  const json& v = cfg[key];
  if (!v.is_string()) {
    throw halflab::parse_error(std::string("config: '") + key + "' must be a rational string");
  }
  return halflab::parse_rational(v.get<std::string>());
}

std::vector<std::string> str_list_key(const json& cfg, const char* key) {
  if (!cfg.contains(key) || !cfg[key].is_array()) {
    throw halflab::parse_error(std::string("config: '") + key + "' must be an array");
  }
  std::vector<std::string> out;
  for (const json& v : cfg[key]) {
    if (!v.is_string()) {
      throw halflab::parse_error(std::string("config: '") + key + "' entries must be strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::uint64_t> u64_list_key(const json& cfg, const char* key) {
  if (!cfg.contains(key) || !cfg[key].is_array()) {
    throw halflab::parse_error(std::string("config: '") + key + "' must be an array");
  }
  std::vector<std::uint64_t> out;
  for (const json& v : cfg[key]) {
    if (!v.is_number_unsigned()) {
      throw halflab::parse_error(std::string("config: '") + key +
                                 "' entries must be unsigned integers");
    }
    out.push_back(v.get<std::uint64_t>());
  }
  return out;
}

// ---------- density ----------

json run_density(const json& cfg) {
  check_keys(cfg, {"set", "horizon", "from", "margin"});
  const halflab::Set x = halflab::parse_set(str_key(cfg, "set", std::nullopt));
  const std::uint64_t horizon = u64_key(cfg, "horizon", 4096);
  if (horizon == 0) throw halflab::precondition_error("density: horizon must be positive");
  const std::uint64_t from = u64_key(cfg, "from", std::min<std::uint64_t>(10, horizon));
  if (from < 1 || from > horizon) {
    throw halflab::precondition_error("density: need 1 <= from <= horizon");
  }
  const Rat margin = rat_key(cfg, "margin", Rat(1, 10));

  json body;
  body["set"] = halflab::format_set(x);
  body["horizon"] = horizon;
  body["density"] = rat_text(halflab::initial_density(x, horizon).value);
  const halflab::DensityWindow w = halflab::density_window(x, from, horizon);
  body["window"] = {{"from", w.from},
                    {"to", w.to},
                    {"min", rat_text(w.min_seen)},
                    {"max", rat_text(w.max_seen)},
                    {"last", rat_text(w.last)}};
  if (const auto exact = halflab::exact_density(x)) {
    body["exact"] = rat_text(exact->value);
  } else {
    body["exact"] = nullptr;
  }
  if (x.size_class() == halflab::Set::SizeClass::Finite) {
    body["moderate"] = nullptr;
    body["moderate_exact"] = nullptr;
  } else {
    const halflab::ModeracyVerdict v = halflab::is_moderate(x, from, horizon, margin);
    body["moderate"] = v.moderate;
    body["moderate_exact"] = v.exact;
  }
  return body;
}

std::string csv_density(const json& body) {
  std::ostringstream out;
  out << "set,horizon,density,window_min,window_max,exact,moderate\n";
  out << csv_field(body["set"].get<std::string>()) << ','
      << body["horizon"].get<std::uint64_t>() << ','
      << body["density"].get<std::string>() << ','
      << body["window"]["min"].get<std::string>() << ','
      << body["window"]["max"].get<std::string>() << ','
      << (body["exact"].is_null() ? "" : body["exact"].get<std::string>()) << ','
      << (body["moderate"].is_null() ? ""
                                     : (body["moderate"].get<bool>() ? "true" : "false"))
      << '\n';
  return out.str();
}

// ---------- relate ----------

const char* status_name(halflab::RelationStatus st) {
  switch (st) {
    case halflab::RelationStatus::HoldsAtHorizon: return "HoldsAtHorizon";
    case halflab::RelationStatus::FailsAtHorizon: return "FailsAtHorizon";
    default: return "Inconclusive";
  }
}

json run_relate(const json& cfg) {
  check_keys(cfg, {"relation", "x", "s", "family", "horizon", "tol", "rho", "cap", "n0"});
  const std::string relation = str_key(cfg, "relation", std::nullopt);
  const std::uint64_t horizon = u64_key(cfg, "horizon", 100000);
  if (horizon == 0) throw halflab::precondition_error("relate: horizon must be positive");
  const std::uint64_t n0 =
      u64_key(cfg, "n0", std::max<std::uint64_t>(1, halflab::default_burn_in(horizon)));
  const Rat tol = rat_key(cfg, "tol", Rat(1, 100));

  json rows = json::array();
  json body;
  bool all_hold = true;
  const auto push_row = [&rows](const std::string& subject, const std::string& verdict,
                                const json& witness) {
    rows.push_back({{"subject", subject}, {"verdict", verdict}, {"witness", witness}});
  };
  const auto pair_sets = [&cfg]() {
    const halflab::Set s = halflab::parse_set(str_key(cfg, "s", std::nullopt));
    const halflab::Set x = halflab::parse_set(str_key(cfg, "x", std::nullopt));
    return std::make_pair(s, x);
  };

  if (relation == "bisects_in_limit" || relation == "almost_bisects" ||
      relation == "star_splits") {
    const auto [s, x] = pair_sets();
    halflab::RelationVerdict v;
    if (relation == "bisects_in_limit") {
      v = halflab::bisects_in_limit(s, x, tol, n0, horizon);
    } else if (relation == "almost_bisects") {
      v = halflab::almost_bisects(s, x, tol, n0, horizon);
    } else {
      v = halflab::star_splits(s, x, tol, n0, horizon);
    }
    push_row(halflab::format_set(s) + "|" + halflab::format_set(x), status_name(v.status),
             v.witness ? json(*v.witness) : json(nullptr));
    all_hold = v.status == halflab::RelationStatus::HoldsAtHorizon;
  } else if (relation == "weakly_bisects") {
    const auto [s, x] = pair_sets();
    const halflab::WeakBisectionReport rep = halflab::weakly_bisects(s, x, tol, horizon);
    push_row(halflab::format_set(s) + "|" + halflab::format_set(x),
             rep.count > 0 ? "HoldsAtHorizon" : "Inconclusive", json(rep.count));
    all_hold = rep.count > 0;
  } else if (relation == "bisects_infinitely_often") {
    const auto [s, x] = pair_sets();
    const std::vector<std::uint64_t> hits = halflab::bisects_infinitely_often(s, x, horizon);
    push_row(halflab::format_set(s) + "|" + halflab::format_set(x),
             hits.empty() ? "Inconclusive" : "HoldsAtHorizon", json(hits.size()));
    all_hold = !hits.empty();
  } else if (relation == "statistically_independent" || relation == "rho_independent") {
    const std::vector<std::string> texts = str_list_key(cfg, "family");
    if (texts.empty()) throw halflab::precondition_error("relate: family must be non-empty");
    std::vector<halflab::Set> family;
    std::vector<std::string> canon;
    for (const std::string& t : texts) {
      family.push_back(halflab::parse_set(t));
      canon.push_back(halflab::format_set(family.back()));
    }
    const std::size_t cap = static_cast<std::size_t>(u64_key(cfg, "cap", 2));
    halflab::FamilyIndependenceReport rep;
    if (relation == "statistically_independent") {
      rep = halflab::statistically_independent(family, cap, tol, n0, horizon);
      body["moderacy_warning"] = rep.moderacy_warning;
    } else {
      const Rat rho = rat_key(cfg, "rho", Rat(1, 2));
      rep = halflab::rho_independent(family, rho, cap, tol, n0, horizon);
    }
    for (const halflab::SubfamilyVerdict& sub : rep.subfamilies) {
      std::string subject;
      for (std::size_t k = 0; k < sub.members.size(); ++k) {
        if (k > 0) subject += '&';
        subject += canon[sub.members[k]];
      }
      push_row(subject, status_name(sub.verdict.status),
               sub.verdict.witness ? json(*sub.verdict.witness) : json(nullptr));
    }
    all_hold = rep.all_hold;
  } else {
    throw halflab::parse_error("relate: unknown relation '" + relation + "'");
  }

  body["relation"] = relation;
  body["rows"] = rows;
  body["all_hold"] = all_hold;
  return body;
}

std::string csv_relate(const json& body) {
  std::ostringstream out;
  out << "relation,subject,verdict,witness\n";
  const std::string relation = body["relation"].get<std::string>();
  for (const json& row : body["rows"]) {
    out << csv_field(relation) << ',' << csv_field(row["subject"].get<std::string>()) << ','
        << row["verdict"].get<std::string>() << ',';
    if (!row["witness"].is_null()) out << row["witness"].get<std::uint64_t>();
    out << '\n';
  }
  if (body.contains("moderacy_warning") && body["moderacy_warning"].get<bool>()) {
    out << csv_field(relation) << ",moderacy-warning,Inconclusive,\n";
  }
  return out.str();
}

// ---------- construct ----------

json run_construct(const json& cfg) {
  check_keys(cfg, {"witness", "s", "x", "y", "horizon", "depth", "g", "seed", "blocks"});
  const std::string kind = str_key(cfg, "witness", std::nullopt);
  json body;
  body["witness"] = kind;
  if (kind == "factorial") {
    const halflab::Set s = halflab::parse_set(str_key(cfg, "s", std::nullopt));
    const std::uint64_t horizon = u64_key(cfg, "horizon", 100);
    const halflab::Set y =
        halflab::parse_set(str_key(cfg, "y", halflab::format_set(s)));
    const halflab::ChoppedReal real = halflab::factorial_chopped_real(s, horizon);
    body["schema"] = halflab::format_set(real.bits);
    body["boundaries"] = real.partition.boundaries();
    body["y"] = halflab::format_set(y);
    json rows = json::array();
    bool all_ok = true;
    for (const halflab::FactorialGuaranteeEntry& e :
         halflab::factorial_guarantee(real, y, horizon)) {
      rows.push_back({{"interval", e.interval},
                      {"density", rat_text(e.density)},
                      {"bound", rat_text(e.bound)},
                      {"ok", e.ok}});
      all_ok = all_ok && e.ok;
    }
    body["guarantee"] = rows;
    body["all_ok"] = all_ok;
  } else if (kind == "nonM") {
    const halflab::Set x = halflab::parse_set(str_key(cfg, "x", std::nullopt));
    const std::size_t depth = static_cast<std::size_t>(u64_key(cfg, "depth", 3));
    const halflab::ChoppedReal real = halflab::nonM_witness(x, depth);
    body["schema"] = halflab::format_set(real.bits);
    body["boundaries"] = real.partition.boundaries();
  } else if (kind == "dominator") {
    const halflab::Set x = halflab::parse_set(str_key(cfg, "x", std::nullopt));
    const std::vector<std::uint64_t> g = u64_list_key(cfg, "g");
    const std::uint64_t horizon = u64_key(cfg, "horizon", 64);
    const halflab::DominatorWitness w = halflab::bisect_witness_from_dominator(x, g, horizon);
    body["schema"] = halflab::format_set(w.y);
    body["gamma"] = w.gamma;
    body["big_g"] = w.big_g;
    body["domination_failures"] = w.domination_failures;
  } else if (kind == "cohen") {
    const std::uint64_t seed = u64_key(cfg, "seed", 1);
    const std::size_t blocks = static_cast<std::size_t>(u64_key(cfg, "blocks", 4));
    const halflab::BlockFamilyTrace trace = halflab::make_cohen_trace(seed, blocks);
    const halflab::CohenWitness w = halflab::cohen_antisplit_witness(trace);
    body["schema"] = halflab::format_set(w.x);
    body["y"] = halflab::format_set(w.y);
    json rows = json::array();
    for (const halflab::CohenBoundRow& r : w.rows) {
      rows.push_back({{"block", r.block},
                      {"l_prev", r.l_prev},
                      {"l_cur", r.l_cur},
                      {"ones", r.ones},
                      {"zeros", r.zeros},
                      {"delta", r.delta},
                      {"ratio", rat_text(r.ratio)},
                      {"chain_upper", rat_text(r.chain_upper)},
                      {"bound", rat_text(r.bound)},
                      {"ok", r.ok}});
    }
    body["rows"] = rows;
    body["all_ok"] = w.all_ok;
  } else {
    throw halflab::parse_error("construct: unknown witness '" + kind + "'");
  }
  return body;
}

// ---------- forge ----------

json run_forge(const json& cfg) {
  check_keys(cfg, {"index_count", "rounds", "min_horizon", "seed", "dom_cap"});
  const std::uint64_t index_count = u64_key(cfg, "index_count", 3);
  const std::uint64_t rounds = u64_key(cfg, "rounds", 16);
  const std::uint64_t min_horizon = u64_key(cfg, "min_horizon", 16384);
  const std::uint64_t seed = u64_key(cfg, "seed", 1);
  const std::size_t dom_cap = static_cast<std::size_t>(u64_key(cfg, "dom_cap", 3));

  const halflab::GenericRunReport rep =
      halflab::generic_run(index_count, rounds, min_horizon, seed, dom_cap);
  json body;
  body["final"] = json::parse(halflab::condition_to_json_text(rep.final_condition));
  json rounds_json = json::array();
  for (const halflab::GenericRunRound& r : rep.rounds) {
    rounds_json.push_back({{"round", r.round},
                           {"action", r.action},
                           {"support", r.support_size},
                           {"horizon", r.horizon},
                           {"eps_root", rat_text(r.eps_root)}});
  }
  body["rounds"] = rounds_json;
  json rows = json::array();
  for (const halflab::GenericRunRow& r : rep.rows) {
    rows.push_back({{"assignment", r.assignment},
                    {"count", r.count},
                    {"density", rat_text(r.density)},
                    {"target", rat_text(r.target)},
                    {"error", rat_text(r.error)},
                    {"bound", rat_text(r.bound)},
                    {"ok", r.ok}});
  }
  body["rows"] = rows;
  body["all_ok"] = rep.all_ok;
  return body;
}

// ---------- mc ----------

json run_mc(const json& cfg) {
  check_keys(cfg, {"experiment", "set", "s", "x", "steps", "trials", "seed", "horizon",
                   "eps", "tol", "n", "n_max", "target_count"});
  const std::string experiment = str_key(cfg, "experiment", std::nullopt);
  json body;
  body["experiment"] = experiment;
  if (experiment == "recurrence") {
    const std::string text = str_key(cfg, "set", "periodic(;1)");
    const halflab::Set x = halflab::parse_set(text);
    const std::uint64_t steps = u64_key(cfg, "steps", 10000);
    const std::uint64_t trials = u64_key(cfg, "trials", 1000);
    const std::uint64_t seed = u64_key(cfg, "seed", 1);
    const halflab::TrialReport t = halflab::estimate_recurrence(x, steps, trials, seed);
    const double est = t.estimate.convert_to<double>();
    const double sigma = std::sqrt(t.bound * (1.0 - t.bound) / static_cast<double>(trials));
    body["parameters"] = {{"set", halflab::format_set(x)}, {"steps", steps}, {"trials", trials}};
    body["seed"] = seed;
    body["successes"] = t.successes;
    body["estimate"] = rat_text(t.estimate);
    body["bound"] = f12(t.bound);
    body["sigma"] = f12(sigma);
    body["pass"] = std::fabs(est - t.bound) <= 3.0 * sigma;
  } else if (experiment == "lln") {
    const std::string text = str_key(cfg, "set", "periodic(;1)");
    const halflab::Set x = halflab::parse_set(text);
    const std::uint64_t horizon = u64_key(cfg, "horizon", 10000);
    const std::uint64_t trials = u64_key(cfg, "trials", 500);
    const Rat eps = rat_key(cfg, "eps", rat_key(cfg, "tol", Rat(1, 20)));
    const std::uint64_t seed = u64_key(cfg, "seed", 1);
    const halflab::TrialReport t = halflab::lln_density(x, horizon, trials, eps, seed);
    body["parameters"] = {{"set", halflab::format_set(x)},
                          {"horizon", horizon},
                          {"trials", trials},
                          {"eps", rat_text(eps)}};
    body["seed"] = seed;
    body["successes"] = t.successes;
    body["estimate"] = rat_text(t.estimate);
    body["bound"] = f12(t.bound);
    body["pass"] = t.estimate.convert_to<double>() >= t.bound;
  } else if (experiment == "walk") {
    const halflab::Set s = halflab::parse_set(str_key(cfg, "s", std::nullopt));
    const halflab::Set x = halflab::parse_set(str_key(cfg, "x", "periodic(;1)"));
    const std::uint64_t steps = u64_key(cfg, "steps", 1000);
    const std::vector<std::uint64_t> hits = halflab::walk_zero_hits(s, x, steps);
    body["parameters"] = {{"s", halflab::format_set(s)},
                          {"x", halflab::format_set(x)},
                          {"steps", steps}};
    body["seed"] = 0;
    body["hits"] = hits;
    body["count"] = hits.size();
    body["pass"] = true;
  } else if (experiment == "delta") {
    const std::uint64_t n_max = u64_key(cfg, "n_max", 100);
    const halflab::DeltaAuditReport rep = halflab::delta_audit(n_max);
    json rows = json::array();
    for (const halflab::DeltaAuditRow& r : rep.rows) {
      rows.push_back({{"n", r.n},
                      {"possibilities", r.possibility_count.str()},
                      {"target", rat_text(r.target_probability)},
                      {"threshold", r.threshold.str()},
                      {"delta", f12(r.delta)}});
    }
    body["parameters"] = {{"n_max", n_max}};
    body["seed"] = 0;
    body["rows"] = rows;
    body["exceptions"] = rep.exceptions;
    if (rep.stable_below_half_from) {
      body["stable_below_half_from"] = *rep.stable_below_half_from;
    } else {
      body["stable_below_half_from"] = nullptr;
    }
    body["pass"] = rep.stable_below_half_from && *rep.stable_below_half_from <= 3;
  } else if (experiment == "failrate") {
    const std::uint64_t n = u64_key(cfg, "n", 2);
    const std::uint64_t trials = u64_key(cfg, "trials", 2000);
    const std::uint64_t seed = u64_key(cfg, "seed", 1);
    const halflab::BlockPlan plan = halflab::make_block_plan(n);
    const std::uint64_t threshold = plan.threshold.convert_to<std::uint64_t>();
    const std::uint64_t target_count = u64_key(cfg, "target_count", threshold);
    std::vector<std::uint64_t> target(target_count);
    for (std::uint64_t i = 0; i < target_count; ++i) target[i] = plan.m_lo + i;
    const halflab::FailRateReport rep = halflab::fail_rate_vs_bound(plan, target, trials, seed);
    body["parameters"] = {{"n", n}, {"trials", trials}, {"target_count", target_count}};
    body["seed"] = seed;
    body["failures"] = rep.trial.successes;
    body["estimate"] = rat_text(rep.trial.estimate);
    body["per_window_sum"] = f12(rep.per_window_sum);
    body["closed_form"] = f12(rep.closed_form);
    body["slack"] = f12(rep.slack);
    body["within_bound"] = rep.within_bound;
    body["pass"] = rep.within_bound;
  } else {
    throw halflab::parse_error("mc: unknown experiment '" + experiment + "'");
  }
  return body;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw halflab::precondition_error("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw halflab::precondition_error("failed writing output file '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"halving lab experiment runner"};
  app.fallthrough();
  std::string config_path, out_path, format, tol_text;
  std::uint64_t seed = 0, horizon = 0;
  const auto* seed_opt = app.add_option("--seed", seed, "override config seed (u64)");
  const auto* horizon_opt = app.add_option("--horizon", horizon, "override config horizon");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--tol", tol_text, "override config tolerance, as P/Q");
  app.add_option("--out", out_path, "report file; a .manifest.json is written next to it");
  app.add_option("--format", format, "csv or json");
  app.require_subcommand(1);
  for (const char* name : {"density", "relate", "construct", "forge", "mc"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return halflab::kExitParse;
  }

  try {
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    if (!cfg.is_object()) throw halflab::parse_error("config must be a json object");
    if (seed_opt->count() > 0) cfg["seed"] = seed;
    if (horizon_opt->count() > 0) cfg["horizon"] = horizon;
    if (!tol_text.empty()) {
      halflab::parse_rational(tol_text);
      cfg["tol"] = tol_text;
    }
    if (cfg.contains("seed") && !cfg["seed"].is_number_unsigned()) {
      throw halflab::parse_error("config: 'seed' must be an unsigned integer");
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    json body;
    if (sub == "density") body = run_density(cfg);
    else if (sub == "relate") body = run_relate(cfg);
    else if (sub == "construct") body = run_construct(cfg);
    else if (sub == "forge") body = run_forge(cfg);
    else if (sub == "mc") body = run_mc(cfg);

    std::string fmt = format;
    if (fmt.empty()) fmt = (sub == "relate") ? "csv" : "json";
    if (fmt != "csv" && fmt != "json") {
      throw halflab::parse_error("format must be csv or json");
    }
    std::string rendered;
    if (fmt == "json") {
      rendered = body.dump(2) + "\n";
    } else if (sub == "density") {
      rendered = csv_density(body);
    } else if (sub == "relate") {
      rendered = csv_relate(body);
    } else {
      throw halflab::parse_error("csv format is not defined for '" + sub + "' reports");
    }

    if (out_path.empty()) {
      std::cout << rendered;
    } else {
      write_file(out_path, rendered);
      json manifest;
      manifest["tool"] = "halflab";
      manifest["version"] = "1.0.0";
      manifest["config_hash"] = hex16(fnv1a64(cfg.dump()));
      manifest["seed"] = cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : 0;
      manifest["generated_at"] = iso_utc_now();
      write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
    }
    return halflab::kExitOk;
  } catch (const halflab::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return halflab::kExitParse;
  } catch (const halflab::precondition_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return halflab::kExitPrecondition;
  } catch (const halflab::budget_exhausted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return halflab::kExitPrecondition;
  } catch (const halflab::invariant_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return halflab::kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return halflab::kExitInvariant;
  }
}
