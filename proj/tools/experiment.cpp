#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "twochoices/birth_death.hpp"
#include "twochoices/drift.hpp"
#include "twochoices/dynamics.hpp"
#include "twochoices/error.hpp"
#include "twochoices/rng.hpp"
#include "twochoices/spectral.hpp"
#include "twochoices/stats.hpp"

namespace twochoices::tools {
namespace {

using nlohmann::json;

[[noreturn]] void bad_spec(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, "experiment spec: " + msg);
}

json fit_json(const LinearFit& f) {
  return {{"slope", sig15(f.slope)}, {"intercept", sig15(f.intercept)},
          {"r_squared", sig15(f.r_squared)}};
}

// Fits need two distinct x values; otherwise the entry is null.
json maybe_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (std::set<double>(x.begin(), x.end()).size() < 2) return nullptr;
  return fit_json(least_squares(x, y));
}

std::vector<std::size_t> parse_sizes(const json& j) {
  std::vector<std::size_t> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<std::size_t>());
  } else if (j.is_object()) {
    const auto start = j.at("start").get<std::size_t>();
    const auto stop = j.at("stop").get<std::size_t>();
    const auto step = j.value("step", std::size_t{1});
    if (step == 0 || stop < start) bad_spec("bad n range");
    for (std::size_t n = start; n <= stop; n += step) out.push_back(n);
  } else {
    out.push_back(j.get<std::size_t>());
  }
  return out;
}

std::vector<double> parse_reals(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return {j.get<double>()};
}

json spectral_json(const SpectralSummary& s) {
  return {{"lambda1", sig15(s.lambda1)}, {"lambda", sig15(s.lambda)},  {"d_min", s.d_min},
          {"d_max", s.d_max},            {"L_min", sig15(s.L_min)},    {"L_max", sig15(s.L_max)},
          {"Sigma_L", sig15(s.Sigma_L)}, {"Delta_L", sig15(s.Delta_L)}, {"K_L", sig15(s.K_L)},
          {"bipartite", s.bipartite}};
}

json opt_json(const std::optional<double>& v) {
  return v ? json(sig15(*v)) : json(nullptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

// Graph for replicate block gi at size n, seeded independently of run seeds.
std::uint64_t graph_seed(std::uint64_t seed, std::size_t n, std::size_t gi) {
  return derive_seed(seed, n * 1000 + gi);
}
std::uint64_t run_seed(std::uint64_t seed, std::size_t n, std::size_t gi) {
  return derive_seed(seed ^ 0xabcdefULL, n * 1000 + gi);
}

ExperimentResult fig1(const ExperimentSpec& spec, const json& resolved) {
  std::ostringstream csv;
  csv << provenance_header(resolved) << "n,alpha,t_mix,cap_exceeded,expected_T_half_from_0\n";
  json fits = json::array();
  for (double alpha : spec.alpha) {
    std::vector<double> ns;
    std::vector<double> log_ns;
    std::vector<double> ts;
    std::vector<double> log_ts;
    std::size_t capped = 0;
    for (std::size_t n : spec.n) {
      const auto rates = complete_rates(n, alpha);
      const auto m = mixing_time(rates, spec.epsilon, spec.t_cap);
      const double hit = expected_hitting_time(rates, 0, half_targets(n));
      csv << n << ',' << num(alpha) << ',' << num(m.time) << ',' << (m.cap_exceeded ? 1 : 0)
          << ',' << num(hit) << '\n';
      if (m.cap_exceeded) {
        ++capped;
        continue;
      }
      ns.push_back(double(n));
      log_ns.push_back(std::log(double(n)));
      ts.push_back(m.time);
      log_ts.push_back(std::log(m.time));
    }
    fits.push_back({{"alpha", sig15(alpha)},
                    {"points", ns.size()},
                    {"cap_exceeded", capped},
                    {"log_t_mix_vs_n", maybe_fit(ns, log_ts)},
                    {"t_mix_vs_log_n", maybe_fit(log_ns, ts)}});
  }
  return {csv.str(), {{"spec", resolved}, {"fits", fits}}};
}

ExperimentResult fig2(const ExperimentSpec& spec, const json& resolved) {
  std::ostringstream csv;
  csv << provenance_header(resolved) << "n,alpha,y,f\n";
  json curves = json::array();
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / spec.y_step));
  for (std::size_t n : spec.n) {
    for (double alpha : spec.alpha) {
      int sign_changes = 0;
      int last_sign = 0;
      for (std::size_t i = 0; i <= steps; ++i) {
        const double y = double(i) / double(steps);
        const double f = f_complete(y, n, alpha);
        csv << n << ',' << num(alpha) << ',' << num(y) << ',' << num(f) << '\n';
        const int sign = (f > 0) - (f < 0);
        if (sign != 0) {
          if (last_sign != 0 && sign != last_sign) ++sign_changes;
          last_sign = sign;
        }
      }
      const auto profile = roots_complete(n, alpha);
      json roots = json::array();
      for (const auto& r : profile.roots) {
        roots.push_back({{"y", sig15(r.value)},
                         {"stability", r.stability == Stability::kAttracting ? "attracting"
                                                                              : "repelling"}});
      }
      curves.push_back({{"n", n},
                        {"alpha", sig15(alpha)},
                        {"sign_changes", sign_changes},
                        {"roots", roots},
                        {"contraction", sig15(profile.contraction)},
                        {"degenerate", profile.degenerate}});
    }
  }
  return {csv.str(), {{"spec", resolved}, {"curves", curves}}};
}

void run_rows(std::ostringstream& csv, const std::vector<RunRecord>& runs, std::size_t n,
              double alpha, std::size_t gi) {
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& rec = runs[r];
    csv << n << ',' << num(alpha) << ',' << gi << ',' << r << ',' << rec.seed << ','
        << (rec.hit_time ? num(*rec.hit_time) : "") << ',' << (rec.censored ? 1 : 0) << ','
        << rec.events << '\n';
  }
}

json batch_json(std::size_t n, double alpha, const BatchSummary& s) {
  return {{"n", n},
          {"alpha", sig15(alpha)},
          {"runs", s.replicates},
          {"hits", s.hits},
          {"censored", s.censored_count},
          {"mean", sig15(s.mean)},
          {"stderr", sig15(s.std_error)},
          {"censored_lower_mean", sig15(s.censored_lower_mean)}};
}

ExperimentResult hitting(const ExperimentSpec& spec, const json& resolved, bool regular) {
  std::ostringstream csv;
  csv << provenance_header(resolved) << "n,alpha,graph,replicate,seed,hit_time,censored,events\n";
  json points = json::array();
  json fits = json::array();
  const std::uint64_t seed = *spec.seed;
  for (double alpha : spec.alpha) {
    std::vector<double> ns;
    std::vector<double> log_ns;
    std::vector<double> means;
    std::vector<double> log_means;
    for (std::size_t n : spec.n) {
      std::vector<RunRecord> pooled;
      for (std::size_t gi = 0; gi < spec.graphs; ++gi) {
        const Graph g = regular ? random_regular(n, spec.degree, graph_seed(seed, n, gi))
                                : erdos_renyi(n, 2.0 * std::log(double(n)), graph_seed(seed, n, gi));
        SimConfig cfg;
        cfg.alpha = alpha;
        cfg.k = spec.k;
        cfg.seed = run_seed(seed, n, gi);
        cfg.t_max = spec.t_max;
        cfg.stop_levels = half_targets(n);
        auto batch = run_batch(g, OpinionState::zeros(n), cfg, spec.replicates, spec.threads);
        run_rows(csv, batch.runs, n, alpha, gi);
        pooled.insert(pooled.end(), batch.runs.begin(), batch.runs.end());
      }
      const auto s = summarize(pooled, spec.t_max);
      points.push_back(batch_json(n, alpha, s));
      // Censored points enter the fits through their lower-bound mean.
      const double m = s.censored_count > 0 ? s.censored_lower_mean : s.mean;
      ns.push_back(double(n));
      log_ns.push_back(std::log(double(n)));
      means.push_back(m);
      log_means.push_back(std::log(m));
    }
    fits.push_back({{"alpha", sig15(alpha)},
                    {"log_mean_vs_n", maybe_fit(ns, log_means)},
                    {"mean_vs_log_n", maybe_fit(log_ns, means)}});
  }
  return {csv.str(), {{"spec", resolved}, {"points", points}, {"fits", fits}}};
}

ExperimentResult thresholds(const ExperimentSpec& spec, const json& resolved) {
  const SpectralSummary s = spec.lambda
                                ? summary_from_lambda(*spec.lambda, std::uint32_t(spec.degree),
                                                      std::uint32_t(spec.degree))
                                : spectral_summary(build_graph(*spec.graph));
  std::ostringstream csv;
  csv << provenance_header(resolved)
      << "alpha,regime,alpha_meta_threshold,c_alpha_L,epsilon_L,r_lower,r_smaller\n";
  json rows = json::array();
  std::optional<double> threshold;
  for (double alpha : spec.alpha) {
    const auto t = thresholds_general(s, alpha);
    threshold = t.alpha_meta_threshold;
    csv << num(alpha) << ',' << to_string(t.regime) << ',' << opt_num(t.alpha_meta_threshold)
        << ',' << num(t.c_alpha_L) << ',' << opt_num(t.epsilon_L) << ',' << opt_num(t.r_lower)
        << ',' << opt_num(t.r_smaller) << '\n';
    rows.push_back({{"alpha", sig15(alpha)},
                    {"regime", std::string(to_string(t.regime))},
                    {"c_alpha_L", sig15(t.c_alpha_L)},
                    {"epsilon_L", opt_json(t.epsilon_L)},
                    {"r_lower", opt_json(t.r_lower)},
                    {"r_smaller", opt_json(t.r_smaller)}});
  }
  return {csv.str(),
          {{"spec", resolved},
           {"spectral", spectral_json(s)},
           {"K_L", sig15(s.K_L)},
           {"alpha_meta_threshold", opt_json(threshold)},
           {"threshold_undefined", s.K_L >= 1.0},
           {"alphas", rows}}};
}

ExperimentResult custom(const ExperimentSpec& spec, const json& resolved) {
  const Graph g = build_graph(*spec.graph);
  const std::size_t n = g.size();
  std::ostringstream csv;
  csv << provenance_header(resolved) << "n,alpha,graph,replicate,seed,hit_time,censored,events\n";
  json points = json::array();
  for (double alpha : spec.alpha) {
    SimConfig cfg;
    cfg.alpha = alpha;
    cfg.k = spec.k;
    cfg.seed = derive_seed(*spec.seed, std::uint64_t(std::llround(alpha * 1e6)));
    cfg.t_max = spec.t_max;
    cfg.stop_levels = half_targets(n);
    const auto batch = run_batch(g, OpinionState::zeros(n), cfg, spec.replicates, spec.threads);
    run_rows(csv, batch.runs, n, alpha, 0);
    points.push_back(batch_json(n, alpha, batch.summary));
  }
  return {csv.str(), {{"spec", resolved}, {"points", points}}};
}

}  // namespace

double sig15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

nlohmann::json GraphSpec::to_json() const {
  json j = {{"type", type}, {"seed", seed}};
  if (type == "file") {
    j["file"] = file;
  } else {
    j["n"] = n;
  }
  if (type == "dreg") j["d"] = d;
  if (type == "er") j["mean_degree"] = sig15(mean_degree.value_or(2.0 * std::log(double(n))));
  return j;
}

GraphSpec graph_spec_from_json(const nlohmann::json& j) {
  GraphSpec g;
  for (const auto& [key, value] : j.items()) {
    if (key == "type") g.type = value.get<std::string>();
    else if (key == "n") g.n = value.get<std::size_t>();
    else if (key == "d") g.d = value.get<std::size_t>();
    else if (key == "mean_degree") g.mean_degree = value.get<double>();
    else if (key == "file") g.file = value.get<std::string>();
    else if (key == "seed") g.seed = value.get<std::uint64_t>();
    else bad_spec("unknown graph key '" + key + "'");
  }
  return g;
}

Graph build_graph(const GraphSpec& spec) {
  if (spec.type == "complete") return complete_graph(spec.n);
  if (spec.type == "er") {
    return erdos_renyi(spec.n, spec.mean_degree.value_or(2.0 * std::log(double(spec.n))), spec.seed);
  }
  if (spec.type == "dreg") return random_regular(spec.n, spec.d, spec.seed);
  if (spec.type == "file") {
    std::ifstream in(spec.file);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open graph file " + spec.file);
    return read_edge_list(in);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown graph type '" + spec.type + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kFig1Mixing: return "fig1_mixing";
    case ExperimentKind::kFig2Drift: return "fig2_drift";
    case ExperimentKind::kFig3ErHitting: return "fig3_er_hitting";
    case ExperimentKind::kFig4DregHitting: return "fig4_dreg_hitting";
    case ExperimentKind::kThresholds: return "thresholds";
    case ExperimentKind::kCustom: return "custom";
  }
  return "unknown";
}

ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_spec("top level must be an object");
  ExperimentSpec s;
  try {
    const auto kind = j.at("kind").get<std::string>();
    bool known = false;
    for (auto k : {ExperimentKind::kFig1Mixing, ExperimentKind::kFig2Drift,
                   ExperimentKind::kFig3ErHitting, ExperimentKind::kFig4DregHitting,
                   ExperimentKind::kThresholds, ExperimentKind::kCustom}) {
      if (to_string(k) == kind) {
        s.kind = k;
        known = true;
      }
    }
    if (!known) bad_spec("unknown kind '" + kind + "'");
    for (const auto& [key, value] : j.items()) {
      if (key == "kind") continue;
      else if (key == "n") s.n = parse_sizes(value);
      else if (key == "alpha") s.alpha = parse_reals(value);
      else if (key == "graphs") s.graphs = value.get<std::size_t>();
      else if (key == "replicates") s.replicates = value.get<std::size_t>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "epsilon") s.epsilon = value.get<double>();
      else if (key == "t_cap") s.t_cap = value.get<double>();
      else if (key == "t_max") s.t_max = value.get<double>();
      else if (key == "degree") s.degree = value.get<std::size_t>();
      else if (key == "y_step") s.y_step = value.get<double>();
      else if (key == "k") s.k = value.get<int>();
      else if (key == "graph") s.graph = graph_spec_from_json(value);
      else if (key == "lambda") s.lambda = value.get<double>();
      else if (key == "output") s.output = value.get<std::string>();
      else if (key == "threads") s.threads = value.get<unsigned>();
      else bad_spec("unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("experiment spec: ") + e.what());
  }
  s.resolved();  // validate
  return s;
}

nlohmann::json ExperimentSpec::resolved() const {
  const bool simulates = kind == ExperimentKind::kFig3ErHitting ||
                         kind == ExperimentKind::kFig4DregHitting || kind == ExperimentKind::kCustom;
  const bool needs_n = kind != ExperimentKind::kThresholds && kind != ExperimentKind::kCustom;
  if (alpha.empty()) bad_spec("alpha grid is empty");
  for (double a : alpha) {
    if (!(a >= 0.0 && a <= 1.0)) bad_spec("alpha values must lie in [0, 1]");
  }
  if (needs_n && n.empty()) bad_spec("n grid is empty");
  for (std::size_t v : n) {
    if (v < 2) bad_spec("n values must be >= 2");
  }
  if (simulates && !seed) bad_spec("simulation experiments need an explicit seed");
  if (simulates && (graphs < 1 || replicates < 1)) bad_spec("graphs and replicates must be >= 1");
  if (simulates && !(t_max > 0.0)) bad_spec("t_max must be positive");
  if (kind == ExperimentKind::kFig1Mixing && !(epsilon > 0.0)) bad_spec("epsilon must be positive");
  if (kind == ExperimentKind::kFig2Drift && !(y_step > 0.0 && y_step <= 0.5)) {
    bad_spec("y_step must lie in (0, 0.5]");
  }
  if (kind == ExperimentKind::kThresholds && !graph && !lambda) {
    bad_spec("thresholds needs a graph or an analytic lambda");
  }
  if (kind == ExperimentKind::kCustom && !graph) bad_spec("custom needs a graph");

  json j = {{"kind", to_string(kind)}, {"alpha", json::array()}, {"output", output}};
  for (double a : alpha) j["alpha"].push_back(sig15(a));
  if (!n.empty()) j["n"] = n;
  switch (kind) {
    case ExperimentKind::kFig1Mixing:
      j["epsilon"] = sig15(epsilon);
      j["t_cap"] = sig15(t_cap);
      break;
    case ExperimentKind::kFig2Drift:
      j["y_step"] = sig15(y_step);
      break;
    case ExperimentKind::kFig3ErHitting:
    case ExperimentKind::kFig4DregHitting:
      j["graphs"] = graphs;
      [[fallthrough]];
    case ExperimentKind::kCustom:
      j["replicates"] = replicates;
      j["seed"] = *seed;
      j["t_max"] = sig15(t_max);
      j["k"] = k;
      j["initial"] = "zeros";
      j["stop"] = "half";
      if (kind == ExperimentKind::kFig4DregHitting) j["degree"] = degree;
      if (kind == ExperimentKind::kFig3ErHitting) j["mean_degree"] = "2 ln n";
      if (graph) j["graph"] = graph->to_json();
      break;
    case ExperimentKind::kThresholds:
      if (lambda) {
        j["lambda"] = sig15(*lambda);
        j["degree"] = degree;
      } else {
        j["graph"] = graph->to_json();
      }
      break;
  }
  return j;
}

std::string provenance_header(const nlohmann::json& resolved_spec) {
  return "# twochoices experiment\n# spec: " + resolved_spec.dump() + "\n";
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const json resolved = spec.resolved();
  switch (spec.kind) {
    case ExperimentKind::kFig1Mixing: return fig1(spec, resolved);
    case ExperimentKind::kFig2Drift: return fig2(spec, resolved);
    case ExperimentKind::kFig3ErHitting: return hitting(spec, resolved, false);
    case ExperimentKind::kFig4DregHitting: return hitting(spec, resolved, true);
    case ExperimentKind::kThresholds: return thresholds(spec, resolved);
    case ExperimentKind::kCustom: return custom(spec, resolved);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown experiment kind");
}

void write_result(const ExperimentResult& result, const std::string& output) {
  std::ofstream csv(output + ".csv", std::ios::binary);
  std::ofstream js(output + ".json", std::ios::binary);
  if (!csv || !js) throw Error(ErrorCode::kInvalidArgument, "cannot write outputs at " + output);
  csv << result.csv;
  js << result.summary.dump(2) << '\n';
}

}  // namespace twochoices::tools
