// twochoices command-line front end.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "twochoices/birth_death.hpp"
#include "twochoices/drift.hpp"
#include "twochoices/dynamics.hpp"
#include "twochoices/error.hpp"
#include "twochoices/spectral.hpp"

namespace tc = twochoices;
namespace tt = twochoices::tools;
using nlohmann::json;

namespace {

// Writes <out>.csv / <out>.json, or CSV to stdout and JSON to stderr.
void emit(const std::string& out, const std::string& csv, const json& summary) {
  if (out.empty()) {
    std::cout << csv;
    if (!summary.is_null()) std::cerr << summary.dump(2) << '\n';
    return;
  }
  tt::write_result({csv, summary}, out);
}

void emit_json(const std::string& out, const json& j) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out + ".json", std::ios::binary);
  if (!f) throw tc::Error(tc::ErrorCode::kInvalidArgument, "cannot write " + out + ".json");
  f << j.dump(2) << '\n';
}

std::vector<std::size_t> parse_sweep(const std::string& s) {
  std::size_t a = 0, b = 0, step = 1;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  in >> a >> c1 >> b;
  if (in && in.peek() == ':') in >> c2 >> step;
  if (!in.eof() || c1 != ':' || step == 0 || b < a) {
    throw tc::Error(tc::ErrorCode::kInvalidArgument, "sweep must be start:stop[:step]");
  }
  std::vector<std::size_t> out;
  for (std::size_t n = a; n <= b; n += step) out.push_back(n);
  return out;
}

struct GraphOpts {
  std::string type = "complete";
  std::size_t n = 0;
  std::size_t d = 10;
  std::optional<double> mean_degree;
  std::string file;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--graph", type, "complete | er | dreg | file")
        ->check(CLI::IsMember({"complete", "er", "dreg", "file"}));
    app->add_option("--n", n, "number of vertices");
    app->add_option("--d", d, "degree for dreg");
    app->add_option("--mean-degree", mean_degree, "mean degree for er (default 2 ln n)");
    app->add_option("--file", file, "edge-list file for --graph file");
    app->add_option("--graph-seed", seed, "seed for random graphs");
  }
  tt::GraphSpec spec() const { return {type, n, d, mean_degree, file, seed}; }
};

json spectral_json(const tc::SpectralSummary& s) {
  return {{"lambda1", tt::sig15(s.lambda1)}, {"lambda", tt::sig15(s.lambda)},
          {"d_min", s.d_min},                {"d_max", s.d_max},
          {"L_min", tt::sig15(s.L_min)},     {"L_max", tt::sig15(s.L_max)},
          {"Sigma_L", tt::sig15(s.Sigma_L)}, {"Delta_L", tt::sig15(s.Delta_L)},
          {"K_L", tt::sig15(s.K_L)},         {"bipartite", s.bipartite},
          {"residual", tt::sig15(s.residual)}};
}

json opt(const std::optional<double>& v) { return v ? json(tt::sig15(*v)) : json(nullptr); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis and simulation of the noisy two-choices consensus protocol"};
  app.require_subcommand(1);

  // analyze-complete
  auto* ac = app.add_subcommand("analyze-complete",
                                "Mixing time and E[T_1/2] of the count chain on K_n");
  std::size_t ac_n = 0;
  std::string ac_sweep, ac_out;
  double ac_alpha = 0.0, ac_eps = 0.25, ac_cap = tc::kDefaultTimeCap;
  std::size_t ac_a0 = 0;
  auto* ac_n_opt = ac->add_option("--n", ac_n, "single n");
  ac->add_option("--sweep", ac_sweep, "start:stop[:step]")->excludes(ac_n_opt);
  ac->add_option("--alpha", ac_alpha, "noise rate")->required()->check(CLI::Range(0.0, 1.0));
  ac->add_option("--epsilon", ac_eps, "TV threshold for the mixing time");
  ac->add_option("--t-cap", ac_cap, "give up on mixing beyond this time");
  ac->add_option("--a0", ac_a0, "start count for the hitting time");
  ac->add_option("--out", ac_out, "output prefix (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the dynamics on a graph");
  GraphOpts sim_graph;
  sim_graph.add(sim);
  double sim_alpha = 0.0, sim_t_max = 1e6, sim_fraction = 0.5;
  int sim_k = 1;
  std::string sim_init = "zeros", sim_stop = "half", sim_out;
  std::size_t sim_reps = 1, sim_level = 0;
  std::uint64_t sim_seed = 0;
  unsigned sim_threads = 0;
  sim->add_option("--alpha", sim_alpha, "noise rate")->required()->check(CLI::Range(0.0, 1.0));
  sim->add_option("--k", sim_k, "2k samples per update")->check(CLI::Range(1, tc::kMaxK));
  sim->add_option("--init", sim_init, "zeros | ones | fraction")
      ->check(CLI::IsMember({"zeros", "ones", "fraction"}));
  sim->add_option("--fraction", sim_fraction, "P(bit = 1) for --init fraction");
  sim->add_option("--replicates", sim_reps)->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed)->required();
  sim->add_option("--t-max", sim_t_max, "censoring horizon");
  sim->add_option("--stop", sim_stop, "half | level | none")
      ->check(CLI::IsMember({"half", "level", "none"}));
  sim->add_option("--level", sim_level, "count for --stop level");
  sim->add_option("--threads", sim_threads, "0 = hardware concurrency");
  sim->add_option("--out", sim_out, "output prefix (default stdout/stderr)");

  // drift
  auto* dr = app.add_subcommand("drift", "Drift f(y) on K_n over a y grid");
  std::size_t dr_n = 0;
  double dr_alpha = 0.0, dr_step = 0.01;
  std::string dr_out;
  dr->add_option("--n", dr_n)->required()->check(CLI::Range(std::size_t{2}, std::size_t(1) << 62));
  dr->add_option("--alpha", dr_alpha)->required()->check(CLI::Range(0.0, 1.0));
  dr->add_option("--step", dr_step, "grid step in y")->check(CLI::Range(1e-6, 0.5));
  dr->add_option("--out", dr_out, "output prefix (default stdout)");

  // spectral
  auto* sp = app.add_subcommand("spectral", "Spectral constants of a graph");
  GraphOpts sp_graph;
  sp_graph.add(sp);
  std::string sp_out;
  sp->add_option("--out", sp_out, "output prefix (default stdout)");

  // thresholds
  auto* th = app.add_subcommand("thresholds", "Regime classification for general graphs");
  GraphOpts th_graph;
  th_graph.add(th);
  std::optional<double> th_lambda;
  std::vector<double> th_alpha;
  std::string th_out;
  th->add_option("--lambda", th_lambda, "analytic lambda for a d-regular family (uses --d)");
  th->add_option("--alpha", th_alpha, "noise rates")->required();
  th->add_option("--out", th_out, "output prefix (default stdout)");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run a JSON experiment spec");
  std::string ex_spec, ex_out;
  ex->add_option("--spec", ex_spec, "spec file")->required()->check(CLI::ExistingFile);
  ex->add_option("--out", ex_out, "output prefix (overrides the spec's output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ac) {
      std::vector<std::size_t> ns = ac_sweep.empty() ? std::vector<std::size_t>{ac_n}
                                                     : parse_sweep(ac_sweep);
      if (ns.empty() || ns.front() < 2) {
        throw tc::Error(tc::ErrorCode::kInvalidArgument, "need --n >= 2 or --sweep");
      }
      std::ostringstream csv;
      csv << "# twochoices analyze-complete alpha=" << tt::num(ac_alpha)
          << " epsilon=" << tt::num(ac_eps) << " a0=" << ac_a0 << "\n";
      csv << "record,n,alpha,a0,value,cap_exceeded\n";
      for (std::size_t n : ns) {
        const auto rates = tc::complete_rates(n, ac_alpha);
        const auto m = tc::mixing_time(rates, ac_eps, ac_cap);
        csv << "t_mix," << n << ',' << tt::num(ac_alpha) << ",," << tt::num(m.time) << ','
            << (m.cap_exceeded ? 1 : 0) << '\n';
        const double hit = tc::expected_hitting_time(rates, ac_a0, tc::half_targets(n));
        csv << "expected_T_half," << n << ',' << tt::num(ac_alpha) << ',' << ac_a0 << ','
            << tt::num(hit) << ",0\n";
      }
      emit(ac_out, csv.str(), nullptr);
    } else if (*sim) {
      const tc::Graph g = tt::build_graph(sim_graph.spec());
      const std::size_t n = g.size();
      tc::SimConfig cfg;
      cfg.alpha = sim_alpha;
      cfg.k = sim_k;
      cfg.seed = sim_seed;
      cfg.t_max = sim_t_max;
      if (sim_stop == "half") cfg.stop_levels = tc::half_targets(n);
      if (sim_stop == "level") cfg.stop_levels = {sim_level};
      const tc::OpinionState init =
          sim_init == "zeros"  ? tc::OpinionState::zeros(n)
          : sim_init == "ones" ? tc::OpinionState::ones(n)
                               : tc::OpinionState::with_fraction(n, sim_fraction,
                                                                 tc::derive_seed(sim_seed, ~0ULL));
      const auto batch = tc::run_batch(g, init, cfg, sim_reps, sim_threads);
      json resolved = {{"graph", sim_graph.spec().to_json()}, {"n", n},
                       {"alpha", tt::sig15(sim_alpha)},       {"k", sim_k},
                       {"init", sim_init},                    {"replicates", sim_reps},
                       {"seed", sim_seed},                    {"t_max", tt::sig15(sim_t_max)},
                       {"stop", sim_stop}};
      if (sim_init == "fraction") resolved["fraction"] = tt::sig15(sim_fraction);
      if (sim_stop == "level") resolved["level"] = sim_level;
      std::ostringstream csv;
      csv << "# twochoices simulate\n# spec: " << resolved.dump() << "\n";
      csv << "replicate,seed,hit_time,censored,events,final_ones\n";
      for (std::size_t r = 0; r < batch.runs.size(); ++r) {
        const auto& rec = batch.runs[r];
        csv << r << ',' << rec.seed << ',' << (rec.hit_time ? tt::num(*rec.hit_time) : "")
            << ',' << (rec.censored ? 1 : 0) << ',' << rec.events << ',' << rec.final_ones
            << '\n';
      }
      const auto& s = batch.summary;
      json summary = {{"spec", resolved},
                      {"replicates", s.replicates},
                      {"hits", s.hits},
                      {"censored", s.censored_count},
                      {"mean", tt::sig15(s.mean)},
                      {"stderr", tt::sig15(s.std_error)},
                      {"censored_lower_mean", tt::sig15(s.censored_lower_mean)}};
      emit(sim_out, csv.str(), summary);
    } else if (*dr) {
      const auto steps = static_cast<std::size_t>(std::llround(1.0 / dr_step));
      std::ostringstream csv;
      csv << "# twochoices drift n=" << dr_n << " alpha=" << tt::num(dr_alpha) << "\n";
      csv << "y,f\n";
      for (std::size_t i = 0; i <= steps; ++i) {
        const double y = double(i) / double(steps);
        csv << tt::num(y) << ',' << tt::num(tc::f_complete(y, dr_n, dr_alpha)) << '\n';
      }
      emit(dr_out, csv.str(), nullptr);
    } else if (*sp) {
      const tc::Graph g = tt::build_graph(sp_graph.spec());
      json j = spectral_json(tc::spectral_summary(g));
      j["graph"] = sp_graph.spec().to_json();
      j["n"] = g.size();
      emit_json(sp_out, j);
    } else if (*th) {
      tc::SpectralSummary s;
      json source;
      if (th_lambda) {
        s = tc::summary_from_lambda(*th_lambda, std::uint32_t(th_graph.d), std::uint32_t(th_graph.d));
        source = {{"lambda", tt::sig15(*th_lambda)}, {"d", th_graph.d}};
      } else {
        s = tc::spectral_summary(tt::build_graph(th_graph.spec()));
        source = th_graph.spec().to_json();
      }
      json rows = json::array();
      std::optional<double> threshold;
      for (double a : th_alpha) {
        const auto t = tc::thresholds_general(s, a);
        threshold = t.alpha_meta_threshold;
        rows.push_back({{"alpha", tt::sig15(a)},
                        {"regime", std::string(tc::to_string(t.regime))},
                        {"c_alpha_L", tt::sig15(t.c_alpha_L)},
                        {"epsilon_L", opt(t.epsilon_L)},
                        {"r_lower", opt(t.r_lower)},
                        {"r_smaller", opt(t.r_smaller)}});
      }
      emit_json(th_out, {{"source", source},
                         {"spectral", spectral_json(s)},
                         {"alpha_meta_threshold", opt(threshold)},
                         {"threshold_undefined", s.K_L >= 1.0},
                         {"alphas", rows}});
    } else if (*ex) {
      std::ifstream in(ex_spec);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw tc::Error(tc::ErrorCode::kParse, std::string("spec file: ") + e.what());
      }
      auto spec = tt::experiment_from_json(j);
      if (!ex_out.empty()) spec.output = ex_out;
      const auto result = tt::run_experiment(spec);
      tt::write_result(result, spec.output);
      std::cerr << "wrote " << spec.output << ".csv and " << spec.output << ".json\n";
    }
  } catch (const tc::Error& e) {
    std::cerr << "error [" << tc::to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
