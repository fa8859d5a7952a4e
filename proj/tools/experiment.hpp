#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twochoices/graph.hpp"

namespace twochoices::tools {

// Rounds to 15 significant digits so JSON output stays stable and short.
double sig15(double x);

// CSV cell for a double: %.15g.
std::string num(double x);

struct GraphSpec {
  std::string type = "complete";  // complete | er | dreg | file
  std::size_t n = 0;
  std::size_t d = 10;
  std::optional<double> mean_degree;  // er; default 2 ln n
  std::string file;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
};

GraphSpec graph_spec_from_json(const nlohmann::json& j);
Graph build_graph(const GraphSpec& spec);

enum class ExperimentKind { kFig1Mixing, kFig2Drift, kFig3ErHitting, kFig4DregHitting, kThresholds, kCustom };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kFig1Mixing;
  std::vector<std::size_t> n;
  std::vector<double> alpha;
  std::size_t graphs = 1;
  std::size_t replicates = 1;
  std::optional<std::uint64_t> seed;
  double epsilon = 0.25;
  double t_cap = 1e12;  // analytic time cap (mixing)
  double t_max = 1e6;   // simulation horizon
  std::size_t degree = 10;
  double y_step = 0.01;
  int k = 1;
  std::optional<GraphSpec> graph;  // thresholds / custom
  std::optional<double> lambda;    // thresholds with analytic lambda
  std::string output = "experiment";
  unsigned threads = 0;

  // Fills defaults, checks invariants, and returns the fully resolved form
  // written into every output.
  nlohmann::json resolved() const;
};

std::string to_string(ExperimentKind kind);
ExperimentSpec experiment_from_json(const nlohmann::json& j);

struct ExperimentResult {
  std::string csv;          // including '#' provenance header
  nlohmann::json summary;   // includes the resolved spec
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Writes <output>.csv and <output>.json.
void write_result(const ExperimentResult& result, const std::string& output);

// Provenance header lines for CSV outputs.
std::string provenance_header(const nlohmann::json& resolved_spec);

}  // namespace twochoices::tools
