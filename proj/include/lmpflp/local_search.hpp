#pragma once

#include "lmpflp/instance.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lmpflp {

enum class ThresholdMode { Strict, Relative };
enum class MoveFamily { Swap, JmsExtended };

struct SearchConfig {
  int delta = 2;          // swap width: |A|, |B| <= delta
  double eps = 0.5;       // relative threshold parameter
  double width_eps = 0.5; // LocalSearch-JMS changes up to floor(1/width_eps) + 1 facilities
  ThresholdMode threshold_mode = ThresholdMode::Strict;
  long move_budget = 100000;
  std::uint64_t seed = 0;  // 0 keeps facility-id scan order, otherwise the order is shuffled once
  // Objective alpha * open + beta * d.
  double alpha = 1.0;
  double beta = 1.0;

  int width() const;
  void validate() const;
};

struct Move {
  enum class Kind { Swap, Extend };
  Kind kind = Kind::Swap;
  std::vector<int> removed;
  std::vector<int> added;
  double cost = 0.0;  // objective after the move
};

struct SearchResult {
  Solution solution;
  std::vector<Move> log;
  bool budget_exhausted = false;
};

// Objective of sol under the config's weights.
double weighted_cost(const Solution& sol, const SearchConfig& cfg);

// First-improvement search over swap pairs (A, B) with |A|, |B| <= delta.
SearchResult swap_local_search(const Instance& inst, const Solution& init, const SearchConfig& cfg);

// Search over small symmetric differences and Extend-JMS moves: for f in S and
// f' outside S (or no f'), the JMS output with S - {f} + {f'} made free.
// Moves are judged on the true cost open + d; alpha and beta are ignored.
SearchResult localsearch_jms(const Instance& inst, const Solution& init, const SearchConfig& cfg);

struct LocalOptReport {
  bool local_opt = true;
  std::optional<Move> witness;  // first improving move in scan order
};

// The JMS-extended family is judged on open + d, as in localsearch_jms.
LocalOptReport is_local_opt(const Instance& inst, const Solution& sol, const SearchConfig& cfg, MoveFamily family);

// One line per move: "step=<i> kind=swap|extend removed=[ids] added=[ids] cost=<v>".
std::string format_move_log(const std::vector<Move>& log);

// A connected piece of the instance with its original facility and client ids.
struct SubInstance {
  Instance instance;
  std::vector<int> facilities;
  std::vector<int> clients;
};

struct Components {
  std::vector<SubInstance> parts;      // components with at least one client and one facility
  std::vector<int> stranded_clients;   // clients whose component has no facility
};

// Splits the points into components of the graph joining points at distance
// <= eta, and merges points closer than eps * eta / n'^2 within a component of
// n' points onto the lowest-id point of their group.
Components preprocess_components(const Instance& inst, double eta, double eps);

// Powers of (1 + eps) from the smallest positive distance up to n times the largest.
std::vector<double> eta_estimates(const Instance& inst, double eps);

// For every eta estimate: JMS then swap local search on each component; the
// best recombined solution over all estimates (evaluated on the full instance).
SearchResult preprocessed_local_search(const Instance& inst, const SearchConfig& cfg);

}  // namespace lmpflp
