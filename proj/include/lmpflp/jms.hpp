#pragma once

#include "lmpflp/instance.hpp"

#include <string>
#include <vector>

namespace lmpflp {

struct JmsEvent {
  enum class Kind { Open, Connect };
  Kind kind;
  double time;
  int facility;
  int client = -1;                 // Connect only (client index)
  std::vector<int> contributors;   // Open only: clients with a strictly positive offer
};

struct DualTrace {
  std::vector<double> alpha;  // time each client first connected
  std::vector<JmsEvent> events;
  // Per client: (time, distance to current facility), one entry per (re)assignment.
  std::vector<std::vector<std::pair<double, double>>> witness_r;
};

struct JmsResult {
  Solution solution;
  DualTrace trace;
};

JmsResult jms_run(const Instance& inst);

struct ExtendJmsResult {
  Solution solution;         // original opening costs
  double zero_view_facility_cost = 0.0;  // free facilities counted at cost 0
  DualTrace trace;

  double zero_view_cost() const { return zero_view_facility_cost + solution.connection_cost; }
};

// JMS after zeroing the opening costs of free_set.
ExtendJmsResult extend_jms(const Instance& inst, const std::vector<int>& free_set);

struct LmpReport {
  bool passed = true;
  double worst_ratio = 0.0;     // max over S* with d(S*) > 0 of (cost(sol) - open(S*)) / d(S*)
  std::vector<int> witness;     // the maximizing S*
  double min_margin = 0.0;      // min over S* of open(S*) + ratio*d(S*) - cost(sol)
};

// Checks open(sol) + d(sol) <= open(S*) + ratio * d(S*) for every nonempty S*.
LmpReport verify_lmp(const Instance& inst, const Solution& sol, double ratio);

// "t=<time> open f=<id>" / "t=<time> connect c=<id> f=<id>", clients by file id.
std::string write_trace(const Instance& inst, const DualTrace& trace);

}  // namespace lmpflp
