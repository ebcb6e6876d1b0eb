#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lmpflp {

// Metric facility location instance.
//
// Points are numbered as in the FLP file: facilities 0..m-1, then clients
// m..m+n-1. Library calls address clients by their 0-based client index c,
// whose file id is m + c.
class Instance {
 public:
  enum class MetricKind { Explicit, Euclidean };

  // Full (m+n)x(m+n) distance matrix over facilities followed by clients.
  // Near-symmetric input (within 1e-12 of scale) is averaged; the triangle
  // inequality is checked to 1e-9 of scale when validate_metric is set.
  static Instance from_matrix(Eigen::VectorXd opening_costs, int num_clients, const Eigen::MatrixXd& dist,
                              bool validate_metric = true);
  // One row of coordinates per point, facilities first.
  static Instance from_points(Eigen::VectorXd opening_costs, int num_clients, Eigen::MatrixXd coords);

  int num_facilities() const { return m_; }
  int num_clients() const { return n_; }
  int num_points() const { return m_ + n_; }

  double opening_cost(int f) const { return costs_[f]; }
  const Eigen::VectorXd& opening_costs() const { return costs_; }
  double dist(int client, int facility) const { return client_fac_(facility, client); }
  double point_dist(int p, int q) const { return points_(p, q); }
  double facility_dist(int f, int g) const { return points_(f, g); }
  double client_dist(int c, int e) const { return points_(m_ + c, m_ + e); }
  const Eigen::MatrixXd& point_matrix() const { return points_; }

  bool uniform_cost() const;
  // Largest distance in the instance; the unit for relative tolerances.
  double scale() const { return scale_; }
  double total_client_facility_distance() const { return client_fac_.sum(); }

  MetricKind metric_kind() const { return kind_; }
  const Eigen::MatrixXd& coordinates() const { return coords_; }

  // Same metric, different opening costs.
  Instance with_opening_costs(Eigen::VectorXd costs) const;

  // Facilities sorted by (distance, id) for the given client; cached.
  const std::vector<int>& facilities_by_distance(int client) const { return by_dist_[client]; }

  // Largest violation of d(p,r) <= d(p,q) + d(q,r) over all triples.
  double max_triangle_violation() const;

 private:
  Instance() = default;
  void finalize();

  int m_ = 0;
  int n_ = 0;
  MetricKind kind_ = MetricKind::Explicit;
  Eigen::VectorXd costs_;
  Eigen::MatrixXd points_;      // (m+n) x (m+n)
  Eigen::MatrixXd client_fac_;  // m x n, column c holds client c's distances
  Eigen::MatrixXd coords_;      // (m+n) x dim when Euclidean
  double scale_ = 0.0;
  std::vector<std::vector<int>> by_dist_;
};

// A set of open facilities with its canonical nearest-facility assignment.
struct Solution {
  std::vector<int> open;           // sorted, duplicate free
  std::vector<int> assignment;     // client index -> facility id
  std::vector<double> per_client;  // client index -> assigned distance
  double facility_cost = 0.0;
  double connection_cost = 0.0;

  double cost() const { return facility_cost + connection_cost; }
  int size() const { return static_cast<int>(open.size()); }
  bool is_open(int f) const;
  // Clients served by facility f (client indices, ascending).
  std::vector<int> clients_of(int f) const;
};

// Canonical evaluation: each client goes to a nearest open facility, ties to the lowest id.
Solution evaluate(const Instance& inst, std::vector<int> open_set);

struct ParseOptions {
  bool validate_metric = true;
};

Instance parse_instance(std::string_view text, const ParseOptions& opts = {});
Instance read_instance_file(const std::string& path, const ParseOptions& opts = {});
std::string serialize_instance(const Instance& inst);
void write_instance_file(const Instance& inst, const std::string& path);

// Solution files are "sol 1" followed by "open <k>" and k facility ids.
std::string serialize_solution(const Solution& sol);
std::vector<int> parse_solution(std::string_view text);

// Exhaustive UFL search over all nonempty S subset of F. When keep_table is set,
// facility_cost[mask] and connection_cost[mask] hold the split for every subset
// (bit f of mask = facility f); entry 0 is unused.
struct UflEnumeration {
  Solution best;
  std::vector<double> facility_cost;
  std::vector<double> connection_cost;
};

constexpr int kMaxBruteForceFacilities = 22;
constexpr double kMaxKMedianSubsets = 2e6;

UflEnumeration brute_force_ufl(const Instance& inst, bool keep_table = false);

// Exact k-median: minimizes d(S) over |S| = k.
Solution brute_force_kmedian(const Instance& inst, int k);

std::vector<int> mask_to_set(std::uint64_t mask);

struct CostLaw {
  enum class Kind { Uniform, Range } kind = Kind::Uniform;
  double lambda = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static CostLaw uniform(double lambda) { return {Kind::Uniform, lambda, 0.0, 0.0}; }
  static CostLaw range(double lo, double hi) { return {Kind::Range, 0.0, lo, hi}; }
};

Instance gen_euclidean(std::uint64_t seed, int m, int n, int dim, const CostLaw& law);

// A width-delta local optimum for alpha*open + beta*d whose value is beaten by a
// zero-connection-cost solution.
struct LsTrap {
  Instance instance;
  std::vector<int> trap;     // {f0}
  std::vector<int> optimum;  // {f1..fn}
  double x = 0.0;            // open(f0)
  double y = 0.0;            // open(fi), i >= 1
  int n = 0;
};

LsTrap gen_ls_counterexample(int delta, double alpha, double beta);

}  // namespace lmpflp
