#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "trust_atlas/geometry.hpp"
#include "trust_atlas/normal.hpp"
#include "trust_atlas/preference_graph.hpp"

namespace trust_atlas::group {

using geometry::Halfspace;
using geometry::Vector;

inline constexpr double kProbabilityClamp = 1e-6;
inline constexpr double kDefaultZ = 1.96;
/// Distinctiveness cut used to select the low-distinctiveness group in the
/// original user study.
inline constexpr double kDefaultThreshold = 0.035;

enum class SolveStatus { Optimal, Infeasible };
const char* to_string(SolveStatus s);

struct Individual {
    std::string participant;
    std::vector<Halfspace> halfspaces;
};

struct DistinctivenessResult {
    SolveStatus status = SolveStatus::Infeasible;
    Vector reference;
    std::map<std::string, Vector> perturbations;
    std::map<std::string, double> norms_l1;
    std::map<std::string, double> norms_l2;  // reported alongside, not optimized
    double objective = 0.0;
};

/// min sum_k |z^k|_1  s.t.  a.(x + z^k) <= b for every halfspace of every
/// individual, with |x_j| <= box_bound. Solved as an LP with t^k >= +-z^k.
DistinctivenessResult solve_distinctiveness(const std::vector<Individual>& individuals,
                                            double box_bound = geometry::kDefaultBox);

struct Partition {
    std::set<std::string> low;
    std::set<std::string> high;
};

/// low = { k : |z^k|_1 <= threshold }.
Partition cluster_by_distinctiveness(const DistinctivenessResult& result, double threshold = kDefaultThreshold);

/// One population edge as seen by the cohesion program.
struct SlabInput {
    Halfspace halfspace;
    double probability = 1.0;  // p_i, fraction of the population agreeing
    double delta = 0.0;        // half-width of the confidence band
    int samples = 0;
};

struct SlabRecord {
    graph::Edge edge;
    double probability = 0.0;
    double delta = 0.0;
    int samples = 0;
    double lower = 0.0;  // bounds on a.x at the optimum
    double upper = 0.0;
};

struct CohesionResult {
    SolveStatus status = SolveStatus::Infeasible;
    Vector mean;
    double alpha = 0.0;
    double z_score = 0.0;
    std::vector<SlabRecord> per_edge;
};

/// Slab multipliers for one edge: lower side max(0, -Phi^-1(p - delta)),
/// upper side Phi^-1(p + delta), probabilities clamped into [eps, 1 - eps].
std::pair<double, double> slab_multipliers(double probability, double delta);

/// min alpha  s.t.  a.x - alpha |a| L_i <= b_i  and  a.x + alpha |a| U_i >= b_i.
CohesionResult solve_cohesion(const std::vector<SlabInput>& edges, std::size_t dim,
                              double box_bound = geometry::kDefaultBox);

/// Builds one slab per population edge with p_i = w_i and
/// delta_i = confidence_delta(n_s, Z). Z = 0 disables the confidence band.
CohesionResult solve_cohesion(const graph::PopulationGraph& g, const geometry::FeatureMap& features,
                              double z_score = kDefaultZ, double box_bound = geometry::kDefaultBox);

/// Fraction of centers with |c - mean|_2 / alpha < s.
double coverage_fraction(const std::vector<Vector>& centers, const Vector& mean, double alpha, double s);

}  // namespace trust_atlas::group
