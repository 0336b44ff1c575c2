#pragma once

#include <map>
#include <string>
#include <vector>

#include "trust_atlas/preference_graph.hpp"

namespace trust_atlas::geometry {

using Vector = std::vector<double>;
using FeatureMap = std::map<std::string, Vector>;

inline constexpr double kDegeneracyTol = 1e-9;
inline constexpr double kTieTol = 1e-9;
inline constexpr double kDefaultBox = 10.0;

/// { x : a.x <= b }, produced by one answered pair.
struct Halfspace {
    Vector a;
    double b = 0.0;
    graph::Edge source_pair;

    double eval(const Vector& x) const;  // a.x - b
    bool operator==(const Halfspace&) const = default;
};

struct PreferencePolytope {
    std::size_t dim = 0;
    std::vector<Halfspace> halfspaces;
    double box_bound = kDefaultBox;  // implicit -M <= x_j <= M

    bool contains(const Vector& x, double tol = 1e-9) const;
};

enum class ChebyshevStatus { Bounded, BoxBounded, Empty };
const char* to_string(ChebyshevStatus s);

struct ChebyshevResult {
    ChebyshevStatus status = ChebyshevStatus::Empty;
    Vector center;  // empty when Empty
    double radius = 0.0;
    bool box_active = false;

    bool empty() const { return status == ChebyshevStatus::Empty; }
};

enum class Prediction { PrefersFirst, PrefersSecond, Tie };

double euclidean_norm(const Vector& v);

/// Distance from the individual's optimum; smaller means more trusted.
double trust_value(const Vector& x, const Vector& optimum);

Prediction predict_preference(const Vector& optimum, const Vector& x1, const Vector& x2,
                              double tie_tol = kTieTol);

/// Perpendicular bisector of the pair, keeping the preferred side:
/// a = x2 - x1, b = a.(x1 + x2)/2, then both scaled so |a| = 1.
Halfspace halfspace_from_pair(const Vector& preferred, const Vector& other, graph::Edge source = {});

PreferencePolytope build_polytope(const std::vector<graph::Edge>& edges, const FeatureMap& features,
                                  double box_bound = kDefaultBox);

/// Returns a copy of `p` with `h` appended.
PreferencePolytope add_preference(const PreferencePolytope& p, Halfspace h);

/// Center and radius of the largest ball inside the polytope and the box.
ChebyshevResult chebyshev_center(const PreferencePolytope& p);

}  // namespace trust_atlas::geometry
