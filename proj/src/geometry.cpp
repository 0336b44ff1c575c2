#include "trust_atlas/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "trust_atlas/error.hpp"
#include "trust_atlas/lp.hpp"

namespace trust_atlas::geometry {

namespace {

void require_same(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimensions " + std::to_string(a.size()) +
                                                      " and " + std::to_string(b.size()));
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

const char* to_string(ChebyshevStatus s) {
    switch (s) {
        case ChebyshevStatus::Bounded: return "Bounded";
        case ChebyshevStatus::BoxBounded: return "BoxBounded";
        case ChebyshevStatus::Empty: return "Empty";
    }
    return "?";
}

double Halfspace::eval(const Vector& x) const { return dot(a, x) - b; }

bool PreferencePolytope::contains(const Vector& x, double tol) const {
    if (x.size() != dim) return false;
    for (double v : x)
        if (std::abs(v) > box_bound + tol) return false;
    for (const auto& h : halfspaces)
        if (h.eval(x) > tol * std::max(1.0, euclidean_norm(h.a))) return false;
    return true;
}

double euclidean_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double trust_value(const Vector& x, const Vector& optimum) {
    require_same(x, optimum, "trust_value");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - optimum[i]) * (x[i] - optimum[i]);
    return std::sqrt(s);
}

Prediction predict_preference(const Vector& optimum, const Vector& x1, const Vector& x2, double tie_tol) {
    require_same(optimum, x1, "predict_preference");
    require_same(optimum, x2, "predict_preference");
    const double f1 = trust_value(x1, optimum);
    const double f2 = trust_value(x2, optimum);
    if (std::abs(f1 - f2) <= tie_tol) return Prediction::Tie;
    return f1 < f2 ? Prediction::PrefersFirst : Prediction::PrefersSecond;
}

Halfspace halfspace_from_pair(const Vector& preferred, const Vector& other, graph::Edge source) {
    require_same(preferred, other, "halfspace_from_pair");
    Halfspace h;
    h.source_pair = std::move(source);
    h.a.resize(preferred.size());
    Vector mid(preferred.size());
    for (std::size_t i = 0; i < preferred.size(); ++i) {
        h.a[i] = other[i] - preferred[i];
        mid[i] = (preferred[i] + other[i]) / 2.0;
    }
    const double n = euclidean_norm(h.a);
    if (!(n > kDegeneracyTol))
        throw Error(ErrorCode::DegeneratePair, "feature vectors of '" + h.source_pair.first + "' and '" +
                                                   h.source_pair.second + "' coincide");
    h.b = dot(h.a, mid);
    for (double& v : h.a) v /= n;
    h.b /= n;
    return h;
}

PreferencePolytope build_polytope(const std::vector<graph::Edge>& edges, const FeatureMap& features,
                                  double box_bound) {
    PreferencePolytope p;
    p.box_bound = box_bound;
    p.dim = features.empty() ? 0 : features.begin()->second.size();
    for (const auto& e : edges) {
        auto a = features.find(e.first);
        auto b = features.find(e.second);
        if (a == features.end() || b == features.end())
            throw Error(ErrorCode::MissingFeature,
                        "no feature vector for '" + (a == features.end() ? e.first : e.second) + "'");
        p.halfspaces.push_back(halfspace_from_pair(a->second, b->second, e));
        if (p.halfspaces.back().a.size() != p.dim)
            throw Error(ErrorCode::DimensionMismatch, "feature vectors differ in length");
    }
    return p;
}

PreferencePolytope add_preference(const PreferencePolytope& p, Halfspace h) {
    if (h.a.size() != p.dim)
        throw Error(ErrorCode::DimensionMismatch, "halfspace dimension " + std::to_string(h.a.size()) +
                                                      " does not match polytope dimension " + std::to_string(p.dim));
    if (!(euclidean_norm(h.a) > kDegeneracyTol))
        throw Error(ErrorCode::DegeneratePair, "halfspace normal vanishes");
    PreferencePolytope out = p;
    out.halfspaces.push_back(std::move(h));
    return out;
}

ChebyshevResult chebyshev_center(const PreferencePolytope& p) {
    const std::size_t q = p.dim;
    if (q == 0) throw Error(ErrorCode::DimensionMismatch, "polytope has dimension 0");
    const double M = p.box_bound;

    // Variables: x_0..x_{q-1}, r.
    lp::LinearProgram program(q + 1, lp::Sense::Maximize);
    program.objective[q] = 1.0;
    program.set_lower(q, 0.0);
    for (const auto& h : p.halfspaces) {
        if (h.a.size() != q) throw Error(ErrorCode::DimensionMismatch, "halfspace dimension mismatch");
        Vector row(h.a);
        row.push_back(euclidean_norm(h.a));
        program.add(std::move(row), lp::Relation::LessEqual, h.b);
    }
    for (std::size_t j = 0; j < q; ++j) {
        for (double s : {1.0, -1.0}) {
            Vector row(q + 1, 0.0);
            row[j] = s;
            row[q] = 1.0;
            program.add(std::move(row), lp::Relation::LessEqual, M);
        }
    }

    const lp::Solution sol = lp::solve(program);
    ChebyshevResult out;
    if (!sol.optimal()) return out;
    out.center.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(q));
    out.radius = std::max(0.0, sol.x[q]);
    for (double c : out.center)
        if (M - std::abs(c) - out.radius <= lp::kFeasTol) out.box_active = true;
    out.status = out.box_active ? ChebyshevStatus::BoxBounded : ChebyshevStatus::Bounded;
    return out;
}

}  // namespace trust_atlas::geometry
