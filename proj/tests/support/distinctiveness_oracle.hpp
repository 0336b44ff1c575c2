#pragma once

// Brute-force minimizer of sum_k min_{z^k} |z^k|_1 s.t. a.(x + z^k) <= b over a
// reference x. For fixed x the inner problem is the L1 distance from x to the
// individual's polygon; that distance is attained at an intersection of two
// lines drawn from {constraint lines, box lines, axis lines through x}, so it
// is computed exactly by enumeration. The outer minimization over x is a
// coarse-to-fine grid search, valid because the objective is convex.

#include <cmath>
#include <limits>
#include <vector>

#include "support/oracles.hpp"

namespace oracle {

struct Individual {
    std::vector<Ineq> rows;  // a.y <= b, dimension 1 or 2
};

inline double l1_distance_to_region(const std::vector<double>& x, const std::vector<Ineq>& rows) {
    const std::size_t q = x.size();
    const double big = 100.0;
    auto feasible = [&](const std::vector<double>& y) {
        for (const auto& r : rows) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < q; ++j) lhs += r.a[j] * y[j];
            if (lhs > r.b + 1e-10) return false;
        }
        return true;
    };
    if (feasible(x)) return 0.0;

    std::vector<Ineq> lines = rows;
    for (std::size_t j = 0; j < q; ++j) {
        std::vector<double> e(q, 0.0);
        e[j] = 1.0;
        lines.push_back({e, big});
        lines.push_back({e, -big});
        lines.push_back({e, x[j]});
    }
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& y) {
        if (!feasible(y)) return;
        double d = 0.0;
        for (std::size_t j = 0; j < q; ++j) d += std::abs(y[j] - x[j]);
        best = std::min(best, d);
    };
    if (q == 1) {
        for (const auto& l : lines)
            if (std::abs(l.a[0]) > 1e-12) consider({l.b / l.a[0]});
    } else {
        for (std::size_t i = 0; i < lines.size(); ++i)
            for (std::size_t k = i + 1; k < lines.size(); ++k) {
                auto y = solve_square({lines[i].a, lines[k].a}, {lines[i].b, lines[k].b});
                if (y) consider(*y);
            }
    }
    return best;
}

inline double distinctiveness_objective(const std::vector<double>& x, const std::vector<Individual>& people) {
    double total = 0.0;
    for (const auto& p : people) total += l1_distance_to_region(x, p.rows);
    return total;
}

inline double distinctiveness_grid_min(const std::vector<Individual>& people, std::size_t q, double box) {
    std::vector<double> center(q, 0.0);
    double half = box;
    double best = std::numeric_limits<double>::infinity();
    const int n = q == 1 ? 400 : 40;
    for (int level = 0; level < 14; ++level) {
        std::vector<double> best_x = center;
        const double step = 2.0 * half / n;
        if (q == 1) {
            for (int i = 0; i <= n; ++i) {
                std::vector<double> x{std::clamp(center[0] - half + i * step, -box, box)};
                const double v = distinctiveness_objective(x, people);
                if (v < best) {
                    best = v;
                    best_x = x;
                }
            }
        } else {
            for (int i = 0; i <= n; ++i)
                for (int k = 0; k <= n; ++k) {
                    std::vector<double> x{std::clamp(center[0] - half + i * step, -box, box),
                                          std::clamp(center[1] - half + k * step, -box, box)};
                    const double v = distinctiveness_objective(x, people);
                    if (v < best) {
                        best = v;
                        best_x = x;
                    }
                }
        }
        center = best_x;
        half = 3.0 * step;
    }
    return best;
}

}  // namespace oracle
