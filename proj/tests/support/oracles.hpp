#pragma once

// Reference computations used only by the tests. They share no code with the
// library so they can check it independently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

// Small deterministic generator so the fixtures do not depend on the library RNG.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : s_(seed * 2862933555777941757ULL + 3037000493ULL) {}
    double uniform() {
        s_ = s_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s_ >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int below(int n) { return static_cast<int>(uniform() * n); }

private:
    std::uint64_t s_;
};

// a.x <= b rows (>= rows are negated by the caller).
struct Ineq {
    std::vector<double> a;
    double b;
};

// Solves the n x n system; returns nullopt when (near-)singular.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m, std::vector<double> r) {
    const std::size_t n = r.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
        if (std::abs(m[piv][c]) < 1e-10) return std::nullopt;
        std::swap(m[piv], m[c]);
        std::swap(r[piv], r[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = m[i][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
            r[i] -= f * r[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = r[i] / m[i][i];
    return x;
}

// Best objective over all feasible vertices of { x : rows }, minimizing c.x.
// The region must be bounded; nullopt means no feasible vertex (infeasible).
inline std::optional<double> vertex_enumeration_min(const std::vector<Ineq>& rows, const std::vector<double>& c) {
    const std::size_t n = c.size();
    const std::size_t m = rows.size();
    std::optional<double> best;
    std::vector<std::size_t> pick(n);
    // Enumerate n-subsets of rows.
    std::vector<bool> mask(m, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(std::min(n, m)), true);
    if (n > m) return std::nullopt;
    do {
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (std::size_t i = 0; i < m; ++i)
            if (mask[i]) {
                A.push_back(rows[i].a);
                b.push_back(rows[i].b);
            }
        auto x = solve_square(A, b);
        if (!x) continue;
        bool feasible = true;
        for (const auto& r : rows) {
            double lhs = 0.0;
            double nrm = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                lhs += r.a[j] * (*x)[j];
                nrm += r.a[j] * r.a[j];
            }
            if (lhs - r.b > 1e-9 * std::max(1.0, std::sqrt(nrm))) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += c[j] * (*x)[j];
        if (!best || obj < *best) best = obj;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

// Standard normal CDF from the Maclaurin series of erf; accurate to ~1e-14
// for |x| <= 4.
inline double phi_series(double x) {
    const double z = x / std::sqrt(2.0);
    double term = z;
    double sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= -z * z / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-18) break;
    }
    return 0.5 + sum / std::sqrt(M_PI);
}

inline double quantile_bisection(double p) {
    double lo = -8.0;
    double hi = 8.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi_series(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
