#include "trust_atlas/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trust_atlas/error.hpp"

namespace trust_atlas::lp {

void LinearProgram::set_lower(std::size_t j, double v) {
    if (bounds.size() != num_vars) bounds.resize(num_vars);
    bounds.at(j).lower = v;
}

void LinearProgram::set_upper(std::size_t j, double v) {
    if (bounds.size() != num_vars) bounds.resize(num_vars);
    bounds.at(j).upper = v;
}

const char* to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "Optimal";
        case Status::Infeasible: return "Infeasible";
        case Status::Unbounded: return "Unbounded";
    }
    return "?";
}

namespace {

constexpr double kCostTol = 1e-10;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::MalformedProgram, what);
}

bool finite_bound(const std::optional<double>& b) {
    return b.has_value() && std::isfinite(*b);
}

void validate(const LinearProgram& p) {
    if (p.num_vars == 0) malformed("num_vars must be positive");
    if (p.objective.size() != p.num_vars) malformed("objective length differs from num_vars");
    if (!p.bounds.empty() && p.bounds.size() != p.num_vars)
        malformed("bounds length differs from num_vars");
    for (double c : p.objective)
        if (!std::isfinite(c)) malformed("non-finite objective coefficient");
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const auto& row = p.constraints[i];
        if (row.coeffs.size() != p.num_vars)
            malformed("constraint " + std::to_string(i) + " has wrong length");
        if (!std::isfinite(row.rhs)) malformed("constraint " + std::to_string(i) + " has non-finite rhs");
        for (double a : row.coeffs)
            if (!std::isfinite(a)) malformed("constraint " + std::to_string(i) + " has non-finite coefficient");
    }
    for (const auto& b : p.bounds) {
        if ((b.lower && std::isnan(*b.lower)) || (b.upper && std::isnan(*b.upper)))
            malformed("NaN variable bound");
    }
}

// x_j = offset + sign * y[pos] - y[neg]   (neg only for free variables)
struct VarMap {
    std::size_t pos = 0;
    std::size_t neg = kNone;
    double sign = 1.0;
    double offset = 0.0;
};

struct Row {
    std::vector<double> coeffs;  // over structural columns
    Relation relation;
    double rhs;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, kNone) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double& cost(std::size_t j) { return at(rows_, j); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t width = cols_ + 1;
        double* pr = &data_[r * width];
        const double inv = 1.0 / pr[c];
        for (std::size_t j = 0; j < width; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            double* pi = &data_[i * width];
            const double f = pi[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
        basis_[r] = c;
        ++pivots_;
    }

    void erase_row(std::size_t r) {
        const std::size_t width = cols_ + 1;
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * width),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

    // Minimizes the objective row over columns [0, allowed). Returns false on
    // an unbounded ray.
    bool run(std::size_t allowed) {
        for (;;) {
            std::size_t enter = kNone;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (cost(j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == kNone) return true;

            std::size_t leave = kNone;
            double best = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(0.0, rhs(i)) / a;
                const double eps = 1e-12 * std::max(1.0, best);
                if (leave == kNone || ratio < best - eps) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + eps && basis_[i] < basis_[leave]) {
                    leave = i;  // Bland tie-break on the leaving index
                }
            }
            if (leave == kNone) return false;
            pivot(leave, enter);
        }
    }

    std::size_t pivots() const { return pivots_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
    std::size_t pivots_ = 0;
};

}  // namespace

Solution solve(const LinearProgram& program) {
    validate(program);
    const std::size_t n = program.num_vars;

    // Map every original variable onto nonnegative structural columns.
    std::vector<VarMap> vars(n);
    std::vector<Row> rows;
    std::size_t n_struct = 0;
    std::vector<std::pair<std::size_t, double>> range_rows;  // (column, hi - lo)
    for (std::size_t j = 0; j < n; ++j) {
        const Bounds b = program.bounds.empty() ? Bounds{} : program.bounds[j];
        const bool has_lo = finite_bound(b.lower);
        const bool has_hi = finite_bound(b.upper);
        VarMap& m = vars[j];
        m.pos = n_struct++;
        if (has_lo) {
            m.offset = *b.lower;
            if (has_hi) range_rows.emplace_back(m.pos, *b.upper - *b.lower);
        } else if (has_hi) {
            m.offset = *b.upper;
            m.sign = -1.0;
        } else {
            m.neg = n_struct++;
        }
    }

    auto expand = [&](const std::vector<double>& coeffs, double& shift) {
        std::vector<double> out(n_struct, 0.0);
        shift = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = coeffs[j];
            if (a == 0.0) continue;
            out[vars[j].pos] += a * vars[j].sign;
            if (vars[j].neg != kNone) out[vars[j].neg] -= a;
            shift += a * vars[j].offset;
        }
        return out;
    };

    for (const auto& c : program.constraints) {
        double norm = 0.0;
        for (double a : c.coeffs) norm += a * a;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            const bool ok = (c.relation == Relation::LessEqual && c.rhs >= -kFeasTol) ||
                            (c.relation == Relation::GreaterEqual && c.rhs <= kFeasTol) ||
                            (c.relation == Relation::Equal && std::abs(c.rhs) <= kFeasTol);
            if (!ok) return Solution{Status::Infeasible, {}, 0.0, 0};
            continue;
        }
        double shift = 0.0;
        Row r{expand(c.coeffs, shift), c.relation, c.rhs};
        r.rhs -= shift;
        for (double& a : r.coeffs) a /= norm;
        r.rhs /= norm;
        rows.push_back(std::move(r));
    }
    for (const auto& [col, width] : range_rows) {
        Row r{std::vector<double>(n_struct, 0.0), Relation::LessEqual, width};
        r.coeffs[col] = 1.0;
        rows.push_back(std::move(r));
    }

    // Standard form: nonnegative rhs, slack/surplus per inequality,
    // artificial wherever no slack can start in the basis.
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (auto& r : rows) {
        if (r.rhs < 0.0) {
            for (double& a : r.coeffs) a = -a;
            r.rhs = -r.rhs;
            if (r.relation == Relation::LessEqual) r.relation = Relation::GreaterEqual;
            else if (r.relation == Relation::GreaterEqual) r.relation = Relation::LessEqual;
        }
        if (r.relation != Relation::Equal) ++n_slack;
        if (r.relation != Relation::LessEqual) ++n_art;
    }

    const std::size_t m = rows.size();
    const std::size_t art_begin = n_struct + n_slack;
    Tableau t(m, art_begin + n_art);
    {
        std::size_t slack = n_struct;
        std::size_t art = art_begin;
        for (std::size_t i = 0; i < m; ++i) {
            const Row& r = rows[i];
            for (std::size_t j = 0; j < n_struct; ++j) t.at(i, j) = r.coeffs[j];
            t.rhs(i) = r.rhs;
            if (r.relation == Relation::LessEqual) {
                t.at(i, slack) = 1.0;
                t.basis()[i] = slack++;
            } else {
                if (r.relation == Relation::GreaterEqual) t.at(i, slack++) = -1.0;
                t.at(i, art) = 1.0;
                t.basis()[i] = art++;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    if (n_art > 0) {
        for (std::size_t i = 0; i < m; ++i) {
            if (t.basis()[i] < art_begin) continue;
            for (std::size_t j = 0; j < art_begin; ++j) t.cost(j) -= t.at(i, j);
            t.rhs(m) -= t.rhs(i);
        }
        t.run(art_begin);
        double scale = 1.0;
        for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
        const double infeasibility = -t.rhs(t.rows());
        if (infeasibility > 1e-9 * scale) return Solution{Status::Infeasible, {}, 0.0, t.pivots()};

        // Drive zero-level artificials out of the basis; drop redundant rows.
        for (std::size_t i = 0; i < t.rows();) {
            if (t.basis()[i] < art_begin) {
                ++i;
                continue;
            }
            std::size_t col = kNone;
            double best = 1e-9;
            for (std::size_t j = 0; j < art_begin; ++j) {
                if (std::abs(t.at(i, j)) > best) {
                    best = std::abs(t.at(i, j));
                    col = j;
                }
            }
            if (col == kNone) {
                t.erase_row(i);
            } else {
                t.pivot(i, col);
                ++i;
            }
        }
    }

    // Phase 2 objective in structural columns (always minimize).
    const double dir = program.sense == Sense::Maximize ? -1.0 : 1.0;
    std::vector<double> cost(t.cols(), 0.0);
    double cost_shift = 0.0;
    {
        std::vector<double> c(n);
        for (std::size_t j = 0; j < n; ++j) c[j] = dir * program.objective[j];
        auto expanded = expand(c, cost_shift);
        std::copy(expanded.begin(), expanded.end(), cost.begin());
    }
    const std::size_t mr = t.rows();
    for (std::size_t j = 0; j <= t.cols(); ++j) t.at(mr, j) = j < t.cols() ? cost[j] : 0.0;
    for (std::size_t i = 0; i < mr; ++i) {
        const double cb = cost[t.basis()[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= t.cols(); ++j) t.at(mr, j) -= cb * t.at(i, j);
    }
    if (!t.run(art_begin)) return Solution{Status::Unbounded, {}, 0.0, t.pivots()};

    std::vector<double> y(t.cols(), 0.0);
    for (std::size_t i = 0; i < mr; ++i) y[t.basis()[i]] = std::max(0.0, t.rhs(i));

    Solution sol;
    sol.status = Status::Optimal;
    sol.pivots = t.pivots();
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const VarMap& v = vars[j];
        double xj = v.offset + v.sign * y[v.pos];
        if (v.neg != kNone) xj -= y[v.neg];
        sol.x[j] = xj;
    }
    for (std::size_t j = 0; j < n; ++j) sol.objective_value += program.objective[j] * sol.x[j];
    return sol;
}

double max_violation(const LinearProgram& program, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& c : program.constraints) {
        double norm = 0.0;
        double lhs = 0.0;
        for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
            norm += c.coeffs[j] * c.coeffs[j];
            lhs += c.coeffs[j] * x[j];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) norm = 1.0;
        const double diff = (lhs - c.rhs) / norm;
        switch (c.relation) {
            case Relation::LessEqual: worst = std::max(worst, diff); break;
            case Relation::GreaterEqual: worst = std::max(worst, -diff); break;
            case Relation::Equal: worst = std::max(worst, std::abs(diff)); break;
        }
    }
    for (std::size_t j = 0; j < program.bounds.size(); ++j) {
        const auto& b = program.bounds[j];
        if (finite_bound(b.lower)) worst = std::max(worst, *b.lower - x[j]);
        if (finite_bound(b.upper)) worst = std::max(worst, x[j] - *b.upper);
    }
    return worst;
}

}  // namespace trust_atlas::lp
