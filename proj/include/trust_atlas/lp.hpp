#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace trust_atlas::lp {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

struct Constraint {
    std::vector<double> coeffs;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

struct Bounds {
    std::optional<double> lower;
    std::optional<double> upper;
};

// Dense LP instance. Variables are free unless bounded through `bounds`.
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    Sense sense = Sense::Minimize;
    std::vector<Constraint> constraints;
    std::vector<Bounds> bounds;  // empty, or one entry per variable

    explicit LinearProgram(std::size_t n = 0, Sense s = Sense::Minimize)
        : num_vars(n), objective(n, 0.0), sense(s), bounds(n) {}

    void add(std::vector<double> coeffs, Relation rel, double rhs) {
        constraints.push_back({std::move(coeffs), rel, rhs});
    }
    void set_lower(std::size_t j, double v);
    void set_upper(std::size_t j, double v);
};

struct Solution {
    Status status = Status::Infeasible;
    std::vector<double> x;  // populated only when Optimal
    double objective_value = 0.0;
    std::size_t pivots = 0;

    bool optimal() const noexcept { return status == Status::Optimal; }
};

inline constexpr double kFeasTol = 1e-8;
inline constexpr double kPivotTol = 1e-10;

/// Two-phase primal simplex with Bland's rule on a dense tableau.
/// Rows are scaled to unit Euclidean norm before solving. Throws
/// Error{MalformedProgram} on dimension mismatch or non-finite data.
Solution solve(const LinearProgram& program);

/// Largest violation of any constraint or bound at `x`, measured after
/// each row is scaled to unit norm.
double max_violation(const LinearProgram& program, const std::vector<double>& x);

const char* to_string(Status status);

}  // namespace trust_atlas::lp
