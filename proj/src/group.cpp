#include "trust_atlas/group.hpp"

#include <algorithm>
#include <cmath>

#include "trust_atlas/error.hpp"
#include "trust_atlas/lp.hpp"

namespace trust_atlas::group {

const char* to_string(SolveStatus s) { return s == SolveStatus::Optimal ? "Optimal" : "Infeasible"; }

DistinctivenessResult solve_distinctiveness(const std::vector<Individual>& individuals, double box_bound) {
    if (individuals.empty()) throw Error(ErrorCode::NoData, "distinctiveness needs at least one individual");
    std::set<std::string> labels;
    for (const auto& ind : individuals)
        if (!labels.insert(ind.participant).second)
            throw Error(ErrorCode::DuplicateParticipant, "participant '" + ind.participant + "' listed twice");
    std::size_t q = 0;
    for (const auto& ind : individuals)
        for (const auto& h : ind.halfspaces) {
            if (q == 0) q = h.a.size();
            if (h.a.size() != q) throw Error(ErrorCode::DimensionMismatch, "halfspaces differ in dimension");
        }
    if (q == 0) {
        // No constraints at all: everyone sits on the reference.
        DistinctivenessResult r;
        r.status = SolveStatus::Optimal;
        for (const auto& ind : individuals) {
            r.perturbations[ind.participant] = {};
            r.norms_l1[ind.participant] = 0.0;
            r.norms_l2[ind.participant] = 0.0;
        }
        return r;
    }

    // Layout: x (q) | for each k: z^k (q), t^k (q)
    const std::size_t n_ind = individuals.size();
    const std::size_t n_vars = q + n_ind * 2 * q;
    auto z_col = [&](std::size_t k, std::size_t j) { return q + k * 2 * q + j; };
    auto t_col = [&](std::size_t k, std::size_t j) { return q + k * 2 * q + q + j; };

    lp::LinearProgram program(n_vars, lp::Sense::Minimize);
    for (std::size_t j = 0; j < q; ++j) {
        program.set_lower(j, -box_bound);
        program.set_upper(j, box_bound);
    }
    for (std::size_t k = 0; k < n_ind; ++k) {
        for (std::size_t j = 0; j < q; ++j) {
            program.objective[t_col(k, j)] = 1.0;
            program.set_lower(t_col(k, j), 0.0);
            for (double s : {1.0, -1.0}) {
                std::vector<double> row(n_vars, 0.0);
                row[t_col(k, j)] = 1.0;
                row[z_col(k, j)] = -s;
                program.add(std::move(row), lp::Relation::GreaterEqual, 0.0);
            }
        }
        for (const auto& h : individuals[k].halfspaces) {
            std::vector<double> row(n_vars, 0.0);
            for (std::size_t j = 0; j < q; ++j) {
                row[j] = h.a[j];
                row[z_col(k, j)] = h.a[j];
            }
            program.add(std::move(row), lp::Relation::LessEqual, h.b);
        }
    }

    DistinctivenessResult r;
    const lp::Solution sol = lp::solve(program);
    if (!sol.optimal()) return r;
    r.status = SolveStatus::Optimal;
    r.reference.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(q));
    for (std::size_t k = 0; k < n_ind; ++k) {
        Vector z(q);
        double l1 = 0.0;
        double l2 = 0.0;
        for (std::size_t j = 0; j < q; ++j) {
            z[j] = sol.x[z_col(k, j)];
            l1 += std::abs(z[j]);
            l2 += z[j] * z[j];
        }
        const std::string& who = individuals[k].participant;
        r.perturbations[who] = std::move(z);
        r.norms_l1[who] = l1;
        r.norms_l2[who] = std::sqrt(l2);
        r.objective += l1;
    }
    return r;
}

Partition cluster_by_distinctiveness(const DistinctivenessResult& result, double threshold) {
    Partition p;
    for (const auto& [who, n] : result.norms_l1) (n <= threshold ? p.low : p.high).insert(who);
    return p;
}

std::pair<double, double> slab_multipliers(double probability, double delta) {
    auto clamp = [](double v) { return std::clamp(v, kProbabilityClamp, 1.0 - kProbabilityClamp); };
    const double lower = std::max(0.0, -inv_norm_cdf(clamp(probability - delta)));
    const double upper = inv_norm_cdf(clamp(probability + delta));
    return {lower, upper};
}

CohesionResult solve_cohesion(const std::vector<SlabInput>& edges, std::size_t dim, double box_bound) {
    if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "cohesion needs a positive dimension");
    // Variables: x (dim), alpha
    lp::LinearProgram program(dim + 1, lp::Sense::Minimize);
    program.objective[dim] = 1.0;
    program.set_lower(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        program.set_lower(j, -box_bound);
        program.set_upper(j, box_bound);
    }

    std::vector<std::pair<double, double>> mult;
    mult.reserve(edges.size());
    for (const auto& e : edges) {
        const auto& a = e.halfspace.a;
        if (a.size() != dim) throw Error(ErrorCode::DimensionMismatch, "slab dimension mismatch");
        const double an = geometry::euclidean_norm(a);
        const auto [lo, up] = slab_multipliers(e.probability, e.delta);
        mult.emplace_back(lo, up);

        std::vector<double> row(a);
        row.push_back(-an * lo);
        program.add(row, lp::Relation::LessEqual, e.halfspace.b);
        row.back() = an * up;
        program.add(std::move(row), lp::Relation::GreaterEqual, e.halfspace.b);
    }

    CohesionResult r;
    const lp::Solution sol = lp::solve(program);
    if (!sol.optimal()) return r;
    r.status = SolveStatus::Optimal;
    r.mean.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(dim));
    r.alpha = std::max(0.0, sol.x[dim]);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        const double an = geometry::euclidean_norm(e.halfspace.a);
        SlabRecord rec;
        rec.edge = e.halfspace.source_pair;
        rec.probability = e.probability;
        rec.delta = e.delta;
        rec.samples = e.samples;
        rec.lower = e.halfspace.b - r.alpha * an * mult[i].second;
        rec.upper = e.halfspace.b + r.alpha * an * mult[i].first;
        r.per_edge.push_back(rec);
    }
    return r;
}

CohesionResult solve_cohesion(const graph::PopulationGraph& g, const geometry::FeatureMap& features,
                              double z_score, double box_bound) {
    if (!(z_score >= 0.0) || !std::isfinite(z_score))
        throw Error(ErrorCode::InvalidSamples, "Z-score must be finite and nonnegative");
    std::vector<SlabInput> slabs;
    std::size_t dim = 0;
    for (const auto& e : g.edges) {
        auto a = features.find(e.first);
        auto b = features.find(e.second);
        if (a == features.end() || b == features.end())
            throw Error(ErrorCode::MissingFeature,
                        "no feature vector for '" + (a == features.end() ? e.first : e.second) + "'");
        SlabInput s;
        s.halfspace = geometry::halfspace_from_pair(a->second, b->second, e);
        s.probability = g.weights.at(e);
        s.samples = g.samples.at(e);
        s.delta = z_score > 0.0 ? confidence_delta(s.samples, z_score) : 0.0;
        dim = s.halfspace.a.size();
        slabs.push_back(std::move(s));
    }
    if (dim == 0) dim = features.empty() ? 0 : features.begin()->second.size();
    CohesionResult r = solve_cohesion(slabs, dim, box_bound);
    r.z_score = z_score;
    return r;
}

double coverage_fraction(const std::vector<Vector>& centers, const Vector& mean, double alpha, double s) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::ZeroAlpha, "coverage needs a positive covariance bound");
    if (centers.empty()) throw Error(ErrorCode::NoData, "coverage needs at least one center");
    std::size_t inside = 0;
    for (const auto& c : centers)
        if (geometry::trust_value(c, mean) / alpha < s) ++inside;
    return static_cast<double>(inside) / static_cast<double>(centers.size());
}

}  // namespace trust_atlas::group
