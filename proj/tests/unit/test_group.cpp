#include <cmath>

#include "doctest.h"
#include "support/distinctiveness_oracle.hpp"
#include "support/oracles.hpp"
#include "trust_atlas/error.hpp"
#include "trust_atlas/group.hpp"

using namespace trust_atlas;
using namespace trust_atlas::group;
using geometry::Halfspace;

namespace {

Halfspace hs(Vector a, double b, graph::Edge e = {}) { return Halfspace{std::move(a), b, std::move(e)}; }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::NoData;
}

}  // namespace

TEST_CASE("inv_norm_cdf fixed points") {
    CHECK(inv_norm_cdf(0.5) == 0.0);
    CHECK(std::abs(inv_norm_cdf(0.975) - 1.9599640) <= 1e-6);
    CHECK(std::abs(inv_norm_cdf(0.841345) - 1.0) <= 1e-4);
    for (double p : {0.6, 0.9, 0.99}) CHECK(std::abs(inv_norm_cdf(p) + inv_norm_cdf(1.0 - p)) <= 1e-12);
    for (double p : {0.0, 1.0, -0.1, 1.5, std::nan("")}) CHECK(code_of([&] { inv_norm_cdf(p); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("inv_norm_cdf against bisection on the erf series") {
    double worst = 0.0;
    for (int i = 0; i <= 9980; ++i) {
        const double p = 0.001 + i * 1e-4;
        worst = std::max(worst, std::abs(inv_norm_cdf(p) - oracle::quantile_bisection(p)));
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("inv_norm_cdf inverts norm_cdf in the tails") {
    for (double p : {1e-9, 1e-6, 0.01, 0.02425, 0.97575, 0.99, 1 - 1e-6})
        CHECK(norm_cdf(inv_norm_cdf(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("confidence_delta") {
    CHECK(confidence_delta(1, 2.0) == 1.0);
    CHECK(std::abs(confidence_delta(43, 1.96) - 0.149449) <= 1e-6);
    CHECK(confidence_delta(40, 1.5) == doctest::Approx(2.0 * confidence_delta(160, 1.5)));
    CHECK(code_of([] { confidence_delta(0, 1.96); }) == ErrorCode::InvalidSamples);
    CHECK(code_of([] { confidence_delta(5, 0.0); }) == ErrorCode::InvalidSamples);
}

TEST_CASE("distinctiveness examples") {
    SUBCASE("shared feasible point") {
        auto r = solve_distinctiveness({{"a", {hs({1}, 1)}}, {"b", {hs({1}, 1)}}});
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(std::abs(r.objective) <= 1e-9);
        CHECK(r.norms_l1.at("a") <= 1e-9);
        CHECK(r.norms_l1.at("b") <= 1e-9);
    }
    SUBCASE("two opposed individuals in 1-D") {
        // A: x + z_A <= -1, B: -(x + z_B) <= -1
        auto r = solve_distinctiveness({{"A", {hs({1}, -1)}}, {"B", {hs({-1}, -1)}}});
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(std::abs(r.objective - 2.0) <= 1e-6);
        const double x = r.reference[0];
        CHECK(x + r.perturbations.at("A")[0] <= -1.0 + 1e-8);
        CHECK(-(x + r.perturbations.at("B")[0]) <= -1.0 + 1e-8);
    }
    SUBCASE("single individual sits inside its polytope") {
        std::vector<Halfspace> hsv{hs({1, 0}, 1), hs({-1, 0}, 0), hs({0, 1}, 2), hs({0, -1}, -1)};
        auto r = solve_distinctiveness({{"solo", hsv}});
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(std::abs(r.objective) <= 1e-9);
        for (const auto& h : hsv) CHECK(h.eval(r.reference) <= 1e-8);
    }
    SUBCASE("individual with an empty polytope is infeasible") {
        auto r = solve_distinctiveness({{"ok", {hs({1}, 1)}}, {"bad", {hs({1}, 0), hs({-1}, -1)}}});
        CHECK(r.status == SolveStatus::Infeasible);
    }
    SUBCASE("duplicate labels") {
        CHECK(code_of([] { solve_distinctiveness({{"a", {}}, {"a", {}}}); }) == ErrorCode::DuplicateParticipant);
    }
}

TEST_CASE("distinctiveness invariants on random instances") {
    oracle::Lcg rng(4242);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t q = 1 + static_cast<std::size_t>(rng.below(2));
        const int people = 1 + rng.below(3);
        std::vector<Individual> inds;
        std::vector<oracle::Individual> oracle_people;
        for (int k = 0; k < people; ++k) {
            Individual ind{"p" + std::to_string(k), {}};
            oracle::Individual op;
            Vector inside(q);
            for (auto& v : inside) v = rng.uniform(-2, 2);
            const int m = 1 + rng.below(3);
            for (int i = 0; i < m; ++i) {
                Vector a(q);
                for (auto& v : a) v = rng.uniform(-1, 1);
                double b = rng.uniform(0.0, 0.5);
                for (std::size_t j = 0; j < q; ++j) b += a[j] * inside[j];
                ind.halfspaces.push_back(hs(a, b));
                op.rows.push_back({a, b});
            }
            inds.push_back(ind);
            oracle_people.push_back(op);
        }
        auto r = solve_distinctiveness(inds);
        REQUIRE(r.status == SolveStatus::Optimal);
        double sum = 0.0;
        for (const auto& [who, n] : r.norms_l1) sum += n;
        CHECK(std::abs(sum - r.objective) <= 1e-9);
        for (const auto& ind : inds) {
            Vector y = r.reference;
            for (std::size_t j = 0; j < q; ++j) y[j] += r.perturbations.at(ind.participant)[j];
            for (const auto& h : ind.halfspaces) CHECK(h.eval(y) <= 1e-8);
        }
        const double expected = oracle::distinctiveness_grid_min(oracle_people, q, geometry::kDefaultBox);
        CHECK(std::abs(expected - r.objective) <= 1e-3);
    }
}

TEST_CASE("cluster_by_distinctiveness") {
    DistinctivenessResult r;
    r.status = SolveStatus::Optimal;
    r.norms_l1 = {{"a", 0.0}, {"b", 0.02}, {"c", 0.4}};
    auto p = cluster_by_distinctiveness(r, kDefaultThreshold);
    CHECK(p.low == std::set<std::string>{"a", "b"});
    CHECK(p.high == std::set<std::string>{"c"});
    CHECK(cluster_by_distinctiveness(r, -1.0).low.empty());
    CHECK(cluster_by_distinctiveness(r, INFINITY).low.size() == 3);
}

TEST_CASE("cohesion analytic cases") {
    SUBCASE("even split collapses the slab") {
        auto r = solve_cohesion({SlabInput{hs({1}, 1), 0.5, 0.0, 4}}, 1);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(std::abs(r.mean[0] - 1.0) <= 1e-8);
        CHECK(std::abs(r.alpha) <= 1e-8);
    }
    SUBCASE("two one-sigma edges") {
        auto r = solve_cohesion({SlabInput{hs({1}, 1), 0.841345, 0.0, 10}, SlabInput{hs({-1}, 0), 0.841345, 0.0, 10}}, 1);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(std::abs(r.mean[0] - 0.5) <= 1e-4);
        CHECK(std::abs(r.alpha - 0.5) <= 1e-4);
        REQUIRE(r.per_edge.size() == 2);
        for (const auto& s : r.per_edge) CHECK(s.lower <= s.upper);
    }
    SUBCASE("unanimous edges through a common point allow alpha = 0") {
        // Both bisectors pass through x = (1, 1).
        auto r = solve_cohesion({SlabInput{hs({1, 0}, 1), 1.0, 0.0, 5}, SlabInput{hs({0, 1}, 1), 1.0, 0.0, 5}}, 2);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(std::abs(r.alpha) <= 1e-8);
        CHECK(std::abs(r.mean[0] - 1.0) <= 1e-8);
    }
}

TEST_CASE("unanimous edges: alpha matches the clamped one-sided oracle") {
    // With p = 1 and delta = 0 the lower side is one-sided (a.x <= b) and the
    // upper multiplier is Phi^-1(1 - eps). So alpha* = min over x in the
    // polytope of max_i (b_i - a_i x) / U. In 1-D this is a scan over x.
    const double U = inv_norm_cdf(1.0 - kProbabilityClamp);
    oracle::Lcg rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SlabInput> edges;
        std::vector<std::pair<double, double>> rows;
        const int m = 1 + rng.below(4);
        for (int i = 0; i < m; ++i) {
            const double a = rng.uniform() < 0.5 ? 1.0 : -1.0;
            const double b = rng.uniform(0.0, 2.0);  // x = 0 is always inside
            edges.push_back(SlabInput{hs({a}, b), 1.0, 0.0, 3});
            rows.emplace_back(a, b);
        }
        auto r = solve_cohesion(edges, 1);
        REQUIRE(r.status == SolveStatus::Optimal);
        double best = INFINITY;
        for (int i = -200000; i <= 200000; ++i) {
            const double x = i * 1e-5;
            double worst = 0.0;
            bool inside = true;
            for (auto [a, b] : rows) {
                if (a * x > b + 1e-12) inside = false;
                worst = std::max(worst, (b - a * x) / U);
            }
            if (inside) best = std::min(best, worst);
        }
        CHECK(std::abs(r.alpha - best) <= 1e-5);
    }
}

TEST_CASE("cohesion: larger delta never raises alpha") {
    oracle::Lcg rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<SlabInput> base;
        for (int i = 0; i < 5; ++i) {
            Vector a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            base.push_back(SlabInput{hs(a, rng.uniform(0.0, 0.5)), rng.uniform(0.5, 1.0), 0.0, 20});  // origin feasible
        }
        double previous = INFINITY;
        for (double delta : {0.0, 0.05, 0.1, 0.2, 0.4}) {
            auto edges = base;
            for (auto& e : edges) e.delta = delta;
            auto r = solve_cohesion(edges, 2);
            REQUIRE(r.status == SolveStatus::Optimal);
            CHECK(r.alpha <= previous + 1e-9);
            previous = r.alpha;
        }
    }
}

TEST_CASE("cohesion from a population graph") {
    std::vector<graph::Preference> prefs(4, graph::Preference{std::nullopt, "A", "B", std::nullopt});
    auto g = graph::aggregate_population(prefs);
    geometry::FeatureMap f{{"A", {0.0}}, {"B", {2.0}}};
    auto r = solve_cohesion(g, f);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(std::abs(r.alpha) <= 1e-8);
    CHECK(r.mean[0] <= 1.0 + 1e-8);
    REQUIRE(r.per_edge.size() == 1);
    CHECK(r.per_edge[0].delta == doctest::Approx(1.96 / 4.0));
    CHECK(r.per_edge[0].samples == 4);

    CHECK(code_of([&] { solve_cohesion(g, {{"A", {0.0}}}); }) == ErrorCode::MissingFeature);
}

TEST_CASE("coverage_fraction") {
    CHECK(coverage_fraction({{0.0}, {0.5}}, {0.0}, 1.0, 1.0) == 1.0);
    CHECK(coverage_fraction({{0.0}, {2.0}}, {0.0}, 1.0, 1.0) == 0.5);
    CHECK(code_of([] { coverage_fraction({{0.0}}, {0.0}, 0.0, 1.0); }) == ErrorCode::ZeroAlpha);
    CHECK(code_of([] { coverage_fraction({}, {0.0}, 1.0, 1.0); }) == ErrorCode::NoData);
}

TEST_CASE("coverage arithmetic regression fixture") {
    // 37 centers, 20 within one alpha and all within two alpha: the 54.05% /
    // 100% split reported for the original survey cohort.
    std::vector<Vector> centers;
    for (int i = 0; i < 20; ++i) centers.push_back({0.3406 * (0.02 + 0.045 * i), 0.0});
    for (int i = 0; i < 17; ++i) centers.push_back({0.0, 0.3406 * (1.05 + 0.05 * i)});
    const Vector mu{0.0, 0.0};
    CHECK(std::abs(coverage_fraction(centers, mu, 0.3406, 1.0) - 0.5405) <= 5e-5);
    CHECK(coverage_fraction(centers, mu, 0.3406, 2.0) == 1.0);
    // Normal mass within one and two standard deviations.
    CHECK(std::abs(norm_cdf(1.0) - norm_cdf(-1.0) - 0.6827) <= 5e-5);
    CHECK(std::abs(norm_cdf(2.0) - norm_cdf(-2.0) - 0.9545) <= 5e-5);
}
