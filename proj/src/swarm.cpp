#include "trust_atlas/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "trust_atlas/error.hpp"
#include "trust_atlas/rng.hpp"

namespace trust_atlas::swarm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLeaderSpeedRatio = 0.6;

struct Command {
    double v = 0.0;
    double omega = 0.0;
};

Vec2 centroid(const Frame& frame) {
    Vec2 c;
    for (const auto& a : frame) c = c + a.position;
    return (1.0 / static_cast<double>(frame.size())) * c;
}

// Heading controller toward `target`; speed proportional to the range left
// after subtracting `standoff`, capped at v_max.
Command go_to(const AgentState& s, Vec2 target, const ControllerParams& p, double standoff = 0.0,
              double v_cap = -1.0) {
    const Vec2 err = target - s.position;
    const double range = norm(err);
    if (range < 1e-12) return {};
    const double bearing = std::atan2(err.y, err.x);
    const double cap = v_cap < 0.0 ? p.v_max : v_cap;
    return {std::min(cap, p.k_v * std::max(0.0, range - standoff)),
            p.k_theta * wrap_angle(bearing - s.heading)};
}

Command steer(const AgentState& s, Vec2 desired, const ControllerParams& p) {
    const double mag = norm(desired);
    if (mag < 1e-12) return {};
    return {std::min(p.v_max, p.k_v * mag),
            p.k_theta * wrap_angle(std::atan2(desired.y, desired.x) - s.heading)};
}

// Agents sorted by angle around the frame centroid (ties by index).
std::vector<std::size_t> angular_order(const Frame& frame) {
    const Vec2 c = centroid(frame);
    std::vector<std::size_t> order(frame.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> angle(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const Vec2 d = frame[i].position - c;
        angle[i] = std::atan2(d.y, d.x);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
    return order;
}

void validate(const BehaviorSpec& spec) {
    if (spec.n_agents < 2) throw Error(ErrorCode::InvalidSpec, "n_agents must be at least 2");
    if (spec.kind == BehaviorKind::CyclicPursuit && spec.n_agents < 3)
        throw Error(ErrorCode::InvalidSpec, "cyclic pursuit requires at least 3 agents");
    if (spec.kind == BehaviorKind::SquareFormation && spec.n_agents != 4)
        throw Error(ErrorCode::InvalidSpec, "square formation requires exactly 4 agents");
    const auto& p = spec.params;
    for (double v : {p.k_theta, p.k_v, p.v_max, p.formation_scale, p.standoff, p.init_box})
        if (!std::isfinite(v) || v < 0.0)
            throw Error(ErrorCode::InvalidSpec, "controller parameters must be finite and nonnegative");
}

}  // namespace

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

std::string_view behavior_id(BehaviorKind kind) {
    switch (kind) {
        case BehaviorKind::CyclicPursuit: return "cyclic_pursuit";
        case BehaviorKind::Herding: return "herding";
        case BehaviorKind::LeaderFollowing: return "leader_following";
        case BehaviorKind::SquareFormation: return "square_formation";
        case BehaviorKind::LineFormation: return "line_formation";
    }
    return "";
}

BehaviorKind parse_behavior(std::string_view id) {
    for (auto k : all_behaviors())
        if (behavior_id(k) == id) return k;
    throw Error(ErrorCode::InvalidSpec, "unknown behavior '" + std::string(id) + "'");
}

const std::vector<BehaviorKind>& all_behaviors() {
    static const std::vector<BehaviorKind> kinds{
        BehaviorKind::CyclicPursuit, BehaviorKind::Herding, BehaviorKind::LeaderFollowing,
        BehaviorKind::SquareFormation, BehaviorKind::LineFormation};
    return kinds;
}

BehaviorSpec default_spec(BehaviorKind kind) {
    BehaviorSpec spec;
    spec.kind = kind;
    switch (kind) {
        case BehaviorKind::CyclicPursuit:
            spec.n_agents = 5;
            spec.seed = 11;
            break;
        case BehaviorKind::Herding:
            spec.n_agents = 6;
            spec.seed = 12;
            break;
        case BehaviorKind::LeaderFollowing:
            spec.n_agents = 5;
            spec.seed = 13;
            spec.params.waypoints = {{3.0, 0.0}, {0.0, 3.0}, {-3.0, 0.0}, {0.0, -3.0}};
            break;
        case BehaviorKind::SquareFormation:
            spec.n_agents = 4;
            spec.seed = 14;
            break;
        case BehaviorKind::LineFormation:
            spec.n_agents = 5;
            spec.seed = 15;
            break;
    }
    return spec;
}

double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

AgentState unicycle_step(const AgentState& state, double v, double omega, double dt) {
    if (!std::isfinite(state.position.x) || !std::isfinite(state.position.y) ||
        !std::isfinite(state.heading) || !std::isfinite(v) || !std::isfinite(omega) ||
        !std::isfinite(dt) || dt < 0.0)
        throw Error(ErrorCode::NonFiniteInput, "unicycle_step needs finite inputs and dt >= 0");
    if (dt == 0.0) return state;
    AgentState next;
    next.position = {state.position.x + v * dt * std::cos(state.heading),
                     state.position.y + v * dt * std::sin(state.heading)};
    next.heading = wrap_angle(state.heading + omega * dt);
    return next;
}

Frame initial_frame(const BehaviorSpec& spec) {
    Xorshift64Star rng(spec.seed);
    const double half = spec.params.init_box / 2.0;
    Frame frame(static_cast<std::size_t>(spec.n_agents));
    for (auto& a : frame) {
        a.position.x = rng.uniform(-half, half);
        a.position.y = rng.uniform(-half, half);
        a.heading = wrap_angle(rng.uniform(-kPi, kPi));
    }
    return frame;
}

std::vector<Vec2> formation_targets(const BehaviorSpec& spec, const Frame& initial) {
    const Vec2 c = centroid(initial);
    const double s = spec.params.formation_scale;
    std::vector<Vec2> targets(initial.size(), c);
    if (spec.kind == BehaviorKind::SquareFormation) {
        // Vertices in ascending angle order around the centroid.
        const Vec2 vertices[4] = {{-s / 2, -s / 2}, {s / 2, -s / 2}, {s / 2, s / 2}, {-s / 2, s / 2}};
        const auto order = angular_order(initial);
        for (std::size_t k = 0; k < order.size(); ++k) targets[order[k]] = c + vertices[k];
    } else if (spec.kind == BehaviorKind::LineFormation) {
        // Slots along the x axis; agents keep their left-to-right order.
        std::vector<std::size_t> order(initial.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return initial[a].position.x < initial[b].position.x;
        });
        const double mid = (static_cast<double>(initial.size()) - 1.0) / 2.0;
        for (std::size_t k = 0; k < order.size(); ++k)
            targets[order[k]] = c + Vec2{(static_cast<double>(k) - mid) * s, 0.0};
    }
    return targets;
}

Trajectory simulate(const BehaviorSpec& spec, int steps, double dt) {
    validate(spec);
    if (steps < 1) throw Error(ErrorCode::InvalidSpec, "steps must be at least 1");
    if (!std::isfinite(dt) || dt < 0.0) throw Error(ErrorCode::InvalidSpec, "dt must be finite and >= 0");

    const auto& p = spec.params;
    Trajectory traj;
    traj.behavior_id = std::string(behavior_id(spec.kind));
    traj.dt = dt;
    traj.frames.reserve(static_cast<std::size_t>(steps) + 1);
    traj.frames.push_back(initial_frame(spec));

    const std::size_t n = traj.frames.front().size();
    const auto targets = formation_targets(spec, traj.frames.front());
    const auto ring = angular_order(traj.frames.front());
    std::vector<std::size_t> pursued(n);
    for (std::size_t k = 0; k < n; ++k) pursued[ring[k]] = ring[(k + 1) % n];
    std::size_t waypoint = 0;

    std::vector<Command> cmd(n);
    for (int step = 0; step < steps; ++step) {
        const Frame& cur = traj.frames.back();
        switch (spec.kind) {
            case BehaviorKind::CyclicPursuit:
                for (std::size_t i = 0; i < n; ++i) {
                    const Vec2 d = cur[pursued[i]].position - cur[i].position;
                    cmd[i] = {p.v_max, p.k_theta * wrap_angle(std::atan2(d.y, d.x) - cur[i].heading)};
                }
                break;
            case BehaviorKind::Herding: {
                const Vec2 c = centroid(cur);
                const Vec2 drift = p.goal_gain * (p.goal - c);
                for (std::size_t i = 0; i < n; ++i) {
                    Vec2 desired = p.cohesion_gain * (c - cur[i].position) + drift;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) continue;
                        const Vec2 away = cur[i].position - cur[j].position;
                        const double r = norm(away);
                        if (r > 1e-9 && r < p.repulsion_radius)
                            desired = desired + (p.repulsion_gain * (p.repulsion_radius - r) / r) * away;
                    }
                    cmd[i] = steer(cur[i], desired, p);
                }
                break;
            }
            case BehaviorKind::LeaderFollowing: {
                if (!p.waypoints.empty()) {
                    if (norm(p.waypoints[waypoint] - cur[0].position) < p.waypoint_tolerance)
                        waypoint = (waypoint + 1) % p.waypoints.size();
                    cmd[0] = go_to(cur[0], p.waypoints[waypoint], p, 0.0, kLeaderSpeedRatio * p.v_max);
                } else {
                    cmd[0] = {};
                }
                for (std::size_t i = 1; i < n; ++i) cmd[i] = go_to(cur[i], cur[i - 1].position, p, p.standoff);
                break;
            }
            case BehaviorKind::SquareFormation:
            case BehaviorKind::LineFormation:
                for (std::size_t i = 0; i < n; ++i) cmd[i] = go_to(cur[i], targets[i], p);
                break;
        }

        Frame next(n);
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = unicycle_step(cur[i], cmd[i].v, cmd[i].omega, dt);
            if (!std::isfinite(next[i].position.x) || !std::isfinite(next[i].position.y))
                throw Error(ErrorCode::NonFiniteState, "controller diverged at step " + std::to_string(step));
        }
        traj.frames.push_back(std::move(next));
    }
    return traj;
}

Trajectory reversed(const Trajectory& traj) {
    Trajectory out = traj;
    std::reverse(out.frames.begin(), out.frames.end());
    return out;
}

}  // namespace trust_atlas::swarm
