#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trust_atlas::swarm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 v);

struct AgentState {
    Vec2 position;   // meters
    double heading;  // radians in (-pi, pi]

    bool operator==(const AgentState&) const = default;
};

using Frame = std::vector<AgentState>;

enum class BehaviorKind { CyclicPursuit, Herding, LeaderFollowing, SquareFormation, LineFormation };

std::string_view behavior_id(BehaviorKind kind);
BehaviorKind parse_behavior(std::string_view id);
const std::vector<BehaviorKind>& all_behaviors();

struct ControllerParams {
    double k_theta = 2.0;  // heading gain
    double k_v = 1.0;      // range-to-speed gain
    double v_max = 0.5;    // m/s
    double formation_scale = 1.0;
    Vec2 goal{3.0, 3.0};          // herding destination
    double cohesion_gain = 0.5;   // herding pull toward the centroid
    double goal_gain = 0.3;       // herding pull toward the goal
    double repulsion_radius = 0.6;
    double repulsion_gain = 1.5;
    double standoff = 0.4;        // leader following
    std::vector<Vec2> waypoints;  // leader route; empty keeps the leader still
    double waypoint_tolerance = 0.1;
    double init_box = 4.0;        // side of the uniform initial placement box
};

struct BehaviorSpec {
    BehaviorKind kind = BehaviorKind::CyclicPursuit;
    int n_agents = 5;
    std::uint64_t seed = 1;
    ControllerParams params;
};

/// Shipped parameter set for each behavior (agent count, seed, route).
BehaviorSpec default_spec(BehaviorKind kind);

struct Trajectory {
    std::string behavior_id;
    double dt = 0.0;
    std::vector<Frame> frames;

    std::size_t n_agents() const { return frames.empty() ? 0 : frames.front().size(); }
    bool operator==(const Trajectory&) const = default;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// First-order Euler unicycle update.
AgentState unicycle_step(const AgentState& state, double v, double omega, double dt);

/// Positions from the seeded initial placement (uniform in an init_box square
/// centered on the origin) and headings uniform in (-pi, pi].
Frame initial_frame(const BehaviorSpec& spec);

/// Formation targets for each agent (index-aligned with the initial frame).
std::vector<Vec2> formation_targets(const BehaviorSpec& spec, const Frame& initial);

Trajectory simulate(const BehaviorSpec& spec, int steps, double dt);

/// Frame order reversed; useful for time-asymmetry checks.
Trajectory reversed(const Trajectory& traj);

}  // namespace trust_atlas::swarm
