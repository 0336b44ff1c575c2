#include "trust_atlas/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trust_atlas/error.hpp"

namespace trust_atlas::embedding {

using swarm::Frame;
using swarm::Vec2;

namespace {

Vec2 centroid(const Frame& frame) {
    Vec2 c;
    for (const auto& a : frame) c = c + a.position;
    return (1.0 / static_cast<double>(frame.size())) * c;
}

double spread(const Frame& frame, Vec2 c) {
    double s = 0.0;
    for (const auto& a : frame) s += swarm::norm(a.position - c);
    return s / static_cast<double>(frame.size());
}

double mean_nearest_neighbor(const Frame& frame, double* min_out) {
    double total = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frame.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < frame.size(); ++j)
            if (j != i) best = std::min(best, swarm::norm(frame[i].position - frame[j].position));
        total += best;
        smallest = std::min(smallest, best);
    }
    if (min_out) *min_out = smallest;
    return total / static_cast<double>(frame.size());
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(xs.size());
    return m;
}

}  // namespace

const std::vector<std::string>& descriptor_names() {
    static const std::vector<std::string> names{
        "mean_speed",          "speed_variance",     "mean_abs_angular_rate", "mean_spread",
        "spread_variance",     "spread_trend",       "centroid_path_length",  "centroid_net_displacement",
        "final_mean_nn_dist",  "min_nn_dist",        "spread_time_correlation",
        "mean_angular_momentum"};
    return names;
}

FeatureVector extract_features(const swarm::Trajectory& traj) {
    if (traj.frames.size() < 2)
        throw Error(ErrorCode::DegenerateTrajectory, "trajectory needs at least 2 frames");
    const std::size_t n = traj.frames.front().size();
    if (n < 2) throw Error(ErrorCode::DegenerateTrajectory, "trajectory needs at least 2 agents");
    for (const auto& f : traj.frames)
        if (f.size() != n) throw Error(ErrorCode::DegenerateTrajectory, "agent count changes between frames");

    const std::size_t T = traj.frames.size();
    const double inv_dt = traj.dt > 0.0 ? 1.0 / traj.dt : 0.0;

    std::vector<Vec2> centers(T);
    std::vector<double> spreads(T);
    for (std::size_t t = 0; t < T; ++t) {
        centers[t] = centroid(traj.frames[t]);
        spreads[t] = spread(traj.frames[t], centers[t]);
    }

    std::vector<double> speeds;
    speeds.reserve((T - 1) * n);
    double angular_rate = 0.0;
    double momentum = 0.0;
    double path = 0.0;
    double min_nn = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + 1 < T; ++t) {
        const Frame& a = traj.frames[t];
        const Frame& b = traj.frames[t + 1];
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 vel = inv_dt * (b[i].position - a[i].position);
            speeds.push_back(swarm::norm(vel));
            angular_rate += std::abs(swarm::wrap_angle(b[i].heading - a[i].heading)) * inv_dt;
            const Vec2 rel = a[i].position - centers[t];
            momentum += rel.x * vel.y - rel.y * vel.x;
        }
        path += swarm::norm(centers[t + 1] - centers[t]);
    }
    for (const auto& f : traj.frames) {
        double m = 0.0;
        mean_nearest_neighbor(f, &m);
        min_nn = std::min(min_nn, m);
    }
    const double samples = static_cast<double>((T - 1) * n);

    const Moments speed = moments(speeds);
    const Moments spr = moments(spreads);

    // Pearson correlation of spread against the frame index.
    double correlation = 0.0;
    {
        const double t_mean = (static_cast<double>(T) - 1.0) / 2.0;
        double cov = 0.0;
        double t_var = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double dt = static_cast<double>(t) - t_mean;
            cov += dt * (spreads[t] - spr.mean);
            t_var += dt * dt;
        }
        const double denom = std::sqrt(t_var * spr.variance * static_cast<double>(T));
        if (denom > 1e-300 && spr.variance > 1e-24) correlation = cov / denom;
    }

    FeatureVector out;
    out.behavior_id = traj.behavior_id;
    out.values = {
        speed.mean,
        speed.variance,
        angular_rate / samples,
        spr.mean,
        spr.variance,
        spreads.back() - spreads.front(),
        path,
        swarm::norm(centers.back() - centers.front()),
        mean_nearest_neighbor(traj.frames.back(), nullptr),
        min_nn,
        correlation,
        momentum / samples,
    };
    return out;
}

std::vector<FeatureVector> standardize(const std::vector<FeatureVector>& features) {
    if (features.size() < 2)
        throw Error(ErrorCode::MismatchedDimensions, "standardize needs at least two feature vectors");
    const std::size_t q = features.front().values.size();
    for (const auto& f : features)
        if (f.values.size() != q)
            throw Error(ErrorCode::MismatchedDimensions, "feature vector '" + f.behavior_id + "' has length " +
                                                             std::to_string(f.values.size()) + ", expected " +
                                                             std::to_string(q));

    std::vector<FeatureVector> out = features;
    std::vector<double> column(features.size());
    for (std::size_t d = 0; d < q; ++d) {
        for (std::size_t k = 0; k < features.size(); ++k) column[k] = features[k].values[d];
        const Moments m = moments(column);
        const double sd = std::sqrt(m.variance);
        const double scale = std::max(1.0, std::abs(m.mean));
        for (std::size_t k = 0; k < features.size(); ++k)
            out[k].values[d] = sd > 1e-12 * scale ? (column[k] - m.mean) / sd : 0.0;
    }
    return out;
}

std::vector<std::size_t> top_variance_dims(const std::vector<FeatureVector>& features, std::size_t count) {
    if (features.empty()) return {};
    const std::size_t q = features.front().values.size();
    std::vector<double> var(q, 0.0);
    std::vector<double> column(features.size());
    for (std::size_t d = 0; d < q; ++d) {
        for (std::size_t k = 0; k < features.size(); ++k) column[k] = features[k].values.at(d);
        var[d] = moments(column).variance;
    }
    std::vector<std::size_t> idx(q);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
    idx.resize(std::min(count, q));
    return idx;
}

}  // namespace trust_atlas::embedding
