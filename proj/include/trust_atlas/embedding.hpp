#pragma once

#include <string>
#include <vector>

#include "trust_atlas/swarm.hpp"

namespace trust_atlas::embedding {

inline constexpr std::size_t kDescriptorCount = 12;

struct FeatureVector {
    std::string behavior_id;
    std::vector<double> values;

    bool operator==(const FeatureVector&) const = default;
};

/// Names of the descriptors, in output order.
const std::vector<std::string>& descriptor_names();

/// Twelve translation-invariant descriptors of a trajectory:
///   0 mean agent speed           6 centroid path length
///   1 speed variance             7 centroid net displacement
///   2 mean |angular rate|        8 final mean nearest-neighbour distance
///   3 mean spread                9 minimum nearest-neighbour distance
///   4 spread variance           10 correlation of spread with time
///   5 spread trend (last-first) 11 mean signed angular momentum about centroid
/// Spread is the mean distance of the agents to the instantaneous centroid.
/// Descriptors 10 and 11 change sign under time reversal.
FeatureVector extract_features(const swarm::Trajectory& traj);

/// Per-dimension z-scores (population standard deviation). Dimensions with
/// zero variance map to 0.
std::vector<FeatureVector> standardize(const std::vector<FeatureVector>& features);

/// Indices of the `count` dimensions with the largest variance across the set,
/// in decreasing order of variance (ties by index).
std::vector<std::size_t> top_variance_dims(const std::vector<FeatureVector>& features,
                                           std::size_t count = 2);

}  // namespace trust_atlas::embedding
