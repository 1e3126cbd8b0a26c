#ifndef LANDMARK_CLEANER_DBSCAN_HPP
#define LANDMARK_CLEANER_DBSCAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace landmark {

// eps / relaxed_eps are cosine-distance radii (distance = 1 - cosine
// similarity). relaxed_eps drives the second, noise-rescue pass;
// min_cluster_size is the floor below which a cluster does not become a
// category.
struct DbscanParams {
    double eps = 0.3;
    double relaxed_eps = 0.5;
    std::size_t min_pts = 5;
    std::size_t min_cluster_size = 2;

    void validate() const;
};

// Per-point cluster id, kNoise for noise. Entries are sorted by ascending
// point id; cluster ids are dense 0..cluster_count-1 in discovery order.
struct ClusterAssignment {
    static constexpr int kNoise = -1;

    struct Entry {
        std::string id;
        int cluster = kNoise;
    };

    std::vector<Entry> entries;
    int cluster_count = 0;
};

// Canonical DBSCAN over cosine distance:
//  - a point is core iff its eps-ball (inclusive, counting itself) holds at
//    least min_pts points;
//  - clusters are maximal density-reachable sets seeded from core points;
//  - points are processed in ascending id order and cluster ids follow
//    discovery order, so border points always land in the lowest-numbered
//    cluster that reaches them;
//  - everything else is noise.
// Empty input yields an empty assignment.
ClusterAssignment dbscan(const std::vector<LabeledEmbedding>& points, double eps,
                         std::size_t min_pts);

} // namespace landmark

#endif
