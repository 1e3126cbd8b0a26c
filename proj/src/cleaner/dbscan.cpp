#include "cleaner/dbscan.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_set>

#include "core/vector_ops.hpp"

namespace landmark {

void DbscanParams::validate() const {
    if (!(eps > 0.0)) raise(Errc::kConfigError, "dbscan: eps must be > 0");
    if (!(relaxed_eps > eps))
        raise(Errc::kConfigError, "dbscan: relaxed_eps must exceed eps");
    if (min_pts < 1) raise(Errc::kConfigError, "dbscan: min_pts must be >= 1");
    if (min_cluster_size < 1)
        raise(Errc::kConfigError, "dbscan: min_cluster_size must be >= 1");
}

ClusterAssignment dbscan(const std::vector<LabeledEmbedding>& points, double eps,
                         std::size_t min_pts) {
    ClusterAssignment out;
    const std::size_t n = points.size();
    if (n == 0) return out;

    const std::size_t dim = points.front().vector.size();
    for (const auto& p : points)
        if (p.vector.size() != dim)
            raise(Errc::kDimMismatch, "dbscan: mixed dims in input");

    // Canonical processing order: ascending point id.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a].id < points[b].id; });
    {
        std::unordered_set<std::string> seen;
        for (const auto& p : points)
            if (!seen.insert(p.id).second)
                raise(Errc::kDuplicateId, "dbscan: duplicate id " + p.id);
    }

    // rank[i] = position of point i in the canonical order.
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

    // Neighbor query over canonical ranks, self included, eps inclusive.
    auto neighbors = [&](std::size_t r) {
        std::vector<std::size_t> out_ranks;
        const auto& v = points[order[r]].vector;
        for (std::size_t s = 0; s < n; ++s) {
            const double d = 1.0 - cosine_similarity(v, points[order[s]].vector);
            if (d <= eps) out_ranks.push_back(s);
        }
        return out_ranks;
    };

    constexpr int kUnvisited = -2;
    std::vector<int> assigned(n, kUnvisited);
    int next_cluster = 0;

    for (std::size_t r = 0; r < n; ++r) {
        if (assigned[r] != kUnvisited) continue;
        auto seeds = neighbors(r);
        if (seeds.size() < min_pts) {
            assigned[r] = ClusterAssignment::kNoise;
            continue;
        }
        const int cluster = next_cluster++;
        assigned[r] = cluster;
        std::deque<std::size_t> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const std::size_t q = queue.front();
            queue.pop_front();
            if (assigned[q] == ClusterAssignment::kNoise) {
                assigned[q] = cluster; // border point
                continue;
            }
            if (assigned[q] != kUnvisited) continue;
            assigned[q] = cluster;
            auto reach = neighbors(q);
            if (reach.size() >= min_pts)
                queue.insert(queue.end(), reach.begin(), reach.end());
        }
    }

    out.entries.reserve(n);
    for (std::size_t r = 0; r < n; ++r)
        out.entries.push_back({points[order[r]].id, assigned[r]});
    out.cluster_count = next_cluster;
    return out;
}

} // namespace landmark
