#ifndef LANDMARK_TESTS_TEST_UTIL_HPP
#define LANDMARK_TESTS_TEST_UTIL_HPP

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "core/types.hpp"

namespace testutil {

// Scratch directory, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("landmark-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------
// Brute-force DBSCAN oracle: the declarative definition, computed from the
// full pairwise distance matrix with its own arithmetic. Core points have at
// least min_pts neighbors within eps (self counted); clusters are the
// connected components of the core graph, numbered by their earliest core in
// ascending id order; border points join the lowest-numbered cluster owning
// a core within eps; everything else is noise (-1).
// ---------------------------------------------------------------------

inline std::map<std::string, int> oracle_dbscan(
    const std::vector<landmark::LabeledEmbedding>& points, double eps,
    std::size_t min_pts) {
    const std::size_t n = points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a].id < points[b].id;
    });

    auto cosine_distance = [&](std::size_t a, std::size_t b) {
        const auto& va = points[order[a]].vector;
        const auto& vb = points[order[b]].vector;
        double prod = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t d = 0; d < va.size(); ++d) {
            prod += va[d] * vb[d];
            na += va[d] * va[d];
            nb += vb[d] * vb[d];
        }
        double c = prod / (std::sqrt(na) * std::sqrt(nb));
        c = std::min(1.0, std::max(-1.0, c));
        return 1.0 - c;
    };

    std::vector<std::vector<bool>> within(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) within[i][j] = cosine_distance(i, j) <= eps;

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (within[i][j]) ++count;
        core[i] = count >= min_pts;
    }

    // components of the core graph, numbered by earliest core in id order
    std::vector<int> cluster(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || cluster[i] != -1) continue;
        const int id = next++;
        std::vector<std::size_t> stack{i};
        cluster[i] = id;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v)
                if (core[v] && cluster[v] == -1 && within[u][v]) {
                    cluster[v] = id;
                    stack.push_back(v);
                }
        }
    }

    // border points
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        int best = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (core[j] && within[i][j] && (best == -1 || cluster[j] < best))
                best = cluster[j];
        cluster[i] = best;
    }

    std::map<std::string, int> out;
    for (std::size_t i = 0; i < n; ++i) out[points[order[i]].id] = cluster[i];
    return out;
}

// Gaussian blob on the unit sphere around a center direction.
inline std::vector<landmark::LabeledEmbedding> make_blob(
    landmark::Rng& rng, const std::vector<double>& center, double sigma,
    std::size_t count, const std::string& id_prefix, std::uint64_t label,
    std::size_t first_seq = 0) {
    std::vector<landmark::LabeledEmbedding> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> v(center.size());
        double norm_sq = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) {
            v[d] = center[d] + sigma * rng.gaussian();
            norm_sq += v[d] * v[d];
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& x : v) x *= inv;
        char id[48];
        std::snprintf(id, sizeof id, "%s%04zu", id_prefix.c_str(), first_seq + i);
        out.push_back({id, label, std::move(v)});
    }
    return out;
}

inline std::vector<double> unit_direction(landmark::Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    for (double& x : v) {
        x = rng.gaussian();
        norm_sq += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
}

} // namespace testutil

#endif
