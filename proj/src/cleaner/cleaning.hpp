#ifndef LANDMARK_CLEANER_CLEANING_HPP
#define LANDMARK_CLEANER_CLEANING_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cleaner/dbscan.hpp"
#include "core/types.hpp"

namespace landmark {

struct RelabelReport {
    struct PerLabel {
        std::uint64_t old_label = 0;
        std::vector<std::uint64_t> new_labels;
        std::size_t kept = 0;
        std::size_t rescued = 0;
        std::size_t dropped = 0;
    };

    std::vector<PerLabel> labels; // ascending old_label
    std::size_t input_size = 0;
    std::size_t total_kept = 0;
    std::size_t total_rescued = 0;
    std::size_t total_dropped = 0;
    std::size_t old_category_count = 0;
    std::size_t new_category_count = 0;
};

struct CategorySplit {
    std::vector<std::vector<std::string>> clusters; // strict-eps clusters, discovery order
    std::vector<std::string> noise;                 // ascending id
};

// Strict-eps DBSCAN over one original category. Every cluster is a candidate
// new category; noise is handed to rescue_noise.
CategorySplit clean_category(const std::vector<LabeledEmbedding>& members,
                             const DbscanParams& params);

// Re-cluster noise points under relaxed_eps, per original label. Only groups
// of size >= min_cluster_size survive as long-tail categories.
std::vector<std::vector<std::string>> rescue_noise(const std::vector<LabeledEmbedding>& noise,
                                                   const DbscanParams& params);

// Full cleaning pass: per original label, strict clustering then noise
// rescue. Surviving clusters get dense fresh labels in ascending
// (old label, cluster index) order, strict clusters before rescued ones.
// Output rows are ordered by (new label, id). Dropped points are absent.
std::pair<std::vector<LabeledEmbedding>, RelabelReport>
clean_dataset(const std::vector<LabeledEmbedding>& manifest, const DbscanParams& params);

// Line-oriented text report: one record per old label plus a summary footer.
std::string format_relabel_report(const RelabelReport& report);

void write_relabel_report(const std::string& path, const RelabelReport& report);

} // namespace landmark

#endif
