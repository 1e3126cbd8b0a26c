#include "cleaner/cleaning.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace landmark {

namespace {

// Groups rows by original label, labels ascending, members in input order.
std::map<std::uint64_t, std::vector<LabeledEmbedding>>
group_by_label(const std::vector<LabeledEmbedding>& rows) {
    std::map<std::uint64_t, std::vector<LabeledEmbedding>> groups;
    for (const auto& row : rows) groups[row.label].push_back(row);
    return groups;
}

std::vector<std::vector<std::string>> clusters_from_assignment(const ClusterAssignment& a) {
    std::vector<std::vector<std::string>> clusters(static_cast<std::size_t>(a.cluster_count));
    for (const auto& e : a.entries)
        if (e.cluster != ClusterAssignment::kNoise)
            clusters[static_cast<std::size_t>(e.cluster)].push_back(e.id);
    return clusters;
}

} // namespace

CategorySplit clean_category(const std::vector<LabeledEmbedding>& members,
                             const DbscanParams& params) {
    params.validate();
    CategorySplit split;
    if (members.empty()) return split;
    for (const auto& m : members)
        if (m.label != members.front().label)
            raise(Errc::kInvalidArgument, "clean_category: mixed original labels");

    const ClusterAssignment a = dbscan(members, params.eps, params.min_pts);
    split.clusters = clusters_from_assignment(a);
    for (const auto& e : a.entries)
        if (e.cluster == ClusterAssignment::kNoise) split.noise.push_back(e.id);
    return split;
}

std::vector<std::vector<std::string>> rescue_noise(const std::vector<LabeledEmbedding>& noise,
                                                   const DbscanParams& params) {
    params.validate();
    std::vector<std::vector<std::string>> rescued;
    for (const auto& [label, members] : group_by_label(noise)) {
        (void)label;
        const ClusterAssignment a = dbscan(members, params.relaxed_eps, params.min_pts);
        for (auto& cluster : clusters_from_assignment(a))
            if (cluster.size() >= params.min_cluster_size)
                rescued.push_back(std::move(cluster));
    }
    return rescued;
}

std::pair<std::vector<LabeledEmbedding>, RelabelReport>
clean_dataset(const std::vector<LabeledEmbedding>& manifest, const DbscanParams& params) {
    params.validate();
    RelabelReport report;
    report.input_size = manifest.size();

    std::unordered_map<std::string, const LabeledEmbedding*> by_id;
    by_id.reserve(manifest.size());
    for (const auto& row : manifest) {
        if (!by_id.emplace(row.id, &row).second)
            raise(Errc::kDuplicateId, "clean_dataset: duplicate id " + row.id);
    }

    std::vector<LabeledEmbedding> cleaned;
    std::uint64_t next_label = 0;

    const auto groups = group_by_label(manifest);
    report.old_category_count = groups.size();

    for (const auto& [old_label, members] : groups) {
        RelabelReport::PerLabel per;
        per.old_label = old_label;

        const CategorySplit split = clean_category(members, params);

        std::vector<LabeledEmbedding> noise_members;
        noise_members.reserve(split.noise.size());
        for (const auto& id : split.noise) noise_members.push_back(*by_id.at(id));
        const auto rescued_groups = rescue_noise(noise_members, params);

        std::size_t placed = 0;
        auto emit = [&](const std::vector<std::string>& ids, bool is_rescue) {
            const std::uint64_t fresh = next_label++;
            per.new_labels.push_back(fresh);
            for (const auto& id : ids) {
                LabeledEmbedding row = *by_id.at(id);
                row.label = fresh;
                cleaned.push_back(std::move(row));
            }
            placed += ids.size();
            (is_rescue ? per.rescued : per.kept) += ids.size();
        };

        for (const auto& cluster : split.clusters)
            if (cluster.size() >= params.min_cluster_size) emit(cluster, false);
        for (const auto& group : rescued_groups) emit(group, true);

        per.dropped = members.size() - placed;
        report.total_kept += per.kept;
        report.total_rescued += per.rescued;
        report.total_dropped += per.dropped;
        report.labels.push_back(std::move(per));
    }

    report.new_category_count = static_cast<std::size_t>(next_label);

    std::sort(cleaned.begin(), cleaned.end(), [](const auto& a, const auto& b) {
        return a.label != b.label ? a.label < b.label : a.id < b.id;
    });
    return {std::move(cleaned), std::move(report)};
}

std::string format_relabel_report(const RelabelReport& report) {
    std::ostringstream out;
    for (const auto& per : report.labels) {
        out << "old_label " << per.old_label << " new_labels ";
        if (per.new_labels.empty()) {
            out << "-";
        } else {
            for (std::size_t i = 0; i < per.new_labels.size(); ++i) {
                if (i) out << ",";
                out << per.new_labels[i];
            }
        }
        out << " kept " << per.kept << " rescued " << per.rescued << " dropped "
            << per.dropped << "\n";
    }
    out << "summary input " << report.input_size << " kept " << report.total_kept
        << " rescued " << report.total_rescued << " dropped " << report.total_dropped
        << " old_categories " << report.old_category_count << " new_categories "
        << report.new_category_count << "\n";
    return out.str();
}

void write_relabel_report(const std::string& path, const RelabelReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open for write: " + path);
    const std::string text = format_relabel_report(report);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(Errc::kIoError, "write failed: " + path);
}

} // namespace landmark
