#include "eval/retrieval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "core/vector_ops.hpp"

namespace landmark {

RetrievalIndex build_index(const std::vector<LabeledEmbedding>& gallery) {
    RetrievalIndex index;
    if (gallery.empty()) return index;

    index.dim = gallery.front().vector.size();
    std::unordered_set<std::string> seen;
    seen.reserve(gallery.size());
    index.gallery.reserve(gallery.size());
    for (const auto& item : gallery) {
        if (item.vector.size() != index.dim)
            raise(Errc::kDimMismatch, "build_index: mixed dims");
        if (!seen.insert(item.id).second)
            raise(Errc::kDuplicateId, "build_index: duplicate id " + item.id);
        LabeledEmbedding normalized = item;
        normalized.vector = l2_normalize(item.vector);
        index.gallery.push_back(std::move(normalized));
    }
    std::sort(index.gallery.begin(), index.gallery.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return index;
}

RankedResult search(const RetrievalIndex& index, const EmbeddingVector& query,
                    std::size_t k, const std::string* exclude_id,
                    const std::string& query_id) {
    if (k < 1) raise(Errc::kInvalidArgument, "search: k must be >= 1");
    if (!index.gallery.empty() && query.size() != index.dim)
        raise(Errc::kDimMismatch, "search: query dim mismatch");

    RankedResult result;
    result.query_id = query_id;
    if (index.gallery.empty()) return result;

    const EmbeddingVector q = l2_normalize(query);

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(index.gallery.size());
    for (std::size_t i = 0; i < index.gallery.size(); ++i) {
        if (exclude_id && index.gallery[i].id == *exclude_id) continue;
        scored.emplace_back(dot(q, index.gallery[i].vector), i);
    }

    const std::size_t keep = std::min(k, scored.size());
    // gallery is id-sorted, so index order is the id tie-break
    auto better = [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                      scored.end(), better);

    result.hits.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
        result.hits.push_back({index.gallery[scored[i].second].id, scored[i].first});
    return result;
}

std::optional<double> ap_at_k(const RankedResult& ranked,
                              const std::set<std::string>& relevant, std::size_t k) {
    if (relevant.empty()) return std::nullopt;
    const std::size_t denom = std::min(relevant.size(), k);
    double sum = 0.0;
    std::size_t hits_so_far = 0;
    const std::size_t limit = std::min(k, ranked.hits.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (relevant.count(ranked.hits[i].gallery_id)) {
            ++hits_so_far;
            sum += static_cast<double>(hits_so_far) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(denom);
}

EvalSummary evaluate(const RetrievalIndex& index,
                     const std::vector<LabeledEmbedding>& queries, std::size_t k) {
    EvalSummary summary;
    summary.query_count = queries.size();
    summary.per_query.reserve(queries.size());

    std::vector<std::pair<std::string, std::optional<double>>> ordered;
    ordered.reserve(queries.size());
    for (const auto& query : queries) {
        std::set<std::string> relevant;
        for (const auto& item : index.gallery)
            if (item.label == query.label && item.id != query.id) relevant.insert(item.id);

        const RankedResult ranked = search(index, query.vector, k, &query.id, query.id);
        const auto ap = ap_at_k(ranked, relevant, k);
        summary.per_query.emplace_back(query.id, ap);
        ordered.emplace_back(query.id, ap);
    }

    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double sum = 0.0;
    for (const auto& [id, ap] : ordered) {
        (void)id;
        if (ap) {
            sum += *ap;
            ++summary.defined_count;
        }
    }
    summary.mean_ap = summary.defined_count == 0
                          ? 0.0
                          : sum / static_cast<double>(summary.defined_count);
    return summary;
}

namespace {

// Sorted-by-id copy, with id/label alignment enforcement against a partner.
std::vector<LabeledEmbedding> aligned_sorted(const std::vector<LabeledEmbedding>& rows) {
    std::vector<LabeledEmbedding> out = rows;
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

std::vector<LabeledEmbedding> fuse(const std::vector<LabeledEmbedding>& a,
                                   const std::vector<LabeledEmbedding>& b,
                                   const char* what) {
    if (a.size() != b.size())
        raise(Errc::kIdMisalignment, std::string("ensemble: ") + what + " sizes differ");
    const auto sa = aligned_sorted(a);
    const auto sb = aligned_sorted(b);
    std::vector<LabeledEmbedding> fused;
    fused.reserve(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].id != sb[i].id)
            raise(Errc::kIdMisalignment,
                  std::string("ensemble: ") + what + " id mismatch at " + sa[i].id);
        if (sa[i].label != sb[i].label)
            raise(Errc::kIdMisalignment,
                  std::string("ensemble: ") + what + " label mismatch at " + sa[i].id);
        LabeledEmbedding row;
        row.id = sa[i].id;
        row.label = sa[i].label;
        row.vector = concat_embeddings(sa[i].vector, sb[i].vector, true);
        fused.push_back(std::move(row));
    }
    return fused;
}

} // namespace

EvalSummary ensemble_evaluate(const std::vector<LabeledEmbedding>& gallery_a,
                              const std::vector<LabeledEmbedding>& gallery_b,
                              const std::vector<LabeledEmbedding>& queries_a,
                              const std::vector<LabeledEmbedding>& queries_b,
                              std::size_t k) {
    const auto gallery = fuse(gallery_a, gallery_b, "gallery");
    const auto queries = fuse(queries_a, queries_b, "queries");
    return evaluate(build_index(gallery), queries, k);
}

std::string format_eval_report(const EvalSummary& summary, std::size_t k) {
    std::string out;
    char line[160];
    for (const auto& [id, ap] : summary.per_query) {
        if (ap)
            std::snprintf(line, sizeof line, "query %s ap %.9f\n", id.c_str(), *ap);
        else
            std::snprintf(line, sizeof line, "query %s ap undefined\n", id.c_str());
        out += line;
    }
    std::snprintf(line, sizeof line, "summary map@%zu %.9f queries %zu defined %zu\n", k,
                  summary.mean_ap, summary.query_count, summary.defined_count);
    out += line;
    return out;
}

std::string format_result_line(const EvalSummary& summary, std::size_t k) {
    char line[96];
    std::snprintf(line, sizeof line, "RESULT map@%zu=%.6f queries=%zu", k, summary.mean_ap,
                  summary.defined_count);
    return line;
}

void write_eval_report(const std::string& path, const EvalSummary& summary, std::size_t k) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open for write: " + path);
    const std::string text = format_eval_report(summary, k);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(Errc::kIoError, "write failed: " + path);
}

} // namespace landmark
