#ifndef LANDMARK_EVAL_RETRIEVAL_HPP
#define LANDMARK_EVAL_RETRIEVAL_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace landmark {

// Immutable gallery of unit-normalized embeddings, sorted by id.
struct RetrievalIndex {
    std::vector<LabeledEmbedding> gallery;
    std::size_t dim = 0;
};

struct ScoredHit {
    std::string gallery_id;
    double similarity = 0.0;
};

// Similarities non-increasing; ties broken by ascending gallery id.
struct RankedResult {
    std::string query_id;
    std::vector<ScoredHit> hits;
};

struct EvalSummary {
    double mean_ap = 0.0; // over queries with a defined AP
    std::vector<std::pair<std::string, std::optional<double>>> per_query;
    std::size_t query_count = 0;
    std::size_t defined_count = 0;
};

RetrievalIndex build_index(const std::vector<LabeledEmbedding>& gallery);

// Exhaustive top-k cosine search. exclude_id drops one gallery item (the
// query's self-match) from the candidates.
RankedResult search(const RetrievalIndex& index, const EmbeddingVector& query,
                    std::size_t k = 100, const std::string* exclude_id = nullptr,
                    const std::string& query_id = "");

// AP@k with denominator min(|relevant|, k); nullopt when relevant is empty.
std::optional<double> ap_at_k(const RankedResult& ranked,
                              const std::set<std::string>& relevant, std::size_t k = 100);

// Relevance: gallery items sharing the query's label, the query's own id
// excluded (self-match removed). The mean runs over queries with defined AP,
// accumulated in ascending query-id order so it is exactly permutation
// invariant.
EvalSummary evaluate(const RetrievalIndex& index,
                     const std::vector<LabeledEmbedding>& queries, std::size_t k = 100);

// Concatenation ensemble: per-id fuse of two galleries and two query sets
// (renormalized), then evaluate. Ids and labels must align across models.
EvalSummary ensemble_evaluate(const std::vector<LabeledEmbedding>& gallery_a,
                              const std::vector<LabeledEmbedding>& gallery_b,
                              const std::vector<LabeledEmbedding>& queries_a,
                              const std::vector<LabeledEmbedding>& queries_b,
                              std::size_t k = 100);

// Per-query AP lines plus a summary footer; plus the single machine line
// used by CI ("RESULT map@k=<value> queries=<defined>").
std::string format_eval_report(const EvalSummary& summary, std::size_t k);
std::string format_result_line(const EvalSummary& summary, std::size_t k);
void write_eval_report(const std::string& path, const EvalSummary& summary, std::size_t k);

} // namespace landmark

#endif
