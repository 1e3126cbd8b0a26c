#include "extractor/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "common/rng.hpp"
#include "core/vector_ops.hpp"

namespace landmark {

void SyntheticWorldConfig::validate() const {
    if (category_count < 1 || modes_per_category < 1 || points_per_mode < 1 ||
        gallery_per_mode < 1 || queries_per_mode < 1)
        raise(Errc::kConfigError, "synthetic: all counts must be >= 1");
    if (!(noise_fraction >= 0.0) || noise_fraction >= 1.0)
        raise(Errc::kConfigError, "synthetic: noise_fraction must be in [0, 1)");
    if (!(mode_separation > 0.0) || mode_separation >= 2.0)
        raise(Errc::kConfigError, "synthetic: mode_separation must be in (0, 2)");
    if (!(mode_sigma > 0.0)) raise(Errc::kConfigError, "synthetic: mode_sigma must be > 0");
    if (feature_dim < 2) raise(Errc::kConfigError, "synthetic: feature_dim must be >= 2");
}

namespace {

EmbeddingVector random_unit(Rng& rng, std::size_t dim) {
    EmbeddingVector v(dim);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            norm_sq += x * x;
        }
    } while (norm_sq <= 1e-12);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
}

std::string make_id(const char* prefix, std::size_t n) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, n);
    return buf;
}

} // namespace

SyntheticDataset generate_synthetic_dataset(const SyntheticWorldConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "synthetic"));

    // Mode centers, rejection-sampled to keep pairwise cosine distance at
    // least mode_separation.
    const std::size_t mode_count = cfg.category_count * cfg.modes_per_category;
    std::vector<EmbeddingVector> centers;
    centers.reserve(mode_count);
    std::size_t attempts = 0;
    while (centers.size() < mode_count) {
        if (++attempts > 1000 * mode_count)
            raise(Errc::kConfigError,
                  "synthetic: cannot place mode centers at the requested separation");
        EmbeddingVector candidate = random_unit(rng, cfg.feature_dim);
        bool ok = true;
        for (const auto& c : centers)
            if (1.0 - dot(candidate, c) < cfg.mode_separation) {
                ok = false;
                break;
            }
        if (ok) centers.push_back(std::move(candidate));
    }

    auto draw_near = [&](const EmbeddingVector& center) {
        EmbeddingVector v(cfg.feature_dim);
        for (std::size_t d = 0; d < cfg.feature_dim; ++d)
            v[d] = center[d] + cfg.mode_sigma * rng.gaussian();
        return l2_normalize(v);
    };

    SyntheticDataset out;
    std::size_t train_seq = 0, gallery_seq = 0, query_seq = 0;

    for (std::size_t k = 0; k < cfg.category_count; ++k)
        for (std::size_t m = 0; m < cfg.modes_per_category; ++m) {
            const std::size_t entity = k * cfg.modes_per_category + m;
            const auto& center = centers[entity];
            for (std::size_t i = 0; i < cfg.points_per_mode; ++i)
                out.train.push_back({make_id("tr", train_seq++), k, draw_near(center)});
            for (std::size_t i = 0; i < cfg.gallery_per_mode; ++i)
                out.gallery.push_back(
                    {make_id("ga", gallery_seq++), entity, draw_near(center)});
            for (std::size_t i = 0; i < cfg.queries_per_mode; ++i)
                out.queries.push_back(
                    {make_id("qu", query_seq++), entity, draw_near(center)});
        }

    // Mislabeled uniform noise, sized so it makes up noise_fraction of the
    // final train manifest.
    const double clean = static_cast<double>(out.train.size());
    const std::size_t noise_count = static_cast<std::size_t>(
        std::llround(clean * cfg.noise_fraction / (1.0 - cfg.noise_fraction)));
    for (std::size_t i = 0; i < noise_count; ++i)
        out.train.push_back({make_id("tr", train_seq++),
                             static_cast<std::uint64_t>(rng.index(cfg.category_count)),
                             random_unit(rng, cfg.feature_dim)});

    return out;
}

} // namespace landmark
