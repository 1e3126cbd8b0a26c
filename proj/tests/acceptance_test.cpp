// Acceptance suite: one test case per criterion, each printing a single
// ACCEPTANCE line. Directional ablations run on pinned synthetic worlds; the
// numeric checks run at the stated tolerances.

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "cleaner/cleaning.hpp"
#include "core/embedding_io.hpp"
#include "core/vector_ops.hpp"
#include "cutmix/cutmix.hpp"
#include "eval/retrieval.hpp"
#include "extractor/extractor.hpp"
#include "extractor/synthetic.hpp"
#include "head/backward.hpp"
#include "head/trainer.hpp"
#include "test_util.hpp"

using namespace landmark;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("ACCEPTANCE criterion %d [%s] %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

int run_cli(const std::string& args, const std::string& out_file) {
    const std::string command =
        std::string(LANDMARK_CLI_BIN) + " " + args + " > " + out_file + " 2>&1";
    const int raw = std::system(command.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// ------------------------------------------------------------------
// shared helpers for the ablation criteria
// ------------------------------------------------------------------

std::vector<TrainSample> to_samples(const std::vector<LabeledEmbedding>& rows) {
    std::vector<TrainSample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.vector, r.label});
    return out;
}

double map_of(const TrainedHead& trained, const std::vector<LabeledEmbedding>& gallery,
              const std::vector<LabeledEmbedding>& queries) {
    const auto emb_g = embed_dataset(trained, gallery);
    const auto emb_q = embed_dataset(trained, queries);
    return evaluate(build_index(emb_g), emb_q, 100).mean_ap;
}

// Procedural category image: a per-category 4x4 color-block layout at 64x64
// with per-image jitter, so the toy extractor sees stable per-category patch
// statistics.
ImageGrid category_image(std::uint64_t category, std::uint64_t salt) {
    // Distinct per-category block layouts; a per-image crop offset (the
    // random-crop analog) moves block boundaries across feature cells so
    // within-category variation survives cell averaging.
    Rng layout_rng(derive_seed(category * 7919 + 13, "layout"));
    double blocks[5][5][3];
    for (auto& row : blocks)
        for (auto& cell : row)
            for (double& ch : cell) ch = layout_rng.uniform(0.05, 0.95);

    Rng jitter_rng(derive_seed(category * 104729 + salt, "jitter"));
    const int off_r = static_cast<int>(jitter_rng.index(17));
    const int off_c = static_cast<int>(jitter_rng.index(17));
    const double brightness = jitter_rng.uniform(-0.1, 0.1);
    ImageGrid img(64, 64, 3);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const double v = blocks[(r + off_r) / 16][(c + off_c) / 16][ch] +
                                 brightness + 0.05 * jitter_rng.gaussian();
                img.at(r, c, ch) = std::clamp(v, 0.0, 1.0);
            }
    return img;
}

} // namespace

TEST_CASE("criterion 1: dbscan equals the brute-force oracle") {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(9001);
    int instances = 0;
    bool all_equal = true;
    for (int trial = 0; trial < 55; ++trial) {
        const std::size_t dim = 2 + rng.index(7);
        const std::size_t n = 20 + rng.index(181); // 20..200
        const double eps = rng.uniform(0.05, 0.9);
        const std::size_t min_pts = 1 + rng.index(8);

        std::vector<LabeledEmbedding> points;
        std::size_t seq = 0;
        const std::size_t blobs = 1 + rng.index(5);
        for (std::size_t b = 0; b < blobs && points.size() < n; ++b) {
            const auto blob = testutil::make_blob(
                rng, testutil::unit_direction(rng, dim), rng.uniform(0.02, 0.35),
                std::min(n - points.size(), std::size_t(4) + rng.index(60)), "p", 0, seq);
            seq += blob.size();
            points.insert(points.end(), blob.begin(), blob.end());
        }
        while (points.size() < n) {
            char id[16];
            std::snprintf(id, sizeof id, "p%04zu", seq++);
            points.push_back({id, 0, testutil::unit_direction(rng, dim)});
        }

        const auto got = dbscan(points, eps, min_pts);
        std::map<std::string, int> got_map;
        for (const auto& e : got.entries) got_map[e.id] = e.cluster;
        if (got_map != testutil::oracle_dbscan(points, eps, min_pts)) all_equal = false;
        ++instances;
    }
    const double elapsed = seconds_since(start);
    const bool pass = all_equal && instances >= 50 && elapsed < 30.0;
    report(1, pass,
           "dbscan oracle equivalence: " + std::to_string(instances) +
               " instances exact, " + std::to_string(elapsed) + "s");
    CHECK(pass);
}

TEST_CASE("criterion 2: gradient suite against central finite differences") {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int configs = 0;

    auto loss_oracle = [](const MetricHead& head0, const ClassifierWeights& w,
                          const Matrix& xb, const Matrix& xm,
                          const std::vector<std::uint64_t>& la,
                          const std::vector<std::uint64_t>& lb, const LossConfig& cfg,
                          bool dual) {
        MetricHead head = head0;
        double base = 0.0, mix = 0.0;
        {
            const auto cache = head_forward(head, xb, Mode::kTrain);
            for (std::size_t i = 0; i < xb.rows; ++i) {
                EmbeddingVector e(cache.embeddings.row(i),
                                  cache.embeddings.row(i) + head.embedding_dim);
                const auto z = cfg.kind == LossKind::kSoftmax
                                   ? dot_logits(e, w)
                                   : arcface_logits(e, w, la[i], cfg.arcface);
                base += softmax_ce(z, la[i]);
            }
            base /= static_cast<double>(xb.rows);
        }
        if (dual) {
            const auto cache = head_forward(head, xm, Mode::kTrain);
            for (std::size_t i = 0; i < xm.rows; ++i) {
                EmbeddingVector e(cache.embeddings.row(i),
                                  cache.embeddings.row(i) + head.embedding_dim);
                if (cfg.kind == LossKind::kSoftmax) {
                    const auto z = dot_logits(e, w);
                    mix += 0.5 * softmax_ce(z, la[i]) + 0.5 * softmax_ce(z, lb[i]);
                } else {
                    mix += 0.5 * softmax_ce(arcface_logits(e, w, la[i], cfg.arcface),
                                            la[i]) +
                           0.5 * softmax_ce(arcface_logits(e, w, lb[i], cfg.arcface),
                                            lb[i]);
                }
            }
            mix /= static_cast<double>(xm.rows);
        }
        return base + mix;
    };

    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        for (LossKind kind : {LossKind::kSoftmax, LossKind::kArcFace}) {
            for (bool dual : {false, true}) {
                Rng rng(seed * 971 + (kind == LossKind::kArcFace ? 7 : 0) + (dual ? 3 : 0));
                MetricHead head = make_head(8, 8, 0.1, 1e-5, seed * 31 + 1);
                for (double& g : head.bn_gamma) g = rng.uniform(0.6, 1.4);
                for (double& b : head.bn_beta) b = rng.uniform(-0.3, 0.3);
                ClassifierWeights weights = make_classifier(4, 8, seed * 31 + 2);
                Matrix xb(4, 8), xm(4, 8);
                for (double& v : xb.data) v = rng.uniform(-1.0, 1.0);
                for (double& v : xm.data) v = rng.uniform(-1.0, 1.0);
                std::vector<std::uint64_t> la, lb;
                for (int i = 0; i < 4; ++i) {
                    la.push_back(rng.index(4));
                    lb.push_back(rng.index(4));
                }
                LossConfig cfg{kind, {0.3, seed % 2 == 0 ? 60.0 : 30.0}};

                MetricHead fwd = head;
                Gradients grads = zero_gradients(head, weights);
                if (dual)
                    backward_dual(fwd, weights, xb, xm, la, lb, cfg, grads);
                else
                    backward(fwd, weights, xb, la, cfg, grads);

                const double h = 1e-5;
                auto probe = [&](double* p, double analytic) {
                    const double saved = *p;
                    *p = saved + h;
                    const double up = loss_oracle(head, weights, xb, xm, la, lb, cfg, dual);
                    *p = saved - h;
                    const double down =
                        loss_oracle(head, weights, xb, xm, la, lb, cfg, dual);
                    *p = saved;
                    const double fd = (up - down) / (2.0 * h);
                    worst = std::max(worst,
                                     std::abs(analytic - fd) / std::max(1.0, std::abs(fd)));
                };
                for (std::size_t i = 0; i < head.projection.data.size(); ++i)
                    probe(&head.projection.data[i], grads.projection.data[i]);
                for (std::size_t i = 0; i < 8; ++i) {
                    probe(&head.bn_gamma[i], grads.bn_gamma[i]);
                    probe(&head.bn_beta[i], grads.bn_beta[i]);
                }
                for (std::size_t i = 0; i < weights.rows.data.size(); ++i)
                    probe(&weights.rows.data[i], grads.classifier.data[i]);
                ++configs;
            }
        }
    }

    const double elapsed = seconds_since(start);
    const bool pass = worst <= 1e-4 && configs >= 20 && elapsed < 60.0;
    report(2, pass,
           "gradient suite: " + std::to_string(configs) + " configs, max rel err " +
               std::to_string(worst) + ", " + std::to_string(elapsed) + "s");
    CHECK(pass);
}

TEST_CASE("criterion 3: arcface reductions") {
    Rng rng(9003);
    bool zero_margin_exact = true;
    ClassifierWeights w;
    w.rows = Matrix(6, 16);
    for (double& v : w.rows.data) v = rng.uniform(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const EmbeddingVector e = testutil::unit_direction(rng, 16);
        const EmbeddingVector cos = cosine_logits(e, w);
        const EmbeddingVector z = arcface_logits(e, w, rng.index(6), {0.0, 30.0});
        for (std::size_t j = 0; j < 6; ++j)
            if (std::abs(z[j] - 30.0 * cos[j]) > 1e-12) zero_margin_exact = false;
    }

    ClassifierWeights aligned;
    aligned.rows = Matrix(4, 16);
    for (std::size_t j = 0; j < 4; ++j) aligned.rows.at(j, j) = 2.5;
    EmbeddingVector e(16, 0.0);
    e[2] = 1.0;
    const double target_logit = arcface_logits(e, aligned, 2, {0.3, 30.0})[2];
    const double want = 30.0 * std::cos(0.3);
    const bool aligned_ok = std::abs(target_logit - want) <= 1e-4;

    const bool pass = zero_margin_exact && aligned_ok;
    report(3, pass,
           "arcface reductions: m=0 exact, aligned target " +
               std::to_string(target_logit) + " vs 30*cos(0.3) = " +
               std::to_string(want));
    CHECK(pass);
}

TEST_CASE("criterion 4: mAP@100 oracle") {
    auto ranked = [](const std::string& pattern) {
        RankedResult r;
        r.query_id = "q";
        int rel = 0, irr = 0;
        double sim = 1.0;
        for (char c : pattern) {
            sim -= 0.01;
            r.hits.push_back({(c == 'R' ? "r" + std::to_string(rel++)
                                        : "n" + std::to_string(irr++)),
                              sim});
        }
        return r;
    };
    auto rel_ids = [](int count) {
        std::set<std::string> out;
        for (int i = 0; i < count; ++i) out.insert("r" + std::to_string(i));
        return out;
    };

    struct Case {
        std::string pattern;
        int relevant;
        std::size_t k;
        double want;
    };
    const std::vector<Case> cases = {
        {"R", 1, 100, 1.0},
        {"NR", 1, 100, 0.5},
        {"RNR", 2, 100, 5.0 / 6.0},
        {"NNR", 1, 100, 1.0 / 3.0},
        {"RRNN", 2, 100, 1.0},
        {"NRR", 2, 100, 7.0 / 12.0},
        {"RNNRR", 3, 100, 0.7},
        {"RNR", 3, 3, 5.0 / 9.0},
        {"NNN", 2, 100, 0.0},
        {"NRNR", 2, 2, 0.25},
        {"NRNRNR", 3, 100, 0.5},
        {"RRN", 5, 3, 2.0 / 3.0},
    };
    bool crafted_ok = true;
    for (const auto& c : cases) {
        const auto ap = ap_at_k(ranked(c.pattern), rel_ids(c.relevant), c.k);
        if (!ap || std::abs(*ap - c.want) > 1e-9) crafted_ok = false;
    }

    // evaluate vs an independent scripted recomputation on 20-class blobs
    Rng rng(9004);
    std::vector<LabeledEmbedding> gallery, queries;
    std::size_t gseq = 0, qseq = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto center = testutil::unit_direction(rng, 16);
        for (auto& row : testutil::make_blob(rng, center, 0.18, 10, "g", k, gseq))
            gallery.push_back(row);
        gseq += 10;
        for (auto& row : testutil::make_blob(rng, center, 0.18, 5, "q", k, qseq))
            queries.push_back(row);
        qseq += 5;
    }
    const EvalSummary got = evaluate(build_index(gallery), queries, 100);

    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& q : queries) {
        double qn = 0.0;
        for (double x : q.vector) qn += x * x;
        qn = std::sqrt(qn);
        std::vector<std::pair<double, std::size_t>> scored;
        std::size_t relevant_total = 0;
        for (std::size_t g = 0; g < gallery.size(); ++g) {
            if (gallery[g].id == q.id) continue;
            if (gallery[g].label == q.label) ++relevant_total;
            double gn = 0.0, prod = 0.0;
            for (std::size_t d = 0; d < 16; ++d) {
                gn += gallery[g].vector[d] * gallery[g].vector[d];
                prod += gallery[g].vector[d] * q.vector[d];
            }
            scored.emplace_back(prod / (std::sqrt(gn) * qn), g);
        }
        if (relevant_total == 0) continue;
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first
                                      : gallery[a.second].id < gallery[b.second].id;
        });
        double ap = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < std::min<std::size_t>(100, scored.size()); ++i)
            if (gallery[scored[i].second].label == q.label) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(i + 1);
            }
        sum += ap / static_cast<double>(std::min<std::size_t>(relevant_total, 100));
        ++defined;
    }
    const double want_map = sum / static_cast<double>(defined);
    const bool eval_ok = std::abs(got.mean_ap - want_map) <= 1e-9 &&
                         got.defined_count == defined;

    const bool pass = crafted_ok && eval_ok;
    report(4, pass,
           "mAP oracle: " + std::to_string(cases.size()) + " crafted rankings, synthetic "
           "mAP " + std::to_string(got.mean_ap) + " vs scripted " +
               std::to_string(want_map));
    CHECK(pass);
}

TEST_CASE("criterion 5: cleaning ablation improves mAP on the two-mode world") {
    const auto start = std::chrono::steady_clock::now();
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticWorldConfig world;
        world.category_count = 8;
        world.modes_per_category = 2;
        world.points_per_mode = 18;
        world.gallery_per_mode = 6;
        world.queries_per_mode = 3;
        world.mode_separation = 0.9;
        world.mode_sigma = 0.05;
        world.noise_fraction = 0.25;
        world.feature_dim = 32;
        world.seed = 5000 + seed;
        const SyntheticDataset data = generate_synthetic_dataset(world);

        const auto [cleaned, rep] = clean_dataset(data.train, DbscanParams{});

        TrainConfig cfg;
        cfg.embedding_dim = 16;
        cfg.batch_size = 16;
        cfg.stage1_epochs = 8;
        cfg.stage2_epochs = 40; // long enough for merged labels to collapse modes
        cfg.lr0 = 0.05;
        cfg.seed = 900 + seed;

        const TrainedHead stage1 = train_stage1(to_samples(data.train), cfg, nullptr);

        TrainedHead noisy_arm = stage1;
        train_stage2(noisy_arm, to_samples(data.train), cfg, nullptr);
        const double map_noisy = map_of(noisy_arm, data.gallery, data.queries);

        TrainedHead clean_arm = stage1;
        train_stage2(clean_arm, to_samples(cleaned), cfg, nullptr);
        const double map_clean = map_of(clean_arm, data.gallery, data.queries);

        if (map_clean > map_noisy) ++wins;
        detail += " s" + std::to_string(seed) + ":" + std::to_string(map_noisy) + "->" +
                  std::to_string(map_clean);
    }
    const double elapsed = seconds_since(start);
    const bool pass = wins >= 4 && elapsed < 300.0;
    report(5, pass,
           "cleaning ablation: " + std::to_string(wins) + "/5 seeds improved," + detail +
               ", " + std::to_string(elapsed) + "s");
    CHECK(pass);
}

TEST_CASE("criterion 6: cutmix ablation on corner-occluded queries") {
    const auto start = std::chrono::steady_clock::now();
    const ToyExtractor extractor;
    const std::size_t categories = 8;
    int wins = 0;
    std::string detail;

    // Spatially resolved features (the flattened 4x4x64 grid) rather than
    // pooled ones: corner occlusion corrupts specific cells, which is the
    // structure the dual-stream loss can learn to be robust against.
    auto grid_features = [&](const ImageGrid& img) {
        const FeatureGrid grid = extractor.extract(img);
        return EmbeddingVector(grid.values.begin(), grid.values.end());
    };

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(derive_seed(7000 + seed, "cutmix-ablation"));

        // train/gallery images are clean; queries get a distractor pasted
        // over a random corner
        std::vector<std::pair<ImageGrid, std::uint64_t>> train_images;
        std::vector<LabeledEmbedding> gallery, queries;
        std::size_t gseq = 0, qseq = 0;
        for (std::uint64_t k = 0; k < categories; ++k) {
            for (std::uint64_t i = 0; i < 12; ++i)
                train_images.emplace_back(category_image(k, seed * 100 + i), k);
            for (std::uint64_t i = 0; i < 5; ++i) {
                char id[24];
                std::snprintf(id, sizeof id, "g%05zu", gseq++);
                gallery.push_back(
                    {id, k, grid_features(category_image(k, seed * 100 + 50 + i))});
            }
            for (std::uint64_t i = 0; i < 3; ++i) {
                const ImageGrid base = category_image(k, seed * 100 + 80 + i);
                // foreground-style occluder: content from outside the
                // gallery's categories
                const ImageGrid distractor = category_image(
                    categories + rng.index(4), seed * 100 + 90 + i);
                const Corner corner = static_cast<Corner>(rng.index(4));
                const ImageGrid occluded = corner_cutmix(distractor, base, corner, 0.6);
                char id[24];
                std::snprintf(id, sizeof id, "q%05zu", qseq++);
                queries.push_back({id, k, grid_features(occluded)});
            }
        }

        // Dual-stream pairs: each train image mixed over partners from other
        // categories, three draws per image. The baseline arm trains on the
        // identical base stream, so the two arms differ only in the added
        // mixed-stream loss.
        std::vector<DualFeatureSample> dual;
        std::vector<TrainSample> base_only;
        for (std::size_t i = 0; i < train_images.size(); ++i) {
            const EmbeddingVector base_feature = grid_features(train_images[i].first);
            for (int rep = 0; rep < 3; ++rep) {
                std::size_t j = rng.index(train_images.size() - 1);
                if (j >= i) ++j;
                // patch area near one half, matching the fixed 0.5/0.5
                // label weights
                const MixedSample sample = make_mixed_sample(
                    train_images[i].first, train_images[i].second, train_images[j].first,
                    train_images[j].second, 0.65, 0.75, rng.next());
                DualFeatureSample d;
                d.base = base_feature;
                d.mixed = grid_features(sample.mixed);
                d.label_a = sample.label_a;
                d.label_b = sample.label_b;
                base_only.push_back({d.base, d.label_a});
                dual.push_back(std::move(d));
            }
        }

        TrainConfig cfg;
        cfg.embedding_dim = 32;
        cfg.batch_size = 16;
        cfg.stage1_epochs = 6;
        cfg.stage2_epochs = 6;
        cfg.lr0 = 0.05;
        cfg.seed = 700 + seed;

        const TrainedHead stage1 = train_stage1(base_only, cfg, nullptr);

        // gentle finetune for both arms: lower lr, slow BN drift
        TrainConfig stage2_cfg = cfg;
        stage2_cfg.lr0 = 0.01;
        stage2_cfg.bn_momentum = 0.02;

        TrainedHead baseline = stage1;
        train_stage2(baseline, base_only, stage2_cfg, nullptr);
        const double map_plain = map_of(baseline, gallery, queries);

        TrainedHead mixed_arm = stage1;
        train_stage2_dual(mixed_arm, dual, stage2_cfg, nullptr);
        const double map_mixed = map_of(mixed_arm, gallery, queries);

        if (map_mixed >= map_plain) ++wins;
        detail += " s" + std::to_string(seed) + ":" + std::to_string(map_plain) + "->" +
                  std::to_string(map_mixed);
    }
    const double elapsed = seconds_since(start);
    const bool pass = wins >= 4 && elapsed < 300.0;
    report(6, pass,
           "cutmix ablation: " + std::to_string(wins) + "/5 seeds at least as good," +
               detail + ", " + std::to_string(elapsed) + "s");
    CHECK(pass);
}

TEST_CASE("criterion 7: ensemble direction") {
    Rng rng(9007);
    std::vector<std::vector<double>> proj_a(12, std::vector<double>(24));
    std::vector<std::vector<double>> proj_b(12, std::vector<double>(24));
    for (auto& row : proj_a)
        for (double& v : row) v = rng.gaussian();
    for (auto& row : proj_b)
        for (double& v : row) v = rng.gaussian();
    auto project = [](const std::vector<std::vector<double>>& proj,
                      const EmbeddingVector& x) {
        EmbeddingVector out(proj.size(), 0.0);
        for (std::size_t r = 0; r < proj.size(); ++r)
            for (std::size_t d = 0; d < x.size(); ++d) out[r] += proj[r][d] * x[d];
        return l2_normalize(out);
    };

    std::vector<LabeledEmbedding> ga, gb, qa, qb;
    std::size_t seq = 0;
    for (std::uint64_t k = 0; k < 8; ++k) {
        const auto center = testutil::unit_direction(rng, 24);
        for (auto& row : testutil::make_blob(rng, center, 0.3, 10, "g", k, seq)) {
            ga.push_back({row.id, k, project(proj_a, row.vector)});
            gb.push_back({row.id, k, project(proj_b, row.vector)});
        }
        seq += 10;
        for (auto& row : testutil::make_blob(rng, center, 0.3, 4, "q", k, seq)) {
            qa.push_back({row.id, k, project(proj_a, row.vector)});
            qb.push_back({row.id, k, project(proj_b, row.vector)});
        }
        seq += 4;
    }

    const double map_a = evaluate(build_index(ga), qa, 100).mean_ap;
    const double map_b = evaluate(build_index(gb), qb, 100).mean_ap;
    const double fused = ensemble_evaluate(ga, gb, qa, qb, 100).mean_ap;
    const bool never_below = fused >= std::min(map_a, map_b) - 1e-12;

    // duplicated-model fusion reproduces single-model rankings exactly
    bool rankings_match = true;
    const RetrievalIndex plain = build_index(ga);
    std::vector<LabeledEmbedding> doubled;
    for (const auto& g : ga)
        doubled.push_back({g.id, g.label, concat_embeddings(g.vector, g.vector, true)});
    const RetrievalIndex fused_index = build_index(doubled);
    for (const auto& q : qa) {
        const auto lhs = search(plain, q.vector, 80);
        const auto rhs = search(fused_index, concat_embeddings(q.vector, q.vector, true), 80);
        if (lhs.hits.size() != rhs.hits.size()) rankings_match = false;
        for (std::size_t i = 0; rankings_match && i < lhs.hits.size(); ++i)
            if (lhs.hits[i].gallery_id != rhs.hits[i].gallery_id) rankings_match = false;
    }

    const bool pass = never_below && rankings_match;
    report(7, pass,
           "ensemble: singles " + std::to_string(map_a) + "/" + std::to_string(map_b) +
               ", fused " + std::to_string(fused) + ", duplication " +
               (rankings_match ? "exact" : "broken"));
    CHECK(pass);
}

TEST_CASE("criterion 8: corner-cutmix pixel provenance, exhaustive") {
    Rng rng(9008);
    bool pass = true;
    std::size_t checked = 0;
    for (int img_trial = 0; img_trial < 3 && pass; ++img_trial) {
        ImageGrid a(16, 16, 3), b(16, 16, 3);
        for (double& p : a.pixels) p = rng.uniform();
        for (double& p : b.pixels) p = rng.uniform();
        for (int corner = 0; corner < 4 && pass; ++corner) {
            for (double fraction : {0.1, 0.25, 0.5, 0.75, 1.0}) {
                const ImageGrid mixed =
                    corner_cutmix(a, b, static_cast<Corner>(corner), fraction);
                const int ph = std::max(1, static_cast<int>(std::floor(fraction * 16 + 0.5)));
                const int pw = ph;
                const int r0 = corner < 2 ? 0 : 16 - ph;
                const int c0 = (corner == 0 || corner == 2) ? 0 : 16 - pw;
                const ImageGrid patch = resize_bilinear(a, ph, pw);
                for (int r = 0; r < 16; ++r)
                    for (int c = 0; c < 16; ++c)
                        for (int ch = 0; ch < 3; ++ch) {
                            const bool inside =
                                r >= r0 && r < r0 + ph && c >= c0 && c < c0 + pw;
                            const double want = inside ? patch.at(r - r0, c - c0, ch)
                                                       : b.at(r, c, ch);
                            if (mixed.at(r, c, ch) != want) pass = false;
                            ++checked;
                        }
            }
        }
    }
    report(8, pass,
           "pixel provenance: " + std::to_string(checked) +
               " pixels traced bit-exactly, zero blends");
    CHECK(pass);
}

TEST_CASE("criterion 9: format round-trip and end-to-end determinism") {
    // EMB1 bit-exact round trip over random payloads
    testutil::TempDir dir("accept9");
    Rng rng(9009);
    bool roundtrip_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<LabeledEmbedding> rows;
        const std::size_t count = rng.index(10);
        const std::size_t dim = 1 + rng.index(24);
        for (std::size_t i = 0; i < count; ++i) {
            LabeledEmbedding row;
            row.id = "r" + std::to_string(trial) + "-" + std::to_string(i);
            row.label = rng.next();
            row.vector.resize(dim);
            for (double& v : row.vector)
                v = static_cast<double>(static_cast<float>(rng.uniform(-50.0, 50.0)));
            rows.push_back(std::move(row));
        }
        const std::string path = dir.file("rt.emb1");
        write_embeddings(path, rows);
        const auto back = read_embeddings(path);
        if (back.size() != rows.size()) roundtrip_ok = false;
        for (std::size_t i = 0; roundtrip_ok && i < rows.size(); ++i)
            if (back[i].id != rows[i].id || back[i].label != rows[i].label ||
                back[i].vector != rows[i].vector)
                roundtrip_ok = false;
    }

    // identical seeds give byte-identical pipeline outputs end to end
    const std::string cfg_path = dir.file("cfg.json");
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"train": {"stage1_epochs": 4, "stage2_epochs": 4,
                             "embedding_dim": 16, "lr0": 0.05},
                   "synthetic": {"category_count": 4, "points_per_mode": 8,
                                 "gallery_per_mode": 3, "queries_per_mode": 2,
                                 "feature_dim": 16}})";
    }
    bool pipeline_ok = true;
    for (const char* run : {"A", "B"}) {
        const std::string base = dir.file(run);
        std::filesystem::create_directories(base);
        const std::string common = "--config " + cfg_path + " --seed 13 ";
        if (run_cli(common + "generate --out-dir " + base, dir.file("log1")) != 0)
            pipeline_ok = false;
        if (run_cli(common + "clean --input " + base + "/train.emb1 --output " + base +
                        "/clean.emb1 --report " + base + "/clean_report.txt",
                    dir.file("log2")) != 0)
            pipeline_ok = false;
        if (run_cli(common + "train --stage 1 --data " + base + "/train.emb1 --out " +
                        base + "/h1.bin --trace " + base + "/stage1_trace.csv",
                    dir.file("log3")) != 0)
            pipeline_ok = false;
        if (run_cli(common + "train --stage 2 --data " + base + "/clean.emb1 "
                        "--init-from " + base + "/h1.bin --out " + base +
                        "/h2.bin --trace " + base + "/stage2_trace.csv",
                    dir.file("log4")) != 0)
            pipeline_ok = false;
        if (run_cli(common + "extract --features " + base + "/gallery.emb1 --head " +
                        base + "/h2.bin --out " + base + "/emb_g.emb1",
                    dir.file("log5")) != 0)
            pipeline_ok = false;
        if (run_cli(common + "extract --features " + base + "/queries.emb1 --head " +
                        base + "/h2.bin --out " + base + "/emb_q.emb1",
                    dir.file("log6")) != 0)
            pipeline_ok = false;
        if (run_cli(common + "eval --gallery " + base + "/emb_g.emb1 --queries " + base +
                        "/emb_q.emb1 --report " + base + "/eval_report.txt",
                    dir.file("log7")) != 0)
            pipeline_ok = false;
    }
    bool identical = pipeline_ok;
    for (const char* name :
         {"/train.emb1", "/gallery.emb1", "/queries.emb1", "/manifest.jsonl",
          "/clean.emb1", "/clean_report.txt", "/h1.bin", "/h2.bin",
          "/stage1_trace.csv", "/stage2_trace.csv", "/emb_g.emb1", "/emb_q.emb1",
          "/eval_report.txt"}) {
        if (testutil::slurp(dir.file("A") + name) != testutil::slurp(dir.file("B") + name))
            identical = false;
    }

    const bool pass = roundtrip_ok && pipeline_ok && identical;
    report(9, pass,
           std::string("format/determinism: round-trip ") +
               (roundtrip_ok ? "exact" : "broken") + ", pipeline reruns " +
               (identical ? "byte-identical" : "diverged"));
    CHECK(pass);
}

TEST_CASE("criterion 10: two-stage contract on the separable toy") {
    Rng rng(9010);
    std::vector<TrainSample> data;
    for (std::uint64_t k = 0; k < 3; ++k) {
        EmbeddingVector center(8, 0.0);
        center[k * 2] = 1.0;
        center[k * 2 + 1] = k == 1 ? -1.0 : 1.0;
        for (int i = 0; i < 20; ++i) {
            EmbeddingVector f(8);
            for (std::size_t d = 0; d < 8; ++d) f[d] = center[d] + 0.08 * rng.gaussian();
            data.push_back({std::move(f), k});
        }
    }
    rng.shuffle(data);

    TrainConfig cfg;
    cfg.embedding_dim = 16;
    cfg.batch_size = 16;
    cfg.stage1_epochs = 50; // 200 steps
    cfg.stage2_epochs = 30;
    cfg.lr0 = 0.05;
    cfg.seed = 7;

    TrainedHead trained = train_stage1(data, cfg, nullptr);
    const double accuracy = classification_accuracy(trained, data);
    const double cosine_before = mean_intra_class_cosine(trained, data);

    train_stage2(trained, data, cfg, nullptr);
    const double cosine_after = mean_intra_class_cosine(trained, data);

    const bool pass = accuracy >= 0.99 && cosine_after > cosine_before;
    report(10, pass,
           "two-stage contract: stage-1 accuracy " + std::to_string(accuracy) +
               ", intra-class cosine " + std::to_string(cosine_before) + " -> " +
               std::to_string(cosine_after));
    CHECK(pass);
}
