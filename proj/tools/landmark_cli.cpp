// landmark-cli: operator pipeline binding the library's C API into the
// generate -> train -> extract -> clean -> train -> eval -> ensemble flow.
//
// Exit codes: 0 success, 2 config error, 3 data-format error,
// 4 training-state error, 5 evaluation error, 1 anything else.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "landmark.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFormat = 3;
constexpr int kExitTrainState = 4;
constexpr int kExitEval = 5;
constexpr int kExitOther = 1;

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail(int exit_code, const std::string& message) {
    throw CliError{exit_code, message};
}

int exit_code_for(lm_status status) {
    switch (status) {
        case LM_OK: return kExitOk;
        case LM_ERR_CONFIG: return kExitConfig;
        case LM_ERR_IO:
        case LM_ERR_FORMAT: return kExitFormat;
        case LM_ERR_MISSING_CHECKPOINT: return kExitTrainState;
        case LM_ERR_ID_MISALIGNMENT: return kExitEval;
        default: return kExitOther;
    }
}

void check(lm_status status) {
    if (status != LM_OK) fail(exit_code_for(status), lm_error_message());
}

// Owned-handle helpers so error paths cannot leak.
using DatasetPtr = std::unique_ptr<lm_dataset, decltype(&lm_dataset_free)>;
using ImagePtr = std::unique_ptr<lm_image, decltype(&lm_image_free)>;
using HeadPtr = std::unique_ptr<lm_head, decltype(&lm_head_free)>;
using IndexPtr = std::unique_ptr<lm_index, decltype(&lm_index_free)>;
using SummaryPtr = std::unique_ptr<lm_summary, decltype(&lm_summary_free)>;
using ReportPtr = std::unique_ptr<lm_clean_report, decltype(&lm_clean_report_free)>;

DatasetPtr wrap(lm_dataset* p) { return {p, &lm_dataset_free}; }
ImagePtr wrap(lm_image* p) { return {p, &lm_image_free}; }
HeadPtr wrap(lm_head* p) { return {p, &lm_head_free}; }
IndexPtr wrap(lm_index* p) { return {p, &lm_index_free}; }
SummaryPtr wrap(lm_summary* p) { return {p, &lm_summary_free}; }
ReportPtr wrap(lm_clean_report* p) { return {p, &lm_clean_report_free}; }

DatasetPtr read_dataset(const std::string& path) {
    lm_dataset* ds = nullptr;
    check(lm_dataset_read(path.c_str(), &ds));
    return wrap(ds);
}

// Per-stage sub-seed, FNV-1a over the tag then splitmix64; mirrors the
// fan-out the library applies internally so CLI-side draws get their own
// independent stream.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t x = seed ^ h;
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/* ---------------- declarative pipeline config ---------------- */

struct AppConfig {
    std::uint64_t seed = 42;
    lm_dbscan_params dbscan{};
    double cutmix_fraction_lo = 0.3;
    double cutmix_fraction_hi = 0.7;
    lm_train_config train{};
    std::size_t stage1_epochs = 24;
    std::size_t stage2_epochs = 12;
    std::size_t eval_k = 100;
    lm_synthetic_config synthetic{};
};

AppConfig default_config() {
    AppConfig cfg;
    lm_dbscan_params_default(&cfg.dbscan);
    lm_train_config_default(&cfg.train);
    lm_synthetic_config_default(&cfg.synthetic);
    return cfg;
}

[[noreturn]] void config_fail(const std::string& path, const std::string& why) {
    fail(kExitConfig, "config: " + path + ": " + why);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::vector<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known)
            if (key == k) ok = true;
        if (!ok) config_fail(path + "." + key, "unknown key");
    }
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) config_fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& path, const std::string& key,
                        std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned())
        config_fail(path + "." + key, "expected a non-negative integer");
    return obj[key].get<std::uint64_t>();
}

AppConfig load_config(const std::string& config_path) {
    AppConfig cfg = default_config();
    if (config_path.empty()) return cfg;

    std::ifstream in(config_path);
    if (!in) fail(kExitConfig, "config: cannot open " + config_path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        config_fail(config_path, e.what());
    }
    if (!root.is_object()) config_fail(config_path, "top level must be an object");
    reject_unknown_keys(root, "", {"seed", "dbscan", "cutmix", "arcface", "train", "eval",
                                   "synthetic"});

    cfg.seed = get_count(root, "", "seed", cfg.seed);

    if (root.contains("dbscan")) {
        const json& j = root["dbscan"];
        reject_unknown_keys(j, "dbscan", {"eps", "relaxed_eps", "min_pts",
                                          "min_cluster_size"});
        cfg.dbscan.eps = get_number(j, "dbscan", "eps", cfg.dbscan.eps);
        cfg.dbscan.relaxed_eps = get_number(j, "dbscan", "relaxed_eps",
                                            cfg.dbscan.relaxed_eps);
        cfg.dbscan.min_pts = get_count(j, "dbscan", "min_pts", cfg.dbscan.min_pts);
        cfg.dbscan.min_cluster_size =
            get_count(j, "dbscan", "min_cluster_size", cfg.dbscan.min_cluster_size);
    }
    if (root.contains("cutmix")) {
        const json& j = root["cutmix"];
        reject_unknown_keys(j, "cutmix", {"fraction_lo", "fraction_hi"});
        cfg.cutmix_fraction_lo = get_number(j, "cutmix", "fraction_lo",
                                            cfg.cutmix_fraction_lo);
        cfg.cutmix_fraction_hi = get_number(j, "cutmix", "fraction_hi",
                                            cfg.cutmix_fraction_hi);
    }
    if (root.contains("arcface")) {
        const json& j = root["arcface"];
        reject_unknown_keys(j, "arcface", {"margin", "scale"});
        cfg.train.arcface_margin = get_number(j, "arcface", "margin",
                                              cfg.train.arcface_margin);
        cfg.train.arcface_scale = get_number(j, "arcface", "scale",
                                             cfg.train.arcface_scale);
    }
    if (root.contains("train")) {
        const json& j = root["train"];
        reject_unknown_keys(j, "train",
                            {"lr0", "poly_power", "batch_size", "stage1_epochs",
                             "stage2_epochs", "momentum", "weight_decay",
                             "embedding_dim", "bn_momentum", "bn_epsilon"});
        cfg.train.lr0 = get_number(j, "train", "lr0", cfg.train.lr0);
        cfg.train.poly_power = get_number(j, "train", "poly_power", cfg.train.poly_power);
        cfg.train.batch_size = get_count(j, "train", "batch_size", cfg.train.batch_size);
        cfg.stage1_epochs = get_count(j, "train", "stage1_epochs", cfg.stage1_epochs);
        cfg.stage2_epochs = get_count(j, "train", "stage2_epochs", cfg.stage2_epochs);
        cfg.train.momentum = get_number(j, "train", "momentum", cfg.train.momentum);
        cfg.train.weight_decay = get_number(j, "train", "weight_decay",
                                            cfg.train.weight_decay);
        cfg.train.embedding_dim = get_count(j, "train", "embedding_dim",
                                            cfg.train.embedding_dim);
        cfg.train.bn_momentum = get_number(j, "train", "bn_momentum",
                                           cfg.train.bn_momentum);
        cfg.train.bn_epsilon = get_number(j, "train", "bn_epsilon", cfg.train.bn_epsilon);
    }
    if (root.contains("eval")) {
        const json& j = root["eval"];
        reject_unknown_keys(j, "eval", {"k"});
        cfg.eval_k = get_count(j, "eval", "k", cfg.eval_k);
    }
    if (root.contains("synthetic")) {
        const json& j = root["synthetic"];
        reject_unknown_keys(j, "synthetic",
                            {"category_count", "modes_per_category", "points_per_mode",
                             "gallery_per_mode", "queries_per_mode", "mode_separation",
                             "mode_sigma", "noise_fraction", "feature_dim"});
        cfg.synthetic.category_count = get_count(j, "synthetic", "category_count",
                                                 cfg.synthetic.category_count);
        cfg.synthetic.modes_per_category = get_count(j, "synthetic", "modes_per_category",
                                                     cfg.synthetic.modes_per_category);
        cfg.synthetic.points_per_mode = get_count(j, "synthetic", "points_per_mode",
                                                  cfg.synthetic.points_per_mode);
        cfg.synthetic.gallery_per_mode = get_count(j, "synthetic", "gallery_per_mode",
                                                   cfg.synthetic.gallery_per_mode);
        cfg.synthetic.queries_per_mode = get_count(j, "synthetic", "queries_per_mode",
                                                   cfg.synthetic.queries_per_mode);
        cfg.synthetic.mode_separation = get_number(j, "synthetic", "mode_separation",
                                                   cfg.synthetic.mode_separation);
        cfg.synthetic.mode_sigma = get_number(j, "synthetic", "mode_sigma",
                                              cfg.synthetic.mode_sigma);
        cfg.synthetic.noise_fraction = get_number(j, "synthetic", "noise_fraction",
                                                  cfg.synthetic.noise_fraction);
        cfg.synthetic.feature_dim = get_count(j, "synthetic", "feature_dim",
                                              cfg.synthetic.feature_dim);
    }
    return cfg;
}

void validate_config(const AppConfig& cfg) {
    if (!(cfg.dbscan.eps > 0.0)) fail(kExitConfig, "config: dbscan.eps must be > 0");
    if (!(cfg.dbscan.relaxed_eps > cfg.dbscan.eps))
        fail(kExitConfig, "config: dbscan.relaxed_eps must exceed dbscan.eps");
    if (cfg.dbscan.min_pts < 1) fail(kExitConfig, "config: dbscan.min_pts must be >= 1");
    if (cfg.dbscan.min_cluster_size < 1)
        fail(kExitConfig, "config: dbscan.min_cluster_size must be >= 1");
    if (!(cfg.cutmix_fraction_lo > 0.0) ||
        cfg.cutmix_fraction_lo > cfg.cutmix_fraction_hi || cfg.cutmix_fraction_hi > 1.0)
        fail(kExitConfig, "config: cutmix fractions need 0 < lo <= hi <= 1");
    if (!(cfg.train.lr0 > 0.0)) fail(kExitConfig, "config: train.lr0 must be > 0");
    if (cfg.train.batch_size < 2) fail(kExitConfig, "config: train.batch_size must be >= 2");
    if (cfg.stage1_epochs < 1 || cfg.stage2_epochs < 1)
        fail(kExitConfig, "config: train epochs must be >= 1");
    if (cfg.eval_k < 1) fail(kExitConfig, "config: eval.k must be >= 1");
    if (!(cfg.synthetic.noise_fraction >= 0.0) || cfg.synthetic.noise_fraction >= 1.0)
        fail(kExitConfig, "config: synthetic.noise_fraction must be in [0, 1)");
    if (cfg.synthetic.category_count < 1 || cfg.synthetic.modes_per_category < 1 ||
        cfg.synthetic.points_per_mode < 1)
        fail(kExitConfig, "config: synthetic counts must be >= 1");
}

/* ---------------- shared command helpers ---------------- */

void write_split_manifest(const std::string& path,
                          const std::vector<std::pair<const lm_dataset*, const char*>>& splits) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(kExitOther, "cannot open for write: " + path);
    for (const auto& [ds, split] : splits) {
        for (size_t i = 0; i < lm_dataset_size(ds); ++i) {
            json row;
            row["id"] = lm_dataset_id(ds, i);
            row["label"] = lm_dataset_label(ds, i);
            row["split"] = split;
            out << row.dump() << "\n";
        }
    }
}

struct ImageManifestEntry {
    std::string id;
    std::uint64_t label;
    std::string path;
};

std::vector<ImageManifestEntry> read_image_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kExitFormat, "cannot open image manifest: " + path);
    const fs::path base = fs::path(path).parent_path();
    std::vector<ImageManifestEntry> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            fail(kExitFormat, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!row.is_object() || !row.contains("id") || !row.contains("label") ||
            !row.contains("path") || !row["id"].is_string() ||
            !row["label"].is_number_unsigned() || !row["path"].is_string())
            fail(kExitFormat, path + ":" + std::to_string(line_no) +
                                  ": need {id: string, label: uint, path: string}");
        ImageManifestEntry e;
        e.id = row["id"].get<std::string>();
        e.label = row["label"].get<std::uint64_t>();
        fs::path p = row["path"].get<std::string>();
        e.path = p.is_absolute() ? p.string() : (base / p).string();
        entries.push_back(std::move(e));
    }
    return entries;
}

DatasetPtr extract_manifest_features(const std::vector<ImageManifestEntry>& entries) {
    lm_dataset* ds = nullptr;
    check(lm_dataset_create(&ds));
    DatasetPtr out = wrap(ds);
    for (const auto& e : entries) {
        lm_image* raw = nullptr;
        check(lm_image_read(e.path.c_str(), &raw));
        ImagePtr img = wrap(raw);
        double feature[LM_TOY_FEATURE_DIM];
        check(lm_toy_extract_pooled(img.get(), feature));
        check(lm_dataset_add(out.get(), e.id.c_str(), e.label, feature,
                             LM_TOY_FEATURE_DIM));
    }
    return out;
}

void print_result_line(const lm_summary* summary) {
    char line[96];
    lm_summary_result_line(summary, line, sizeof line);
    std::printf("%s\n", line);
}

/* ---------------- subcommands ---------------- */

int cmd_generate(const AppConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    lm_synthetic_config sc = cfg.synthetic;
    sc.seed = cfg.seed;

    lm_dataset *train_raw = nullptr, *gallery_raw = nullptr, *queries_raw = nullptr;
    check(lm_generate_synthetic(&sc, &train_raw, &gallery_raw, &queries_raw));
    DatasetPtr train = wrap(train_raw), gallery = wrap(gallery_raw),
               queries = wrap(queries_raw);

    const fs::path dir(out_dir);
    check(lm_dataset_write(train.get(), (dir / "train.emb1").c_str()));
    check(lm_dataset_write(gallery.get(), (dir / "gallery.emb1").c_str()));
    check(lm_dataset_write(queries.get(), (dir / "queries.emb1").c_str()));
    write_split_manifest((dir / "manifest.jsonl").string(),
                         {{train.get(), "train"},
                          {gallery.get(), "gallery"},
                          {queries.get(), "query"}});

    std::printf("seed %" PRIu64 "\n", cfg.seed);
    std::printf("train %zu gallery %zu queries %zu dim %zu\n",
                lm_dataset_size(train.get()), lm_dataset_size(gallery.get()),
                lm_dataset_size(queries.get()), lm_dataset_dim(train.get()));
    return kExitOk;
}

int cmd_clean(const AppConfig& cfg, const std::string& input, const std::string& output,
              const std::string& report_path) {
    DatasetPtr manifest = read_dataset(input);

    lm_dataset* cleaned_raw = nullptr;
    lm_clean_report* report_raw = nullptr;
    check(lm_clean_dataset(manifest.get(), &cfg.dbscan, &cleaned_raw, &report_raw));
    DatasetPtr cleaned = wrap(cleaned_raw);
    ReportPtr report = wrap(report_raw);

    check(lm_dataset_write(cleaned.get(), output.c_str()));
    if (!report_path.empty())
        check(lm_clean_report_write(report.get(), report_path.c_str()));

    std::printf("input %zu kept %zu rescued %zu dropped %zu old_categories %zu "
                "new_categories %zu\n",
                lm_clean_report_input(report.get()), lm_clean_report_kept(report.get()),
                lm_clean_report_rescued(report.get()),
                lm_clean_report_dropped(report.get()),
                lm_clean_report_old_categories(report.get()),
                lm_clean_report_new_categories(report.get()));
    return kExitOk;
}

int cmd_augment_preview(const AppConfig& cfg, const std::string& image_a,
                        const std::string& image_b, const std::string& out_dir,
                        std::uint64_t preview_seed) {
    fs::create_directories(out_dir);
    lm_image* a_raw = nullptr;
    lm_image* b_raw = nullptr;
    check(lm_image_read(image_a.c_str(), &a_raw));
    ImagePtr a = wrap(a_raw);
    check(lm_image_read(image_b.c_str(), &b_raw));
    ImagePtr b = wrap(b_raw);

    lm_image *base_raw = nullptr, *mixed_raw = nullptr;
    int corner = 0;
    double fraction = 0.0;
    check(lm_make_mixed_sample(a.get(), b.get(), cfg.cutmix_fraction_lo,
                               cfg.cutmix_fraction_hi, preview_seed, &base_raw, &mixed_raw,
                               &corner, &fraction));
    ImagePtr base = wrap(base_raw), mixed = wrap(mixed_raw);

    const fs::path dir(out_dir);
    check(lm_image_write(base.get(), (dir / "base.ppm").c_str()));
    check(lm_image_write(mixed.get(), (dir / "mixed.ppm").c_str()));
    static const char* corner_names[] = {"top-left", "top-right", "bottom-left",
                                         "bottom-right"};
    std::printf("corner %s fraction %.6f\n", corner_names[corner & 3], fraction);
    return kExitOk;
}

int cmd_train(const AppConfig& cfg, int stage, const std::string& data_path,
              const std::string& images_path, const std::string& init_from,
              const std::string& out_path, const std::string& trace_path, bool cutmix) {
    lm_train_config tc = cfg.train;
    tc.seed = cfg.seed;
    tc.epochs = stage == 1 ? cfg.stage1_epochs : cfg.stage2_epochs;

    if (stage == 1) {
        if (data_path.empty()) fail(kExitConfig, "train stage 1 needs --data");
        DatasetPtr features = read_dataset(data_path);
        lm_head* head_raw = nullptr;
        check(lm_train_stage1(features.get(), &tc, &head_raw,
                              trace_path.empty() ? nullptr : trace_path.c_str()));
        HeadPtr head = wrap(head_raw);
        check(lm_head_save(head.get(), out_path.c_str()));
        std::printf("stage 1 trained on %zu samples, checkpoint %s\n",
                    lm_dataset_size(features.get()), out_path.c_str());
        return kExitOk;
    }

    // stage 2 requires the stage-1 checkpoint
    if (init_from.empty() || !fs::exists(init_from))
        fail(kExitTrainState, "train stage 2: missing stage-1 checkpoint (--init-from)");
    lm_head* head_raw = nullptr;
    check(lm_head_load(init_from.c_str(), &head_raw));
    HeadPtr head = wrap(head_raw);

    if (cutmix) {
        if (images_path.empty()) fail(kExitConfig, "train --cutmix needs --images");
        const auto entries = read_image_manifest(images_path);
        if (entries.size() < 2)
            fail(kExitFormat, "train --cutmix: need at least 2 images");

        // Deterministic partner/corner/fraction draws per image.
        std::mt19937_64 pair_rng(derive_seed(cfg.seed, "cutmix-pairs"));
        std::vector<double> base_feats, mixed_feats;
        std::vector<std::uint64_t> labels_a, labels_b;
        std::vector<ImagePtr> images;
        images.reserve(entries.size());
        for (const auto& e : entries) {
            lm_image* raw = nullptr;
            check(lm_image_read(e.path.c_str(), &raw));
            images.push_back(wrap(raw));
        }
        for (size_t i = 0; i < entries.size(); ++i) {
            size_t j = pair_rng() % (entries.size() - 1);
            if (j >= i) ++j;
            lm_image *base_raw = nullptr, *mixed_raw = nullptr;
            check(lm_make_mixed_sample(images[i].get(), images[j].get(),
                                       cfg.cutmix_fraction_lo, cfg.cutmix_fraction_hi,
                                       derive_seed(cfg.seed, "cutmix-" +
                                                                 std::to_string(i)),
                                       &base_raw, &mixed_raw, nullptr, nullptr));
            ImagePtr base = wrap(base_raw), mixed = wrap(mixed_raw);
            double fb[LM_TOY_FEATURE_DIM], fm[LM_TOY_FEATURE_DIM];
            check(lm_toy_extract_pooled(base.get(), fb));
            check(lm_toy_extract_pooled(mixed.get(), fm));
            base_feats.insert(base_feats.end(), fb, fb + LM_TOY_FEATURE_DIM);
            mixed_feats.insert(mixed_feats.end(), fm, fm + LM_TOY_FEATURE_DIM);
            labels_a.push_back(entries[i].label);
            labels_b.push_back(entries[j].label);
        }
        check(lm_train_stage2_dual(head.get(), base_feats.data(), mixed_feats.data(),
                                   labels_a.data(), labels_b.data(), entries.size(),
                                   LM_TOY_FEATURE_DIM, &tc,
                                   trace_path.empty() ? nullptr : trace_path.c_str()));
        check(lm_head_save(head.get(), out_path.c_str()));
        std::printf("stage 2 (cutmix) trained on %zu image pairs, checkpoint %s\n",
                    entries.size(), out_path.c_str());
        return kExitOk;
    }

    if (data_path.empty()) fail(kExitConfig, "train stage 2 needs --data");
    DatasetPtr features = read_dataset(data_path);
    check(lm_train_stage2(head.get(), features.get(), &tc,
                          trace_path.empty() ? nullptr : trace_path.c_str()));
    check(lm_head_save(head.get(), out_path.c_str()));
    std::printf("stage 2 trained on %zu samples, checkpoint %s\n",
                lm_dataset_size(features.get()), out_path.c_str());
    return kExitOk;
}

int cmd_extract(const std::string& features_path, const std::string& images_path,
                const std::string& head_path, const std::string& out_path) {
    DatasetPtr input = {nullptr, &lm_dataset_free};
    if (!features_path.empty()) {
        input = read_dataset(features_path);
    } else if (!images_path.empty()) {
        input = extract_manifest_features(read_image_manifest(images_path));
    } else {
        fail(kExitConfig, "extract needs --features or --images");
    }

    if (head_path.empty()) {
        check(lm_dataset_write(input.get(), out_path.c_str()));
        std::printf("extracted %zu raw features dim %zu\n", lm_dataset_size(input.get()),
                    lm_dataset_dim(input.get()));
        return kExitOk;
    }

    lm_head* head_raw = nullptr;
    check(lm_head_load(head_path.c_str(), &head_raw));
    HeadPtr head = wrap(head_raw);
    lm_dataset* emb_raw = nullptr;
    check(lm_head_embed(head.get(), input.get(), &emb_raw));
    DatasetPtr embeddings = wrap(emb_raw);
    check(lm_dataset_write(embeddings.get(), out_path.c_str()));
    std::printf("embedded %zu rows dim %zu\n", lm_dataset_size(embeddings.get()),
                lm_dataset_dim(embeddings.get()));
    return kExitOk;
}

int cmd_eval(const AppConfig& cfg, const std::string& gallery_path,
             const std::string& queries_path, const std::string& report_path) {
    DatasetPtr gallery = read_dataset(gallery_path);
    DatasetPtr queries = read_dataset(queries_path);

    lm_index* index_raw = nullptr;
    check(lm_index_build(gallery.get(), &index_raw));
    IndexPtr index = wrap(index_raw);
    lm_summary* summary_raw = nullptr;
    check(lm_evaluate(index.get(), queries.get(), cfg.eval_k, &summary_raw));
    SummaryPtr summary = wrap(summary_raw);

    if (!report_path.empty())
        check(lm_summary_write_report(summary.get(), report_path.c_str()));
    print_result_line(summary.get());
    return kExitOk;
}

int cmd_ensemble(const AppConfig& cfg, const std::string& gallery_a,
                 const std::string& gallery_b, const std::string& queries_a,
                 const std::string& queries_b, const std::string& report_path) {
    DatasetPtr ga = read_dataset(gallery_a);
    DatasetPtr gb = read_dataset(gallery_b);
    DatasetPtr qa = read_dataset(queries_a);
    DatasetPtr qb = read_dataset(queries_b);

    lm_summary* summary_raw = nullptr;
    check(lm_ensemble_evaluate(ga.get(), gb.get(), qa.get(), qb.get(), cfg.eval_k,
                               &summary_raw));
    SummaryPtr summary = wrap(summary_raw);

    if (!report_path.empty())
        check(lm_summary_write_report(summary.get(), report_path.c_str()));
    print_result_line(summary.get());
    return kExitOk;
}

int cmd_report(const std::string& dir) {
    bool found = false;
    auto dump_file = [&](const fs::path& path, const char* title) {
        std::ifstream in(path);
        if (!in) return;
        found = true;
        std::printf("== %s (%s)\n", title, path.c_str());
        std::string line;
        while (std::getline(in, line)) std::printf("%s\n", line.c_str());
    };
    auto tail_csv = [&](const fs::path& path, const char* title) {
        std::ifstream in(path);
        if (!in) return;
        found = true;
        std::string line, header, last;
        if (std::getline(in, header)) {
            while (std::getline(in, line))
                if (!line.empty()) last = line;
        }
        std::printf("== %s (%s)\n%s\n%s\n", title, path.c_str(), header.c_str(),
                    last.c_str());
    };
    const fs::path base(dir);
    dump_file(base / "clean_report.txt", "cleaning");
    tail_csv(base / "stage1_trace.csv", "stage 1 final step");
    tail_csv(base / "stage2_trace.csv", "stage 2 final step");
    dump_file(base / "eval_report.txt", "evaluation");
    if (!found) {
        std::printf("no pipeline artifacts found under %s\n", dir.c_str());
        return kExitOther;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landmark retrieval pipeline: embedding-cluster cleaning, Corner-Cutmix "
                 "dual-stream training, ArcFace head, mAP@100 evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
    app.add_option("--config", config_path, "pipeline config JSON")->expected(1);
    app.add_option_function<std::uint64_t>(
           "--seed",
           [&](std::uint64_t v) {
               seed_override = v;
               has_seed_override = true;
           },
           "override the top-level seed")
        ->expected(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic embedding dataset");
    std::string gen_out;
    gen->add_option("--out-dir", gen_out, "output directory")->required();

    // clean
    auto* clean = app.add_subcommand("clean", "embedding-cluster data cleaning");
    std::string clean_in, clean_out, clean_report;
    double opt_eps = -1.0, opt_relaxed = -1.0;
    std::int64_t opt_min_pts = -1, opt_min_cluster = -1;
    clean->add_option("--input", clean_in, "input EMB1 manifest")->required();
    clean->add_option("--output", clean_out, "cleaned EMB1 output")->required();
    clean->add_option("--report", clean_report, "relabel report path");
    clean->add_option("--eps", opt_eps, "strict cosine-distance radius");
    clean->add_option("--relaxed-eps", opt_relaxed, "rescue radius");
    clean->add_option("--min-pts", opt_min_pts, "core point threshold");
    clean->add_option("--min-cluster-size", opt_min_cluster, "category size floor");

    // augment-preview
    auto* preview = app.add_subcommand("augment-preview",
                                       "write a Corner-Cutmix before/after pair");
    std::string prev_a, prev_b, prev_out;
    preview->add_option("--image-a", prev_a, "overlay image (PPM/PGM)")->required();
    preview->add_option("--image-b", prev_b, "background image (PPM/PGM)")->required();
    preview->add_option("--out-dir", prev_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "train the metric head (stage 1 or 2)");
    int train_stage = 0;
    std::string train_data, train_images, train_init, train_out, train_trace;
    bool train_cutmix = false;
    train->add_option("--stage", train_stage, "1 or 2")->required();
    train->add_option("--data", train_data, "feature EMB1 file");
    train->add_option("--images", train_images, "image manifest JSONL (cutmix)");
    train->add_option("--init-from", train_init, "stage-1 checkpoint (stage 2)");
    train->add_option("--out", train_out, "checkpoint output path")->required();
    train->add_option("--trace", train_trace, "loss trace CSV path");
    train->add_flag("--cutmix", train_cutmix, "dual-stream Corner-Cutmix loss");

    // extract
    auto* extract = app.add_subcommand("extract", "extract features or head embeddings");
    std::string ext_features, ext_images, ext_head, ext_out;
    extract->add_option("--features", ext_features, "input feature EMB1");
    extract->add_option("--images", ext_images, "image manifest JSONL");
    extract->add_option("--head", ext_head, "head checkpoint");
    extract->add_option("--out", ext_out, "output EMB1")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "mAP@k retrieval evaluation");
    std::string eval_gallery, eval_queries, eval_report;
    eval->add_option("--gallery", eval_gallery, "gallery EMB1")->required();
    eval->add_option("--queries", eval_queries, "query EMB1")->required();
    eval->add_option("--report", eval_report, "evaluation report path");

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "two-model concatenation ensemble eval");
    std::string ens_ga, ens_gb, ens_qa, ens_qb, ens_report;
    ens->add_option("--gallery-a", ens_ga, "model A gallery EMB1")->required();
    ens->add_option("--gallery-b", ens_gb, "model B gallery EMB1")->required();
    ens->add_option("--queries-a", ens_qa, "model A query EMB1")->required();
    ens->add_option("--queries-b", ens_qb, "model B query EMB1")->required();
    ens->add_option("--report", ens_report, "evaluation report path");

    // report
    auto* report = app.add_subcommand("report", "summarize pipeline artifacts");
    std::string report_dir;
    report->add_option("--dir", report_dir, "pipeline output directory")->required();

    // eval k override
    std::int64_t opt_k = -1;
    eval->add_option("--k", opt_k, "ranking cutoff");
    ens->add_option("--k", opt_k, "ranking cutoff");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        AppConfig cfg = load_config(config_path);
        if (has_seed_override) cfg.seed = seed_override;
        if (clean->parsed()) {
            if (opt_eps > 0.0) cfg.dbscan.eps = opt_eps;
            if (opt_relaxed > 0.0) cfg.dbscan.relaxed_eps = opt_relaxed;
            if (opt_min_pts > 0) cfg.dbscan.min_pts = static_cast<size_t>(opt_min_pts);
            if (opt_min_cluster > 0)
                cfg.dbscan.min_cluster_size = static_cast<size_t>(opt_min_cluster);
        }
        if (opt_k > 0) cfg.eval_k = static_cast<size_t>(opt_k);
        validate_config(cfg);

        if (gen->parsed()) return cmd_generate(cfg, gen_out);
        if (clean->parsed()) return cmd_clean(cfg, clean_in, clean_out, clean_report);
        if (preview->parsed())
            return cmd_augment_preview(cfg, prev_a, prev_b, prev_out,
                                       derive_seed(cfg.seed, "augment-preview"));
        if (train->parsed()) {
            if (train_stage != 1 && train_stage != 2)
                fail(kExitConfig, "train: --stage must be 1 or 2");
            return cmd_train(cfg, train_stage, train_data, train_images, train_init,
                             train_out, train_trace, train_cutmix);
        }
        if (extract->parsed()) return cmd_extract(ext_features, ext_images, ext_head, ext_out);
        if (eval->parsed()) return cmd_eval(cfg, eval_gallery, eval_queries, eval_report);
        if (ens->parsed())
            return cmd_ensemble(cfg, ens_ga, ens_gb, ens_qa, ens_qb, ens_report);
        if (report->parsed()) return cmd_report(report_dir);
        return kExitConfig;
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOther;
    }
}
