#include <doctest.h>

#include <cmath>

#include "core/vector_ops.hpp"
#include "test_util.hpp"

using namespace landmark;

TEST_CASE("l2_normalize on the 3-4-5 triangle") {
    const EmbeddingVector out = l2_normalize({3.0, 4.0});
    CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("l2_normalize keeps unit vectors") {
    const EmbeddingVector out = l2_normalize({1.0, 0.0, 0.0});
    CHECK(out == EmbeddingVector{1.0, 0.0, 0.0});
}

TEST_CASE("l2_normalize random 512-d vectors have unit norm") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        EmbeddingVector v(512);
        for (double& x : v) x = rng.uniform(-5.0, 5.0);
        const EmbeddingVector out = l2_normalize(v);
        CHECK(std::abs(l2_norm(out) - 1.0) < 1e-6);
        // direction preserved
        CHECK(cosine_similarity(v, out) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("l2_normalize is idempotent") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        EmbeddingVector v(16);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        const auto once = l2_normalize(v);
        const auto twice = l2_normalize(once);
        for (std::size_t i = 0; i < v.size(); ++i)
            CHECK(std::abs(once[i] - twice[i]) < 1e-9);
    }
}

TEST_CASE("l2_normalize rejects zero vectors") {
    CHECK_THROWS_AS(l2_normalize({0.0, 0.0}), Error);
    try {
        l2_normalize({0.0, 0.0, 0.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kZeroVector);
    }
}

TEST_CASE("cosine_similarity basics") {
    CHECK(cosine_similarity({2.0, -1.0, 0.5}, {2.0, -1.0, 0.5}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({1.0, 1.0}, {1.0, 0.0}) ==
          doctest::Approx(0.70710678).epsilon(1e-9));
}

TEST_CASE("cosine_similarity errors") {
    CHECK_THROWS_AS(cosine_similarity({1.0}, {1.0, 2.0}), Error);
    try {
        cosine_similarity({1.0, 2.0, 3.0}, {1.0, 2.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kDimMismatch);
    }
    try {
        cosine_similarity({0.0, 0.0}, {1.0, 0.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kZeroVector);
    }
}

TEST_CASE("cosine_similarity equals dot of normalized vectors, symmetric, clamped") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        EmbeddingVector a(24), b(24);
        for (double& x : a) x = rng.uniform(-2.0, 2.0);
        for (double& x : b) x = rng.uniform(-2.0, 2.0);
        const double c = cosine_similarity(a, b);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
        CHECK(c == cosine_similarity(b, a));
        CHECK(std::abs(c - dot(l2_normalize(a), l2_normalize(b))) < 1e-9);
        // scale invariance
        EmbeddingVector a2 = a, b2 = b;
        for (double& x : a2) x *= 3.7;
        for (double& x : b2) x *= 0.01;
        CHECK(std::abs(cosine_similarity(a2, b2) - c) < 1e-9);
    }
}

TEST_CASE("gap_pool on tiny grids") {
    FeatureGrid one(1, 1, 3);
    one.at(0, 0, 0) = 2.0;
    one.at(0, 0, 1) = 4.0;
    one.at(0, 0, 2) = 6.0;
    CHECK(gap_pool(one) == EmbeddingVector{2.0, 4.0, 6.0});

    FeatureGrid grid(2, 2, 1);
    grid.at(0, 0, 0) = 1.0;
    grid.at(0, 1, 0) = 2.0;
    grid.at(1, 0, 0) = 3.0;
    grid.at(1, 1, 0) = 4.0;
    CHECK(gap_pool(grid) == EmbeddingVector{2.5});
}

TEST_CASE("gap_pool matches a scalar-loop oracle on a random grid") {
    Rng rng(14);
    FeatureGrid grid(4, 4, 8);
    for (double& v : grid.values) v = rng.uniform(-3.0, 3.0);
    const EmbeddingVector out = gap_pool(grid);

    for (int ch = 0; ch < 8; ++ch) {
        double sum = 0.0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) sum += grid.at(r, c, ch);
        CHECK(out[static_cast<std::size_t>(ch)] ==
              doctest::Approx(sum / 16.0).epsilon(1e-12));
    }
}

TEST_CASE("gem_pool with p=1 equals gap_pool exactly on non-negative grids") {
    Rng rng(15);
    FeatureGrid grid(3, 5, 4);
    for (double& v : grid.values) v = rng.uniform(0.0, 2.0);
    CHECK(gem_pool(grid, 1.0) == gap_pool(grid));
}

TEST_CASE("gem_pool hand-computed values") {
    FeatureGrid ones(2, 2, 1);
    for (double& v : ones.values) v = 1.0;
    CHECK(gem_pool(ones, 3.0)[0] == doctest::Approx(1.0).epsilon(1e-12));

    FeatureGrid grid(2, 2, 1);
    grid.at(1, 1, 0) = 2.0;
    // (2^3 / 4)^(1/3) = 2^(1/3)
    CHECK(gem_pool(grid, 3.0)[0] == doctest::Approx(1.2599210498948732).epsilon(1e-9));
}

TEST_CASE("gem_pool rejects p < 1") {
    FeatureGrid grid(1, 1, 1);
    try {
        gem_pool(grid, 0.5);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kInvalidP);
    }
}

TEST_CASE("concat_embeddings") {
    CHECK(concat_embeddings({1.0, 0.0}, {0.0, 1.0}, false) ==
          EmbeddingVector{1.0, 0.0, 0.0, 1.0});

    // unit u ++ u renormalized is (u, u) / sqrt(2)
    const EmbeddingVector u = l2_normalize({1.0, 2.0, -1.0});
    const EmbeddingVector fused = concat_embeddings(u, u, true);
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(fused[i] == doctest::Approx(u[i] / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(fused[u.size() + i] == doctest::Approx(u[i] / std::sqrt(2.0)).epsilon(1e-12));
    }

    Rng rng(16);
    const auto a = testutil::unit_direction(rng, 512);
    const auto b = testutil::unit_direction(rng, 512);
    const auto big = concat_embeddings(a, b, true);
    CHECK(big.size() == 1024);
    CHECK(std::abs(l2_norm(big) - 1.0) < 1e-6);

    try {
        concat_embeddings({0.0}, {0.0}, true);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kZeroVector);
    }
}
