#include <catch2/catch_amalgamated.hpp>

#include <mbcr/mds.hpp>

#include <random>

using namespace mbcr;

namespace {

// Laplace-expansion determinant, an oracle independent of the rank-based path.
FieldElement det(const FieldMatrix& A) {
    const int n = A.rows();
    if (n == 1)
        return A.at(0, 0);
    FieldElement acc(0, A.field());
    for (int c = 0; c < n; ++c) {
        FieldMatrix minor(n - 1, n - 1, A.field());
        for (int i = 1; i < n; ++i)
            for (int j = 0, mj = 0; j < n; ++j)
                if (j != c)
                    minor.set(i - 1, mj++, A.at(i, j));
        acc += A.at(0, c) * det(minor); // characteristic 2: signs vanish
    }
    return acc;
}

bool is_mds_determinant_oracle(const FieldMatrix& G, int k) {
    std::vector<int> subset(static_cast<size_t>(k));
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
        if (det(G.select_columns(subset)).is_zero())
            return false;
        int i = k - 1;
        while (i >= 0 && subset[size_t(i)] == G.cols() - k + i)
            --i;
        if (i < 0)
            return true;
        ++subset[size_t(i)];
        for (int j = i + 1; j < k; ++j)
            subset[size_t(j)] = subset[size_t(j - 1)] + 1;
    }
}

FieldMatrix raw_vandermonde(int k, const std::vector<uint32_t>& points, const Field& f) {
    FieldMatrix G(k, static_cast<int>(points.size()), f);
    for (size_t j = 0; j < points.size(); ++j) {
        FieldElement p(points[j], f);
        FieldElement acc(1, f);
        for (int i = 0; i < k; ++i) {
            G.set(i, static_cast<int>(j), acc);
            acc *= p;
        }
    }
    return G;
}

} // namespace

TEST_CASE("builtin GF(2) generator") {
    const GeneratorSpec spec = GeneratorSpec::builtin_gf2_spec();
    const FieldMatrix G = build_generator(spec);
    const FieldMatrix expected =
        FieldMatrix::from_rows({{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}}, *spec.field);
    CHECK(G == expected);
    CHECK(is_mds(G, 3));
    CHECK(is_mds_determinant_oracle(G, 3));
}

TEST_CASE("vandermonde generators") {
    SECTION("k=1 gives an all-ones row") {
        auto f = std::make_shared<Field>(3, 0xB);
        const FieldMatrix G =
            build_generator(GeneratorSpec::vandermonde_spec(1, 5, f, {0, 3, 1, 7, 4}));
        for (int j = 0; j < 5; ++j)
            CHECK(G.at(0, j).value() == 1);
        CHECK(is_mds(G, 1));
    }
    SECTION("k=2 over GF(4) with points 1,2,3: every 2 columns independent") {
        auto f = std::make_shared<Field>(2, 0x7);
        const FieldMatrix G =
            build_generator(GeneratorSpec::vandermonde_spec(2, 3, f, {1, 2, 3}));
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                CHECK(rank(G.select_columns({a, b})) == 2);
        CHECK(is_mds(G, 2));
        CHECK(is_mds_determinant_oracle(G, 2));
    }
    SECTION("default points are 0..length-1") {
        auto f = std::make_shared<Field>(8, 0x11D);
        const GeneratorSpec spec = GeneratorSpec::vandermonde_spec(3, 4, f);
        CHECK(spec.eval_points == std::vector<uint32_t>{0, 1, 2, 3});
        CHECK(is_mds(build_generator(spec), 3));
    }
}

TEST_CASE("generator spec validation") {
    auto f16 = std::make_shared<Field>(4, 0x13);
    auto gf2 = std::make_shared<Field>(1, 0x3);

    CHECK_THROWS_AS(build_generator(GeneratorSpec::vandermonde_spec(2, 4, f16, {1, 2, 2, 3})),
                    parameter_error); // duplicate points
    CHECK_THROWS_AS(build_generator(GeneratorSpec::vandermonde_spec(2, 3, gf2)),
                    parameter_error); // length > q
    CHECK_THROWS_AS(build_generator(GeneratorSpec::vandermonde_spec(3, 2, f16)),
                    parameter_error); // length < k

    GeneratorSpec bad = GeneratorSpec::builtin_gf2_spec();
    bad.k = 2;
    bad.length = 3;
    CHECK_THROWS_AS(build_generator(bad), parameter_error);
    GeneratorSpec wrong_field = GeneratorSpec::builtin_gf2_spec();
    wrong_field.field = f16;
    CHECK_THROWS_AS(build_generator(wrong_field), parameter_error);
}

TEST_CASE("is_mds") {
    Field gf2(1, 0x3);
    SECTION("zero column fails") {
        FieldMatrix G = FieldMatrix::from_rows({{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 1}}, gf2);
        CHECK_FALSE(is_mds(G, 3));
    }
    SECTION("row count must match k") {
        FieldMatrix G = FieldMatrix::from_rows({{1, 1}, {1, 0}}, gf2);
        CHECK_THROWS_AS(is_mds(G, 3), parameter_error);
    }
    SECTION("a k=1 vandermonde is MDS even with repeated points") {
        Field f(2, 0x7);
        const FieldMatrix G = raw_vandermonde(1, {2, 2, 0}, f);
        CHECK(is_mds(G, 1)); // every column is the constant 1
    }
    SECTION("equals the distinct-points predicate for vandermonde, k >= 2, q <= 16") {
        std::mt19937 rng(23);
        for (auto [m, poly] : {std::pair{1u, 0x3u}, {2u, 0x7u}, {3u, 0xBu}, {4u, 0x13u}}) {
            Field f(m, poly);
            for (int k = 2; k <= 3; ++k) {
                const int len = std::min<int>(int(f.order()), k + 2);
                if (len < k)
                    continue;
                for (int trial = 0; trial < 40; ++trial) {
                    std::vector<uint32_t> points;
                    for (int j = 0; j < len; ++j)
                        points.push_back(rng() % f.order());
                    std::vector<uint32_t> sorted = points;
                    std::sort(sorted.begin(), sorted.end());
                    const bool distinct =
                        std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
                    const FieldMatrix G = raw_vandermonde(k, points, f);
                    CHECK(is_mds(G, k) == distinct);
                    CHECK(is_mds_determinant_oracle(G, k) == distinct);
                }
            }
        }
    }
}
