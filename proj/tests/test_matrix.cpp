#include <catch2/catch_amalgamated.hpp>

#include <mbcr/matrix.hpp>

#include <random>

using namespace mbcr;

namespace {

FieldVector random_vector(const Field& f, int len, std::mt19937& rng) {
    FieldVector v;
    for (int i = 0; i < len; ++i)
        v.emplace_back(rng() % f.order(), f);
    return v;
}

FieldMatrix random_matrix(const Field& f, int rows, int cols, std::mt19937& rng) {
    FieldMatrix m(rows, cols, f);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m.set(i, j, FieldElement(rng() % f.order(), f));
    return m;
}

} // namespace

TEST_CASE("dot products") {
    Field gf2(1, 0x3);
    std::mt19937 rng(1);

    SECTION("all-ones column sums a group") {
        for (int trial = 0; trial < 20; ++trial) {
            FieldVector group = random_vector(gf2, 3, rng);
            FieldVector ones(3, FieldElement(1, gf2));
            uint32_t expect =
                group[0].value() ^ group[1].value() ^ group[2].value();
            CHECK(dot(group, ones).value() == expect);
        }
    }
    SECTION("zero vector annihilates") {
        Field f(8, 0x11D);
        FieldVector u = random_vector(f, 5, rng);
        FieldVector zero(5, FieldElement(0, f));
        CHECK(dot(u, zero).is_zero());
    }
    SECTION("unit vector extracts a coordinate") {
        Field f(8, 0x11D);
        FieldVector u = random_vector(f, 4, rng);
        for (int i = 0; i < 4; ++i) {
            FieldVector e(4, FieldElement(0, f));
            e[size_t(i)] = FieldElement(1, f);
            CHECK(dot(u, e) == u[size_t(i)]);
        }
    }
    SECTION("length mismatch is rejected") {
        FieldVector a(2, FieldElement(1, gf2)), b(3, FieldElement(1, gf2));
        CHECK_THROWS_AS(dot(a, b), parameter_error);
    }
}

TEST_CASE("rank") {
    Field gf2(1, 0x3);
    SECTION("identity") {
        for (int k = 1; k <= 4; ++k) {
            FieldMatrix I(k, k, gf2);
            for (int i = 0; i < k; ++i)
                I.set(i, i, FieldElement(1, gf2));
            CHECK(rank(I) == k);
        }
    }
    SECTION("duplicated column is dependent") {
        Field f(8, 0x11D);
        std::mt19937 rng(5);
        FieldMatrix m = random_matrix(f, 3, 3, rng);
        for (int i = 0; i < 3; ++i)
            m.set(i, 2, m.at(i, 0));
        CHECK(rank(m) < 3);
    }
    SECTION("three independent GF(2) rows") {
        FieldMatrix m = FieldMatrix::from_rows({{1, 1, 0}, {1, 0, 1}, {1, 0, 0}}, gf2);
        CHECK(rank(m) == 3);
    }
    SECTION("invariant under row swaps and nonzero scaling") {
        Field f(4, 0x13);
        std::mt19937 rng(9);
        for (int trial = 0; trial < 50; ++trial) {
            FieldMatrix m = random_matrix(f, 4, 5, rng);
            const int base = rank(m);

            FieldMatrix swapped = m;
            for (int j = 0; j < 5; ++j) {
                FieldElement t = swapped.at(0, j);
                swapped.set(0, j, swapped.at(2, j));
                swapped.set(2, j, t);
            }
            CHECK(rank(swapped) == base);

            FieldMatrix scaled = m;
            FieldElement c(1 + rng() % (f.order() - 1), f);
            for (int j = 0; j < 5; ++j)
                scaled.set(1, j, scaled.at(1, j) * c);
            CHECK(rank(scaled) == base);
        }
    }
}

TEST_CASE("solve") {
    Field gf2(1, 0x3);
    std::mt19937 rng(17);

    SECTION("identity system returns the right-hand side") {
        Field f(8, 0x11D);
        FieldMatrix I(3, 3, f);
        for (int i = 0; i < 3; ++i)
            I.set(i, i, FieldElement(1, f));
        FieldVector b = random_vector(f, 3, rng);
        CHECK(solve(I, b) == b);
    }
    SECTION("any 3 columns of the builtin generator round-trip") {
        FieldMatrix G =
            FieldMatrix::from_rows({{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}}, gf2);
        for (int c0 = 0; c0 < 4; ++c0)
            for (int c1 = c0 + 1; c1 < 4; ++c1)
                for (int c2 = c1 + 1; c2 < 4; ++c2) {
                    FieldMatrix A = G.select_columns({c0, c1, c2});
                    FieldVector x = random_vector(gf2, 3, rng);
                    CHECK(solve(A, mat_vec(A, x)) == x);
                }
    }
    SECTION("duplicate rows are singular") {
        Field f(8, 0x11D);
        FieldMatrix m = random_matrix(f, 3, 3, rng);
        for (int j = 0; j < 3; ++j)
            m.set(2, j, m.at(0, j));
        FieldVector b = random_vector(f, 3, rng);
        CHECK_THROWS_AS(solve(m, b), singular_matrix_error);
    }
    SECTION("round-trip over several fields") {
        for (auto [m, poly] : {std::pair{1u, 0x3u}, {4u, 0x13u}, {8u, 0x11Du}}) {
            Field f(m, poly);
            for (int trial = 0; trial < 30; ++trial) {
                const int k = 1 + int(rng() % 5);
                FieldMatrix A = random_matrix(f, k, k, rng);
                FieldVector x = random_vector(f, k, rng);
                try {
                    const FieldVector solved = solve(A, mat_vec(A, x));
                    CHECK(solved == x);
                } catch (const singular_matrix_error&) {
                    CHECK(rank(A) < k); // only genuinely singular draws may throw
                }
            }
        }
    }
    SECTION("shape errors") {
        FieldMatrix m(2, 3, gf2);
        CHECK_THROWS_AS(solve(m, FieldVector(2, FieldElement(0, gf2))), parameter_error);
    }
}
