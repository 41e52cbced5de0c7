#include <catch2/catch_amalgamated.hpp>

#include <mbcr/code.hpp>

#include <numeric>
#include <random>
#include <set>

using namespace mbcr;

namespace {

CodeParams builtin_params() { // n=5, k=d=3, r=2 over GF(2)
    return CodeParams::make(3, 2, GeneratorSpec::builtin_gf2_spec());
}

CodeParams gf256_params(int k, int r) {
    return CodeParams::make(k, r, std::make_shared<Field>(8, 0x11D));
}

Stripe random_stripe(const CodeParams& p, std::mt19937& rng) {
    Stripe s;
    for (int i = 0; i < p.stripe_packets(); ++i)
        s.emplace_back(rng() % p.field->order(), *p.field);
    return s;
}

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> subset(static_cast<size_t>(k));
    std::iota(subset.begin(), subset.end(), 1);
    while (true) {
        out.push_back(subset);
        int i = k - 1;
        while (i >= 0 && subset[size_t(i)] == n - k + i + 1)
            --i;
        if (i < 0)
            return out;
        ++subset[size_t(i)];
        for (int j = i + 1; j < k; ++j)
            subset[size_t(j)] = subset[size_t(j - 1)] + 1;
    }
}

} // namespace

TEST_CASE("modulo-n index arithmetic") {
    CHECK(mod_n_add(4, 1, 5) == 5);
    CHECK(mod_n_add(5, 1, 5) == 1);
    CHECK(mod_n_add(3, 4, 5) == 2);

    SECTION("i (+) t sweeps every other index") {
        for (int n : {2, 3, 5, 8})
            for (int i = 1; i <= n; ++i) {
                std::set<int> seen;
                for (int t = 1; t <= n - 1; ++t)
                    seen.insert(mod_n_add(i, t, n));
                CHECK(seen.size() == size_t(n - 1));
                CHECK_FALSE(seen.count(i));
            }
    }
    SECTION("range checks") {
        CHECK_THROWS_AS(mod_n_add(0, 1, 5), parameter_error);
        CHECK_THROWS_AS(mod_n_add(6, 1, 5), parameter_error);
        CHECK_THROWS_AS(mod_n_add(1, 0, 5), parameter_error);
        CHECK_THROWS_AS(mod_n_add(1, 5, 5), parameter_error);
    }
}

TEST_CASE("offset_of inverts the group map") {
    CHECK(offset_of(4, 5, 5) == 4);
    CHECK(offset_of(5, 4, 5) == 1);

    for (int n : {2, 4, 5, 7})
        for (int m = 1; m <= n; ++m)
            for (int t = 1; t <= n - 1; ++t)
                CHECK(offset_of(mod_n_add(m, t, n), m, n) == t);

    CHECK_THROWS_AS(offset_of(3, 3, 5), parameter_error);
}

TEST_CASE("split_stripe") {
    const CodeParams p = builtin_params();
    std::mt19937 rng(2);
    const Stripe stripe = random_stripe(p, rng);
    const auto groups = split_stripe(stripe, p);

    REQUIRE(groups.size() == 5);
    for (int j = 0; j < 3; ++j)
        CHECK(groups[3][size_t(j)] == stripe[size_t(9 + j)]); // group 4 = x9,x10,x11

    SECTION("concatenation restores the stripe") {
        Stripe back;
        for (const auto& g : groups)
            back.insert(back.end(), g.begin(), g.end());
        CHECK(back == stripe);
    }
    SECTION("k=1 groups are single packets") {
        const CodeParams p1 = gf256_params(1, 2);
        const Stripe s = random_stripe(p1, rng);
        const auto g1 = split_stripe(s, p1);
        REQUIRE(g1.size() == 3);
        for (int j = 0; j < 3; ++j)
            CHECK(g1[size_t(j)] == FieldVector{s[size_t(j)]});
    }
    SECTION("wrong length rejected") {
        Stripe bad(stripe.begin(), stripe.end() - 1);
        CHECK_THROWS_AS(split_stripe(bad, p), parameter_error);
    }
}

TEST_CASE("encode_node matches the worked layout") {
    const CodeParams p = builtin_params();
    std::mt19937 rng(3);

    SECTION("node 4 on random GF(2) stripes") {
        for (int trial = 0; trial < 32; ++trial) {
            const Stripe s = random_stripe(p, rng);
            const auto groups = split_stripe(s, p);
            const NodeShare share = encode_node(4, groups, p.generator);

            CHECK(share.systematic ==
                  FieldVector{s[9], s[10], s[11]});
            // t=1: sum of group 5; t=2..4: x0, x4, x8
            CHECK(share.parity_at(1).value() ==
                  (s[12].value() ^ s[13].value() ^ s[14].value()));
            CHECK(share.parity_at(2) == s[0]);
            CHECK(share.parity_at(3) == s[4]);
            CHECK(share.parity_at(4) == s[8]);
        }
    }
    SECTION("all-zero stripe gives an all-zero share") {
        Stripe zero(15, FieldElement(0, *p.field));
        for (const NodeShare& share : encode_stripe(zero, p)) {
            for (FieldElement e : share.systematic)
                CHECK(e.is_zero());
            for (FieldElement e : share.parity)
                CHECK(e.is_zero());
        }
    }
    SECTION("k=1, r=2: parities are scalar multiples of the other packets") {
        const CodeParams p1 = gf256_params(1, 2);
        const Stripe s = random_stripe(p1, rng);
        const auto groups = split_stripe(s, p1);
        for (int i = 1; i <= 3; ++i) {
            const NodeShare share = encode_node(i, groups, p1.generator);
            CHECK(share.systematic == groups[size_t(i - 1)]);
            for (int t = 1; t <= 2; ++t) {
                const int g = mod_n_add(i, t, 3);
                CHECK(share.parity_at(t) ==
                      groups[size_t(g - 1)][0] * p1.generator.at(0, t - 1));
            }
        }
    }
    SECTION("storage identity: alpha packets per node") {
        for (auto [k, r] : {std::pair{1, 1}, {2, 2}, {3, 2}}) {
            const CodeParams q = gf256_params(k, r);
            const Stripe s = random_stripe(q, rng);
            for (const NodeShare& share : encode_stripe(s, q))
                CHECK(static_cast<int>(share.systematic.size() + share.parity.size()) ==
                      q.node_packets());
        }
    }
}

TEST_CASE("layout bijection: every group held once per node, distinct columns") {
    for (int n : {3, 5, 7}) {
        // holder m stores group g at offset t = offset_of(g, m); across the
        // n-1 holders of a fixed group the offsets are pairwise distinct
        for (int g = 1; g <= n; ++g) {
            std::set<int> offsets;
            for (int m = 1; m <= n; ++m) {
                if (m == g)
                    continue;
                offsets.insert(offset_of(g, m, n));
            }
            CHECK(offsets.size() == size_t(n - 1));
        }
    }
}

TEST_CASE("reconstruct") {
    const CodeParams p = builtin_params();
    std::mt19937 rng(7);

    SECTION("overall round-trip, all collectors, worked instance") {
        const Stripe s = random_stripe(p, rng);
        const auto shares = encode_stripe(s, p);
        for (const auto& collector : subsets_of_size(5, 3)) {
            std::vector<NodeShare> picked;
            for (int id : collector)
                picked.push_back(shares[size_t(id - 1)]);
            CHECK(reconstruct(picked, p) == s);
        }
    }
    SECTION("systematic groups pass through verbatim") {
        const Stripe s = random_stripe(p, rng);
        const auto shares = encode_stripe(s, p);
        const Stripe rebuilt =
            reconstruct({shares[0], shares[1], shares[2]}, p);
        for (int i = 0; i < 9; ++i)
            CHECK(rebuilt[size_t(i)] == s[size_t(i)]);
    }
    SECTION("exhaustive collectors over GF(256) families") {
        for (auto [k, r] : {std::pair{1, 2}, {2, 2}, {2, 3}, {3, 2}}) {
            const CodeParams q = gf256_params(k, r);
            const Stripe s = random_stripe(q, rng);
            const auto shares = encode_stripe(s, q);
            for (const auto& collector : subsets_of_size(q.n, q.k)) {
                std::vector<NodeShare> picked;
                for (int id : collector)
                    picked.push_back(shares[size_t(id - 1)]);
                CHECK(reconstruct(picked, q) == s);
            }
        }
    }
    SECTION("collector size and duplicates rejected") {
        const Stripe s = random_stripe(p, rng);
        const auto shares = encode_stripe(s, p);
        CHECK_THROWS_AS(reconstruct({shares[0], shares[1]}, p), parameter_error);
        CHECK_THROWS_AS(reconstruct({shares[0], shares[0], shares[1]}, p), parameter_error);
    }
    SECTION("malformed share shape rejected") {
        const Stripe s = random_stripe(p, rng);
        auto shares = encode_stripe(s, p);
        shares[1].parity.pop_back();
        CHECK_THROWS_AS(reconstruct({shares[0], shares[1], shares[2]}, p), parameter_error);
    }
}

TEST_CASE("plan_repair") {
    const CodeParams p = builtin_params();

    SECTION("worked example: nodes 4 and 5 fail") {
        const RepairPlan plan = plan_repair({4, 5}, p);
        CHECK(plan.survivors == std::vector<int>{1, 2, 3});
        CHECK(plan.transfers.size() == 14);

        auto has = [&](PlannedTransfer want) {
            return std::count(plan.transfers.begin(), plan.transfers.end(), want) == 1;
        };
        // survivor 1 computing from its own group
        CHECK(has({1, 4, 1, 1, 2})); // x_1 . v_2 to newcomer 4
        CHECK(has({1, 5, 1, 1, 1})); // x_1 . v_1 to newcomer 5
        // survivor 1 forwarding stored parities about the newcomers' groups
        CHECK(has({1, 4, 1, 4, 3})); // x_4 . v_3
        CHECK(has({1, 5, 1, 5, 4})); // x_5 . v_4
        // newcomer exchange
        CHECK(has({4, 5, 2, 4, 4})); // x_4 . v_4
        CHECK(has({5, 4, 2, 5, 1})); // x_5 . v_1

        for (int j : {4, 5}) {
            long received = 0;
            for (const auto& t : plan.transfers)
                received += t.receiver == j;
            CHECK(received == 7); // d*beta1 + (r-1)*beta2 = 2d + r - 1
        }
    }
    SECTION("r=1 has no exchange phase") {
        const CodeParams q = gf256_params(3, 1);
        const RepairPlan plan = plan_repair({2}, q);
        CHECK(plan.transfers.size() == size_t(2 * q.k));
        for (const auto& t : plan.transfers)
            CHECK(t.phase == 1);
    }
    SECTION("transfer count identity 2kr + r(r-1) for every failure set") {
        for (auto [k, r] : {std::pair{2, 2}, {2, 3}, {3, 2}, {1, 3}}) {
            const CodeParams q = gf256_params(k, r);
            for (const auto& failed : subsets_of_size(q.n, q.r)) {
                const RepairPlan plan = plan_repair(failed, q);
                CHECK(plan.transfers.size() == size_t(2 * k * r + r * (r - 1)));
            }
        }
    }
    SECTION("failure pattern errors") {
        CHECK_THROWS_AS(plan_repair({4}, p), unsupported_failure_pattern_error);
        CHECK_THROWS_AS(plan_repair({3, 4, 5}, p), unsupported_failure_pattern_error);
        CHECK_THROWS_AS(plan_repair({4, 4}, p), parameter_error);
        CHECK_THROWS_AS(plan_repair({4, 6}, p), parameter_error);
    }
}

TEST_CASE("execute_repair") {
    const CodeParams p = builtin_params();
    std::mt19937 rng(11);

    auto shares_by_node = [](const std::vector<NodeShare>& shares) {
        std::map<int, std::vector<NodeShare>> m;
        for (const NodeShare& s : shares)
            m[s.node_id] = {s};
        return m;
    };

    SECTION("worked instance: 14 transfers, 7 per newcomer, exact repair") {
        const Stripe s = random_stripe(p, rng);
        const auto shares = encode_stripe(s, p);
        const RepairPlan plan = plan_repair({4, 5}, p);
        auto all = shares_by_node(shares);
        all.erase(4);
        all.erase(5);
        const auto [regen, transcript] = execute_repair(plan, all, p);

        CHECK(transcript.transfers.size() == 14);
        CHECK(transcript.packets(1, 1) == 12);
        CHECK(transcript.packets(2, 1) == 2);
        for (const auto& [node, count] : transcript.received_packets())
            CHECK(count == 7);
        CHECK(regen.at(4).front() == shares[3]);
        CHECK(regen.at(5).front() == shares[4]);
    }
    SECTION("repair then reconstruct, exhaustive failure sets") {
        for (auto [k, r] : {std::pair{2, 2}, {3, 2}, {1, 3}}) {
            const CodeParams q = gf256_params(k, r);
            const Stripe s = random_stripe(q, rng);
            const auto shares = encode_stripe(s, q);
            for (const auto& failed : subsets_of_size(q.n, q.r)) {
                const RepairPlan plan = plan_repair(failed, q);
                auto survivors = shares_by_node(shares);
                for (int j : failed)
                    survivors.erase(j);
                const auto [regen, transcript] = execute_repair(plan, survivors, q);
                for (int j : failed)
                    CHECK(regen.at(j).front() == shares[size_t(j - 1)]);

                std::vector<NodeShare> collector;
                for (int j : failed)
                    if (static_cast<int>(collector.size()) < q.k)
                        collector.push_back(regen.at(j).front());
                for (int i = 1; i <= q.n && static_cast<int>(collector.size()) < q.k; ++i)
                    if (!std::count(failed.begin(), failed.end(), i))
                        collector.push_back(shares[size_t(i - 1)]);
                CHECK(reconstruct(collector, q) == s);
            }
        }
    }
    SECTION("multi-stripe execution batches payloads") {
        const CodeParams q = gf256_params(2, 2);
        const int stripes = 3;
        std::map<int, std::vector<NodeShare>> per_node;
        std::vector<Stripe> data;
        for (int s = 0; s < stripes; ++s) {
            data.push_back(random_stripe(q, rng));
            for (const NodeShare& share : encode_stripe(data.back(), q))
                per_node[share.node_id].push_back(share);
        }
        const RepairPlan plan = plan_repair({1, 3}, q);
        auto survivors = per_node;
        survivors.erase(1);
        survivors.erase(3);
        const auto [regen, transcript] = execute_repair(plan, survivors, q);

        CHECK(transcript.transfers.size() == size_t(2 * 2 * 2 + 2));
        for (const auto& t : transcript.transfers)
            CHECK(t.payload.size() == size_t(stripes));
        CHECK(transcript.packets(1, stripes) == 8 * stripes);
        CHECK(regen.at(1) == per_node.at(1));
        CHECK(regen.at(3) == per_node.at(3));
    }
    SECTION("transcript records map one-to-one onto the plan") {
        const CodeParams q = gf256_params(3, 2);
        const Stripe s = random_stripe(q, rng);
        const RepairPlan plan = plan_repair({2, 4}, q);
        auto survivors = shares_by_node(encode_stripe(s, q));
        survivors.erase(2);
        survivors.erase(4);
        const auto [regen, transcript] = execute_repair(plan, survivors, q);
        REQUIRE(transcript.transfers.size() == plan.transfers.size());
        for (size_t i = 0; i < plan.transfers.size(); ++i) {
            const Transfer& got = transcript.transfers[i];
            const PlannedTransfer want = plan.transfers[i];
            CHECK(got.sender == want.sender);
            CHECK(got.receiver == want.receiver);
            CHECK(got.phase == want.phase);
            CHECK(got.group == want.group);
            CHECK(got.offset == want.offset);
            CHECK(got.payload.size() == 1);
        }
    }
    SECTION("missing survivor share rejected") {
        const Stripe s = random_stripe(p, rng);
        const auto shares = encode_stripe(s, p);
        const RepairPlan plan = plan_repair({4, 5}, p);
        auto survivors = shares_by_node(shares);
        survivors.erase(4);
        survivors.erase(5);
        survivors.erase(1);
        CHECK_THROWS_AS(execute_repair(plan, survivors, p), parameter_error);
    }
}

TEST_CASE("code params validation") {
    CHECK_THROWS_AS(CodeParams::make(0, 2, std::make_shared<Field>(8, 0x11D)), parameter_error);
    CHECK_THROWS_AS(CodeParams::make(2, 0, std::make_shared<Field>(8, 0x11D)), parameter_error);
    // generator shape must match (k, n-1)
    auto f = std::make_shared<Field>(8, 0x11D);
    CHECK_THROWS_AS(CodeParams::make(3, 2, GeneratorSpec::vandermonde_spec(3, 3, f)),
                    parameter_error);

    const CodeParams p = CodeParams::make(3, 2, f);
    CHECK(p.n == 5);
    CHECK(p.d == 3);
    CHECK(p.stripe_packets() == 15);
    CHECK(p.node_packets() == 7);
    CHECK(p.repair_packets_per_newcomer() == 7);
}
