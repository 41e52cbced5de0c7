#pragma once

/*
 * Exact minimum-bandwidth cooperative regenerating codes with d = k and
 * n = d + r.
 *
 * Per stripe of B = k*n packets, node i stores its own group x_i uncoded
 * plus the n-1 parity packets x_{i(+)t} . v_t for t = 1..n-1, where (+) is
 * modulo-n index addition on [1, n] and v_t is column t of a k x (n-1) MDS
 * generator. Any k nodes reconstruct the stripe; any r simultaneous
 * failures are repaired exactly in two phases (survivor downloads, then
 * newcomer exchange) at 2d + r - 1 packets received per newcomer.
 */

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mds.hpp"

namespace mbcr {

/// Modulo-n addition on node indices: x in [1,n], y in [1,n-1].
inline int mod_n_add(int x, int y, int n) {
    if (n < 2 || x < 1 || x > n || y < 1 || y > n - 1)
        throw parameter_error("mod_n_add out of range: x=" + std::to_string(x) +
                              " y=" + std::to_string(y) + " n=" + std::to_string(n));
    return x + y <= n ? x + y : x + y - n;
}

/// The unique offset t with holder (+) t = group; requires group != holder.
inline int offset_of(int group, int holder, int n) {
    if (n < 2 || group < 1 || group > n || holder < 1 || holder > n)
        throw parameter_error("offset_of out of range");
    if (group == holder)
        throw parameter_error("node " + std::to_string(holder) +
                              " stores its own group systematically; no parity offset");
    int t = group - holder;
    if (t < 0)
        t += n;
    return t;
}

struct CodeParams {
    int n = 0, k = 0, d = 0, r = 0;
    std::shared_ptr<const Field> field;
    GeneratorSpec generator_spec;
    FieldMatrix generator;

    /// B: source packets per stripe.
    int stripe_packets() const { return k * n; }
    /// alpha: packets stored per node per stripe.
    int node_packets() const { return k + n - 1; }
    /// gamma: packets received per newcomer per stripe during repair.
    int repair_packets_per_newcomer() const { return 2 * d + r - 1; }

    static CodeParams make(int k, int r, GeneratorSpec spec) {
        if (k < 1 || r < 1)
            throw parameter_error("need k >= 1 and r >= 1");
        CodeParams p{k + r, k, k, r, spec.field, spec, build_generator(spec)};
        if (spec.k != p.k || spec.length != p.n - 1)
            throw parameter_error("generator shape " + std::to_string(spec.k) + "x" +
                                  std::to_string(spec.length) + " does not match k=" +
                                  std::to_string(p.k) + ", n-1=" + std::to_string(p.n - 1));
        return p;
    }

    /// Vandermonde generator over the given field with default points 0..n-2.
    static CodeParams make(int k, int r, std::shared_ptr<const Field> field) {
        return make(k, r, GeneratorSpec::vandermonde_spec(k, k + r - 1, std::move(field)));
    }
};

using Stripe = FieldVector; // exactly k*n packets

struct NodeShare {
    int node_id = 0;        // 1..n
    FieldVector systematic; // the node's own group, k packets
    FieldVector parity;     // parity[t-1] = x_{node_id (+) t} . v_t, t = 1..n-1

    FieldElement parity_at(int offset) const {
        if (offset < 1 || offset > static_cast<int>(parity.size()))
            throw parameter_error("parity offset " + std::to_string(offset) + " out of range");
        return parity[offset - 1];
    }

    friend bool operator==(const NodeShare& a, const NodeShare& b) {
        return a.node_id == b.node_id && a.systematic == b.systematic && a.parity == b.parity;
    }
};

inline std::vector<FieldVector> split_stripe(const Stripe& stripe, const CodeParams& p) {
    if (static_cast<int>(stripe.size()) != p.stripe_packets())
        throw parameter_error("stripe has " + std::to_string(stripe.size()) + " packets, expected " +
                              std::to_string(p.stripe_packets()));
    std::vector<FieldVector> groups;
    groups.reserve(p.n);
    for (int j = 0; j < p.n; ++j)
        groups.emplace_back(stripe.begin() + size_t(j) * p.k, stripe.begin() + size_t(j + 1) * p.k);
    return groups;
}

inline NodeShare encode_node(int node_id, const std::vector<FieldVector>& groups,
                             const FieldMatrix& G) {
    const int n = static_cast<int>(groups.size());
    if (G.cols() != n - 1)
        throw parameter_error("generator has " + std::to_string(G.cols()) +
                              " columns, expected n-1=" + std::to_string(n - 1));
    for (const FieldVector& g : groups)
        if (static_cast<int>(g.size()) != G.rows())
            throw parameter_error("group size does not match generator dimension k=" +
                                  std::to_string(G.rows()));
    if (node_id < 1 || node_id > n)
        throw parameter_error("node id out of range");
    NodeShare share;
    share.node_id = node_id;
    share.systematic = groups[node_id - 1];
    share.parity.reserve(n - 1);
    for (int t = 1; t <= n - 1; ++t) {
        const int g = mod_n_add(node_id, t, n);
        share.parity.push_back(dot(groups[g - 1], G.col(t - 1)));
    }
    return share;
}

inline std::vector<NodeShare> encode_stripe(const Stripe& stripe, const CodeParams& p) {
    const auto groups = split_stripe(stripe, p);
    std::vector<NodeShare> shares;
    shares.reserve(p.n);
    for (int i = 1; i <= p.n; ++i)
        shares.push_back(encode_node(i, groups, p.generator));
    return shares;
}

namespace detail {

inline void check_ids(const std::vector<int>& ids, int n, size_t expected, const char* what) {
    if (ids.size() != expected)
        throw parameter_error(std::string(what) + ": expected " + std::to_string(expected) +
                              " node ids, got " + std::to_string(ids.size()));
    std::set<int> seen;
    for (int id : ids) {
        if (id < 1 || id > n)
            throw parameter_error(std::string(what) + ": node id " + std::to_string(id) +
                                  " out of [1," + std::to_string(n) + "]");
        if (!seen.insert(id).second)
            throw parameter_error(std::string(what) + ": duplicate node id " + std::to_string(id));
    }
}

/// Solve for group g from k parity packets indexed by generator column.
inline FieldVector solve_group(const std::vector<std::pair<int, FieldElement>>& packets,
                               const FieldMatrix& G) {
    const int k = G.rows();
    FieldMatrix A(k, k, G.field());
    FieldVector b;
    b.reserve(k);
    for (int row = 0; row < k; ++row) {
        const int t = packets[row].first;
        for (int j = 0; j < k; ++j)
            A.set(row, j, G.at(j, t - 1));
        b.push_back(packets[row].second);
    }
    try {
        return solve(A, b);
    } catch (const singular_matrix_error& e) {
        throw corruption_error(std::string("parity system unsolvable (") + e.what() +
                               "); shares violate the MDS invariant");
    }
}

} // namespace detail

/// Rebuild a full stripe from the shares of any k distinct nodes.
inline Stripe reconstruct(const std::vector<NodeShare>& shares, const CodeParams& p) {
    std::vector<int> ids;
    for (const auto& s : shares)
        ids.push_back(s.node_id);
    detail::check_ids(ids, p.n, size_t(p.k), "reconstruct");
    for (const auto& s : shares)
        if (static_cast<int>(s.systematic.size()) != p.k ||
            static_cast<int>(s.parity.size()) != p.n - 1)
            throw parameter_error("share of node " + std::to_string(s.node_id) +
                                  " has wrong shape for these parameters");

    Stripe stripe(size_t(p.stripe_packets()), FieldElement(0, *p.field));
    std::set<int> collector(ids.begin(), ids.end());
    for (int g = 1; g <= p.n; ++g) {
        FieldVector group;
        if (collector.count(g)) {
            for (const auto& s : shares)
                if (s.node_id == g)
                    group = s.systematic;
        } else {
            std::vector<std::pair<int, FieldElement>> packets;
            for (const auto& s : shares) {
                const int t = offset_of(g, s.node_id, p.n);
                packets.emplace_back(t, s.parity_at(t));
            }
            group = detail::solve_group(packets, p.generator);
        }
        for (int j = 0; j < p.k; ++j)
            stripe[size_t(g - 1) * p.k + j] = group[j];
    }
    return stripe;
}

struct PlannedTransfer {
    int sender = 0;
    int receiver = 0;
    int phase = 0; // 1: survivor -> newcomer, 2: newcomer -> newcomer
    int group = 0; // provenance: payload is dot(x_group, v_offset)
    int offset = 0;

    friend bool operator==(const PlannedTransfer&, const PlannedTransfer&) = default;
};

struct RepairPlan {
    std::vector<int> failed;    // ascending
    std::vector<int> survivors; // ascending
    std::vector<PlannedTransfer> transfers;
};

/*
 * Repair plan for an arbitrary failure set of size r.
 *
 * Phase 1, from every survivor i to every newcomer j:
 *   (a) the parity about the survivor's own group that j must store,
 *       dot(x_i, v_{offset_of(i, j)}), computed from i's systematic packets;
 *   (b) the stored parity about j's group, dot(x_j, v_{offset_of(j, i)}).
 * The k phase-1b packets per newcomer carry distinct generator columns, so
 * the newcomer solves for x_j.
 * Phase 2, between newcomers: j sends dot(x_j, v_{offset_of(j, j')}) to j'.
 */
inline RepairPlan plan_repair(const std::vector<int>& failed, const CodeParams& p) {
    if (static_cast<int>(failed.size()) != p.r) {
        std::string msg = "this family repairs exactly r=" + std::to_string(p.r) +
                          " simultaneous failures, got " + std::to_string(failed.size());
        throw unsupported_failure_pattern_error(msg);
    }
    detail::check_ids(failed, p.n, size_t(p.r), "plan_repair");

    RepairPlan plan;
    plan.failed = failed;
    std::sort(plan.failed.begin(), plan.failed.end());
    for (int i = 1; i <= p.n; ++i)
        if (!std::count(plan.failed.begin(), plan.failed.end(), i))
            plan.survivors.push_back(i);

    for (int i : plan.survivors)
        for (int j : plan.failed) {
            plan.transfers.push_back({i, j, 1, i, offset_of(i, j, p.n)});
            plan.transfers.push_back({i, j, 1, j, offset_of(j, i, p.n)});
        }
    for (int j : plan.failed)
        for (int jp : plan.failed)
            if (jp != j)
                plan.transfers.push_back({j, jp, 2, j, offset_of(j, jp, p.n)});
    return plan;
}

struct Transfer {
    int sender = 0, receiver = 0, phase = 0, group = 0, offset = 0;
    FieldVector payload; // one packet per stripe

    friend bool operator==(const Transfer&, const Transfer&) = default;
};

struct RepairTranscript {
    std::vector<Transfer> transfers;

    long packets(int phase, int stripe_count) const {
        long records = 0;
        for (const auto& t : transfers)
            if (t.phase == phase)
                ++records;
        return records * stripe_count;
    }

    std::map<int, long> received_packets() const {
        std::map<int, long> out;
        for (const auto& t : transfers)
            out[t.receiver] += static_cast<long>(t.payload.size());
        return out;
    }
};

/*
 * Executes a repair plan over all stripes of the survivor shares. Transfers
 * with identical (sender, receiver, phase, provenance) across stripes are
 * batched into one record with a per-stripe payload vector. Returns the
 * regenerated shares (value-identical to the lost originals) plus the
 * transcript.
 */
inline std::pair<std::map<int, std::vector<NodeShare>>, RepairTranscript>
execute_repair(const RepairPlan& plan, const std::map<int, std::vector<NodeShare>>& survivor_shares,
               const CodeParams& p) {
    if (survivor_shares.size() != plan.survivors.size())
        throw parameter_error("expected shares for " + std::to_string(plan.survivors.size()) +
                              " survivors, got " + std::to_string(survivor_shares.size()));
    size_t stripes = 0;
    for (int s : plan.survivors) {
        auto it = survivor_shares.find(s);
        if (it == survivor_shares.end())
            throw parameter_error("missing share for survivor " + std::to_string(s));
        if (s == plan.survivors.front())
            stripes = it->second.size();
        else if (it->second.size() != stripes)
            throw parameter_error("survivors disagree on stripe count");
    }

    RepairTranscript transcript;
    transcript.transfers.reserve(plan.transfers.size());

    // Phase 1: payloads come straight from survivor storage.
    for (const auto& t : plan.transfers) {
        if (t.phase != 1)
            continue;
        Transfer rec{t.sender, t.receiver, t.phase, t.group, t.offset, {}};
        rec.payload.reserve(stripes);
        const auto& sender_stripes = survivor_shares.at(t.sender);
        for (size_t s = 0; s < stripes; ++s) {
            const NodeShare& share = sender_stripes[s];
            if (t.group == t.sender)
                rec.payload.push_back(dot(share.systematic, p.generator.col(t.offset - 1)));
            else
                rec.payload.push_back(share.parity_at(t.offset));
        }
        transcript.transfers.push_back(std::move(rec));
    }

    // Each newcomer solves for its own group, one system per stripe.
    std::map<int, std::vector<FieldVector>> recovered; // newcomer -> per-stripe group
    for (int j : plan.failed) {
        std::vector<const Transfer*> own;
        for (const auto& rec : transcript.transfers)
            if (rec.receiver == j && rec.group == j)
                own.push_back(&rec);
        if (static_cast<int>(own.size()) != p.k)
            throw internal_error("newcomer " + std::to_string(j) + " received " +
                                 std::to_string(own.size()) + " solve packets, expected k");
        auto& per_stripe = recovered[j];
        per_stripe.reserve(stripes);
        for (size_t s = 0; s < stripes; ++s) {
            std::vector<std::pair<int, FieldElement>> packets;
            for (const Transfer* rec : own)
                packets.emplace_back(rec->offset, rec->payload[s]);
            per_stripe.push_back(detail::solve_group(packets, p.generator));
        }
    }

    // Phase 2: exchange packets computed from the recovered groups.
    for (const auto& t : plan.transfers) {
        if (t.phase != 2)
            continue;
        Transfer rec{t.sender, t.receiver, t.phase, t.group, t.offset, {}};
        rec.payload.reserve(stripes);
        for (size_t s = 0; s < stripes; ++s)
            rec.payload.push_back(dot(recovered.at(t.sender)[s], p.generator.col(t.offset - 1)));
        transcript.transfers.push_back(std::move(rec));
    }

    // Assemble the regenerated shares from recovered groups plus received parities.
    std::map<int, std::vector<NodeShare>> regenerated;
    for (int j : plan.failed) {
        auto& out = regenerated[j];
        out.resize(stripes);
        for (size_t s = 0; s < stripes; ++s) {
            NodeShare& share = out[s];
            share.node_id = j;
            share.systematic = recovered.at(j)[s];
            share.parity.assign(size_t(p.n - 1), FieldElement(0, *p.field));
        }
        for (const auto& rec : transcript.transfers) {
            if (rec.receiver != j || rec.group == j)
                continue;
            for (size_t s = 0; s < stripes; ++s)
                out[s].parity[rec.offset - 1] = rec.payload[s];
        }
    }

    // Bandwidth identity: every newcomer received d*2 + (r-1)*1 packets per stripe.
    const long expected = static_cast<long>(p.repair_packets_per_newcomer()) *
                          static_cast<long>(stripes);
    for (const auto& [node, count] : transcript.received_packets())
        if (std::count(plan.failed.begin(), plan.failed.end(), node) && count != expected)
            throw internal_error("newcomer " + std::to_string(node) + " received " +
                                 std::to_string(count) + " packets, expected " +
                                 std::to_string(expected));
    return {std::move(regenerated), std::move(transcript)};
}

/// Single-stripe convenience wrapper.
inline std::pair<std::map<int, NodeShare>, RepairTranscript>
execute_repair_stripe(const RepairPlan& plan, const std::map<int, NodeShare>& survivor_shares,
                      const CodeParams& p) {
    std::map<int, std::vector<NodeShare>> lifted;
    for (const auto& [id, share] : survivor_shares)
        lifted.emplace(id, std::vector<NodeShare>{share});
    auto [regen, transcript] = execute_repair(plan, lifted, p);
    std::map<int, NodeShare> out;
    for (auto& [id, shares] : regen)
        out.emplace(id, std::move(shares.front()));
    return {std::move(out), std::move(transcript)};
}

} // namespace mbcr
