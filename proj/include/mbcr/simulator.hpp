#pragma once

/*
 * Multi-round storage-cluster lifecycle: inject exactly-r failures, repair
 * cooperatively, account every transferred packet, audit every data
 * collector, and compare measured bandwidth to the exact lower bound.
 */

#include <json.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "code.hpp"

namespace mbcr {

struct FailureModel {
    enum class Kind { uniform_random, explicit_schedule };
    Kind kind = Kind::uniform_random;
    std::vector<std::vector<int>> schedule;

    static FailureModel uniform() { return {}; }
    static FailureModel from_schedule(std::vector<std::vector<int>> s) {
        return {Kind::explicit_schedule, std::move(s)};
    }

    const char* name() const {
        return kind == Kind::uniform_random ? "uniform-random" : "explicit-schedule";
    }
};

struct ClusterState {
    CodeParams params;
    std::vector<Stripe> reference; // the encoded source data, for audits
    std::map<int, std::vector<NodeShare>> shares;
    int round = 0;
    uint64_t seed = 0;

    static ClusterState create_random(const CodeParams& params, int stripe_count,
                                      std::mt19937_64& rng) {
        if (stripe_count < 1)
            throw parameter_error("need at least one stripe");
        ClusterState state{params, {}, {}, 0, 0};
        const uint32_t q = params.field->order();
        for (int s = 0; s < stripe_count; ++s) {
            Stripe stripe;
            stripe.reserve(size_t(params.stripe_packets()));
            for (int i = 0; i < params.stripe_packets(); ++i)
                stripe.emplace_back(static_cast<uint32_t>(rng() % q), *params.field);
            for (const NodeShare& share : encode_stripe(stripe, params))
                state.shares[share.node_id].push_back(share);
            state.reference.push_back(std::move(stripe));
        }
        return state;
    }

    static ClusterState create_random(const CodeParams& params, int stripe_count, uint64_t seed) {
        std::mt19937_64 rng(seed);
        ClusterState state = create_random(params, stripe_count, rng);
        state.seed = seed;
        return state;
    }
};

struct CollectorAudit {
    std::vector<int> collector;
    bool pass = false;
};

struct AuditResult {
    std::vector<CollectorAudit> collectors;
    bool all_pass = true;
};

/// Reconstructs through every C(n, k) collector and compares to reference.
inline AuditResult audit_collectors(const ClusterState& state) {
    const CodeParams& p = state.params;
    AuditResult result;
    std::vector<int> subset(static_cast<size_t>(p.k));
    for (int i = 0; i < p.k; ++i)
        subset[size_t(i)] = i + 1;
    while (true) {
        CollectorAudit audit;
        audit.collector = subset;
        audit.pass = true;
        try {
            for (size_t s = 0; s < state.reference.size(); ++s) {
                std::vector<NodeShare> shares;
                for (int id : subset)
                    shares.push_back(state.shares.at(id).at(s));
                if (reconstruct(shares, p) != state.reference[s]) {
                    audit.pass = false;
                    break;
                }
            }
        } catch (const error&) {
            audit.pass = false;
        }
        result.all_pass = result.all_pass && audit.pass;
        result.collectors.push_back(std::move(audit));

        int i = p.k - 1;
        while (i >= 0 && subset[size_t(i)] == p.n - p.k + i + 1)
            --i;
        if (i < 0)
            break;
        ++subset[size_t(i)];
        for (int j = i + 1; j < p.k; ++j)
            subset[size_t(j)] = subset[size_t(j - 1)] + 1;
    }
    return result;
}

struct RoundReport {
    int round = 0;
    std::vector<int> failed;
    long phase1_packets = 0;
    long phase2_packets = 0;
    std::map<int, Rational> gamma_measured; // received packets per newcomer per stripe
    Rational ratio;                         // gamma_measured / gamma_bound
    bool state_restored = false;
    bool audit_passed = false;
};

struct BandwidthReport {
    int n = 0, k = 0, d = 0, r = 0;
    long stripe_packets = 0;
    int stripe_count = 0;
    unsigned field_degree = 0;
    uint32_t field_poly = 0;
    uint64_t seed = 0;
    std::string failure_model;
    Rational gamma_bound;
    std::pair<Rational, Rational> optimal_split; // (beta1, beta2) at the bound
    std::vector<RoundReport> rounds;
    long total_phase1 = 0, total_phase2 = 0;
    bool all_ratio_one = true;
    bool all_audits_passed = true;
    bool all_state_restored = true;
};

inline BandwidthReport run_simulation(const CodeParams& params, int rounds,
                                      const FailureModel& model, uint64_t seed,
                                      int stripe_count = 1) {
    if (rounds < 0)
        throw parameter_error("round count must be nonnegative");
    if (model.kind == FailureModel::Kind::explicit_schedule &&
        static_cast<int>(model.schedule.size()) < rounds)
        throw parameter_error("schedule has " + std::to_string(model.schedule.size()) +
                              " rounds, " + std::to_string(rounds) + " requested");

    std::mt19937_64 rng(seed);
    ClusterState state = ClusterState::create_random(params, stripe_count, rng);
    state.seed = seed;

    const SystemParams sys{params.stripe_packets(), params.k, params.d, params.r, params.n};
    BandwidthReport report;
    report.n = params.n;
    report.k = params.k;
    report.d = params.d;
    report.r = params.r;
    report.stripe_packets = params.stripe_packets();
    report.stripe_count = stripe_count;
    report.field_degree = params.field->degree();
    report.field_poly = params.field->reduction_poly();
    report.seed = seed;
    report.failure_model = model.name();
    report.gamma_bound = mbcr_lower_bound(sys);
    report.optimal_split = mbcr_point(sys);

    for (int round = 1; round <= rounds; ++round) {
        std::vector<int> failed;
        if (model.kind == FailureModel::Kind::explicit_schedule) {
            failed = model.schedule[size_t(round - 1)];
            if (static_cast<int>(failed.size()) != params.r)
                throw parameter_error("schedule round " + std::to_string(round) + " fails " +
                                      std::to_string(failed.size()) +
                                      " nodes; this family repairs exactly r=" +
                                      std::to_string(params.r) + " per round");
        } else {
            std::vector<int> ids(size_t(params.n));
            for (int i = 0; i < params.n; ++i)
                ids[size_t(i)] = i + 1;
            for (int i = 0; i < params.r; ++i) {
                const size_t j = i + static_cast<size_t>(rng() % (ids.size() - size_t(i)));
                std::swap(ids[size_t(i)], ids[j]);
            }
            failed.assign(ids.begin(), ids.begin() + params.r);
            std::sort(failed.begin(), failed.end());
        }

        const RepairPlan plan = plan_repair(failed, params);
        std::map<int, std::vector<NodeShare>> survivor_shares;
        for (int id : plan.survivors)
            survivor_shares.emplace(id, state.shares.at(id));
        auto [regenerated, transcript] = execute_repair(plan, survivor_shares, params);

        RoundReport rr;
        rr.round = round;
        rr.failed = plan.failed;
        rr.phase1_packets = transcript.packets(1, stripe_count);
        rr.phase2_packets = transcript.packets(2, stripe_count);
        rr.state_restored = true;
        for (int j : plan.failed) {
            rr.state_restored = rr.state_restored && regenerated.at(j) == state.shares.at(j);
            state.shares[j] = std::move(regenerated.at(j));
        }
        Rational worst = 0;
        for (const auto& [node, packets] : transcript.received_packets()) {
            const Rational per_stripe = Rational(packets) / stripe_count;
            rr.gamma_measured[node] = per_stripe;
            worst = std::max(worst, per_stripe);
        }
        rr.ratio = report.gamma_bound == 0 ? Rational(0) : worst / report.gamma_bound;
        rr.audit_passed = audit_collectors(state).all_pass;

        report.total_phase1 += rr.phase1_packets;
        report.total_phase2 += rr.phase2_packets;
        report.all_ratio_one = report.all_ratio_one && rr.ratio == 1;
        report.all_audits_passed = report.all_audits_passed && rr.audit_passed;
        report.all_state_restored = report.all_state_restored && rr.state_restored;
        report.rounds.push_back(std::move(rr));
        state.round = round;
    }
    return report;
}

inline nlohmann::json to_json(const BandwidthReport& r) {
    nlohmann::json j;
    j["params"] = {{"n", r.n},
                   {"k", r.k},
                   {"d", r.d},
                   {"r", r.r},
                   {"stripe_packets", r.stripe_packets},
                   {"stripe_count", r.stripe_count},
                   {"field_degree", r.field_degree},
                   {"field_poly", r.field_poly}};
    j["seed"] = r.seed;
    j["failure_model"] = r.failure_model;
    j["bound"] = {{"gamma", to_string(r.gamma_bound)},
                  {"gamma_approx", to_double(r.gamma_bound)},
                  {"beta1", to_string(r.optimal_split.first)},
                  {"beta2", to_string(r.optimal_split.second)}};
    j["rounds"] = nlohmann::json::array();
    Rational overall = r.rounds.empty() ? Rational(1) : Rational(0);
    for (const RoundReport& rr : r.rounds) {
        nlohmann::json jr;
        jr["round"] = rr.round;
        jr["failed"] = rr.failed;
        jr["phase1_packets"] = rr.phase1_packets;
        jr["phase2_packets"] = rr.phase2_packets;
        jr["per_stripe"] = {{"phase1_packets", rr.phase1_packets / r.stripe_count},
                            {"phase2_packets", rr.phase2_packets / r.stripe_count}};
        nlohmann::json jg;
        for (const auto& [node, g] : rr.gamma_measured)
            jg[std::to_string(node)] = to_string(g);
        jr["gamma_measured"] = jg;
        jr["ratio"] = to_string(rr.ratio);
        jr["ratio_approx"] = to_double(rr.ratio);
        jr["state_restored"] = rr.state_restored;
        jr["audit_passed"] = rr.audit_passed;
        j["rounds"].push_back(jr);
        overall = std::max(overall, rr.ratio);
    }
    j["totals"] = {{"rounds", r.rounds.size()},
                   {"phase1_packets", r.total_phase1},
                   {"phase2_packets", r.total_phase2},
                   {"packets", r.total_phase1 + r.total_phase2}};
    j["ratio"] = to_string(overall);
    j["all_ratio_one"] = r.all_ratio_one;
    j["all_audits_passed"] = r.all_audits_passed;
    j["all_state_restored"] = r.all_state_restored;
    return j;
}

} // namespace mbcr
