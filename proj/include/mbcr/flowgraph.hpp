#pragma once

/*
 * Staged information flow graph for a failure/repair history.
 *
 * Stage -1 holds the source S; stage 0 holds one "out" vertex per initial
 * node (edge S -> out with capacity alpha). Each repair stage adds, per
 * failed node i, vertices in_i -> mid_i -> out_i (infinite and alpha
 * capacities), d incoming beta1 edges from live prior "out" vertices, and a
 * beta2 edge in_i -> mid_j for every ordered newcomer pair. A data
 * collector vertex attaches with infinite edges to the most recent "out" of
 * k distinct nodes.
 *
 * Max-flow from S to DC upper-bounds the storable file size; the staged
 * cuts built by type_cut realize the per-type minimum capacity when
 * helpers maximally overlap earlier in-cut newcomers.
 */

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"

namespace mbcr {

struct FlowParams {
    int n = 0, k = 0, d = 0, r = 0;
    Rational alpha, beta1, beta2;

    void validate() const {
        if (n < 1 || k < 1 || k > n || d < 1 || r < 1)
            throw parameter_error("flow graph needs 1 <= k <= n, d >= 1, r >= 1");
        if (alpha < 0 || beta1 < 0 || beta2 < 0)
            throw parameter_error("capacities must be nonnegative");
    }
};

/// Capacities of an MBCR-point system: alpha = gamma* and (beta1, beta2)
/// at the bound-meeting split.
inline FlowParams mbcr_point_params(const SystemParams& p) {
    if (p.n < 1)
        throw parameter_error("mbcr_point_params needs n");
    auto [b1, b2] = mbcr_point(p);
    return FlowParams{p.n, p.k, p.d, p.r, mbcr_lower_bound(p), b1, b2};
}

struct RepairStage {
    std::vector<int> failed;
    // Explicit helper nodes per newcomer; when a newcomer has no entry the
    // default rule applies: prefer the most recently repaired live nodes.
    std::map<int, std::vector<int>> helpers;
};

struct RepairHistory {
    std::vector<RepairStage> stages;
};

enum class VertexKind : uint8_t { source, in, mid, out, dc };

inline const char* kind_name(VertexKind k) {
    switch (k) {
    case VertexKind::source: return "source";
    case VertexKind::in: return "in";
    case VertexKind::mid: return "mid";
    case VertexKind::out: return "out";
    case VertexKind::dc: return "dc";
    }
    return "?";
}

struct FlowVertex {
    VertexKind kind;
    int stage; // -1 source, 0 initial nodes, >= 1 repair stages; dc at stage_count
    int node;  // storage node id; 0 for source/dc
};

struct FlowEdge {
    int from = 0, to = 0;
    Rational capacity;
    bool infinite = false;
};

class FlowGraph {
public:
    const std::vector<FlowVertex>& vertices() const { return vertices_; }
    const std::vector<FlowEdge>& edges() const { return edges_; }
    int source() const { return source_; }
    int dc() const { return dc_; }
    int stage_count() const { return stage_count_; }
    const FlowParams& params() const { return params_; }

    int vertex_index(VertexKind kind, int stage, int node) const {
        auto it = index_.find(key(kind, stage, node));
        if (it == index_.end())
            throw parameter_error("no vertex " + std::to_string(stage) + ":" + kind_name(kind) +
                                  ":" + std::to_string(node) + " in this graph");
        return it->second;
    }

    bool has_vertex(VertexKind kind, int stage, int node) const {
        return index_.count(key(kind, stage, node)) != 0;
    }

    /// Index of the most recent "out" vertex of a node.
    int latest_out(int node) const {
        auto it = latest_out_.find(node);
        if (it == latest_out_.end())
            throw parameter_error("node " + std::to_string(node) + " not in graph");
        return it->second;
    }

    /// Stage of the most recent repair of a node (0 if never repaired).
    int latest_out_stage(int node) const { return vertices_[size_t(latest_out(node))].stage; }

    std::string vertex_name(int idx) const {
        const FlowVertex& v = vertices_[size_t(idx)];
        return std::to_string(v.stage) + ":" + std::string(kind_name(v.kind)) + ":" +
               std::to_string(v.node);
    }

    /// Copy with one edge's capacity replaced (used to probe edge necessity).
    FlowGraph with_edge_capacity(size_t edge_index, Rational capacity) const {
        FlowGraph g = *this;
        g.edges_.at(edge_index).capacity = std::move(capacity);
        g.edges_.at(edge_index).infinite = false;
        return g;
    }

private:
    friend FlowGraph build_graph(const FlowParams&, const RepairHistory&, const std::vector<int>&);

    static long long key(VertexKind kind, int stage, int node) {
        return (static_cast<long long>(stage + 1) << 24) | (static_cast<long long>(kind) << 20) |
               node;
    }

    int add_vertex(VertexKind kind, int stage, int node) {
        vertices_.push_back({kind, stage, node});
        const int idx = static_cast<int>(vertices_.size()) - 1;
        index_[key(kind, stage, node)] = idx;
        return idx;
    }

    void add_edge(int from, int to, Rational cap, bool infinite = false) {
        edges_.push_back({from, to, std::move(cap), infinite});
    }

    FlowParams params_;
    std::vector<FlowVertex> vertices_;
    std::vector<FlowEdge> edges_;
    std::map<long long, int> index_;
    std::map<int, int> latest_out_;
    int source_ = -1, dc_ = -1;
    int stage_count_ = 0;
};

inline FlowGraph build_graph(const FlowParams& params, const RepairHistory& history,
                             const std::vector<int>& dc_nodes) {
    params.validate();
    FlowGraph g;
    g.params_ = params;
    g.stage_count_ = static_cast<int>(history.stages.size());

    g.source_ = g.add_vertex(VertexKind::source, -1, 0);
    for (int i = 1; i <= params.n; ++i) {
        const int out = g.add_vertex(VertexKind::out, 0, i);
        g.add_edge(g.source_, out, params.alpha);
        g.latest_out_[i] = out;
    }

    for (size_t t = 1; t <= history.stages.size(); ++t) {
        const RepairStage& stage = history.stages[t - 1];
        if (static_cast<int>(stage.failed.size()) != params.r)
            throw parameter_error("stage " + std::to_string(t) + " fails " +
                                  std::to_string(stage.failed.size()) + " nodes, expected r=" +
                                  std::to_string(params.r));
        std::set<int> failed(stage.failed.begin(), stage.failed.end());
        if (failed.size() != stage.failed.size())
            throw parameter_error("stage " + std::to_string(t) + " repeats a failed node");
        for (int i : failed)
            if (i < 1 || i > params.n)
                throw parameter_error("failed node " + std::to_string(i) + " out of range");

        // Resolve helper "out" vertices against the graph as of the previous stage.
        std::map<int, std::vector<int>> helper_vertices;
        for (int i : failed) {
            std::vector<int> helpers;
            auto it = stage.helpers.find(i);
            if (it != stage.helpers.end()) {
                helpers = it->second;
                std::set<int> seen;
                for (int h : helpers) {
                    if (h < 1 || h > params.n)
                        throw parameter_error("helper " + std::to_string(h) + " out of range");
                    if (failed.count(h))
                        throw parameter_error("helper " + std::to_string(h) +
                                              " is itself failed in stage " + std::to_string(t));
                    if (!seen.insert(h).second)
                        throw parameter_error("duplicate helper " + std::to_string(h));
                }
                if (static_cast<int>(helpers.size()) != params.d)
                    throw parameter_error("newcomer " + std::to_string(i) + " needs d=" +
                                          std::to_string(params.d) + " helpers, got " +
                                          std::to_string(helpers.size()));
            } else {
                // Most recently repaired first, then lowest node id.
                std::vector<int> live;
                for (int v = 1; v <= params.n; ++v)
                    if (!failed.count(v))
                        live.push_back(v);
                if (static_cast<int>(live.size()) < params.d)
                    throw parameter_error("only " + std::to_string(live.size()) +
                                          " live nodes for d=" + std::to_string(params.d) +
                                          " helpers in stage " + std::to_string(t));
                std::stable_sort(live.begin(), live.end(), [&](int a, int b) {
                    return g.latest_out_stage(a) > g.latest_out_stage(b);
                });
                helpers.assign(live.begin(), live.begin() + params.d);
            }
            auto& src = helper_vertices[i];
            for (int h : helpers)
                src.push_back(g.latest_out(h));
        }

        std::map<int, int> in_idx, mid_idx;
        for (int i : failed) {
            in_idx[i] = g.add_vertex(VertexKind::in, static_cast<int>(t), i);
            mid_idx[i] = g.add_vertex(VertexKind::mid, static_cast<int>(t), i);
        }
        for (int i : failed) {
            for (int src : helper_vertices[i])
                g.add_edge(src, in_idx[i], params.beta1);
            g.add_edge(in_idx[i], mid_idx[i], Rational(0), /*infinite=*/true);
            const int out = g.add_vertex(VertexKind::out, static_cast<int>(t), i);
            g.add_edge(mid_idx[i], out, params.alpha);
            g.latest_out_[i] = out;
        }
        for (int i : failed)
            for (int j : failed)
                if (i != j)
                    g.add_edge(in_idx[i], mid_idx[j], params.beta2);
    }

    std::set<int> dc_set(dc_nodes.begin(), dc_nodes.end());
    if (static_cast<int>(dc_set.size()) != params.k || dc_set.size() != dc_nodes.size())
        throw parameter_error("data collector needs k=" + std::to_string(params.k) +
                              " distinct nodes");
    g.dc_ = g.add_vertex(VertexKind::dc, g.stage_count_, 0);
    for (int i : dc_nodes)
        g.add_edge(g.latest_out(i), g.dc_, Rational(0), /*infinite=*/true);
    return g;
}

/// Exact max-flow from S to DC. Infinite capacities are replaced by the sum
/// of all finite capacities plus one; rationals are scaled to integers by
/// the common denominator, so the search is exact.
inline Rational max_flow(const FlowGraph& g) {
    Rational finite_sum = 0;
    for (const FlowEdge& e : g.edges())
        if (!e.infinite)
            finite_sum += e.capacity;
    const Rational inf_cap = finite_sum + 1;

    BigInt scale = 1;
    auto fold_denominator = [&scale](const Rational& r) {
        const BigInt den = denominator(r);
        scale = scale / gcd(scale, den) * den;
    };
    for (const FlowEdge& e : g.edges())
        fold_denominator(e.infinite ? inf_cap : e.capacity);

    const int n = static_cast<int>(g.vertices().size());
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    struct Arc {
        int to;
        BigInt residual;
    };
    std::vector<Arc> arcs;
    auto add_arc = [&](int from, int to, BigInt cap) {
        adj[size_t(from)].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({to, std::move(cap)});
        adj[size_t(to)].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({from, BigInt(0)});
    };
    for (const FlowEdge& e : g.edges()) {
        const Rational cap = e.infinite ? inf_cap : e.capacity;
        add_arc(e.from, e.to, BigInt(numerator(cap) * (scale / denominator(cap))));
    }

    const int s = g.source(), t = g.dc();
    BigInt flow = 0;
    while (true) {
        std::vector<int> parent_arc(size_t(n), -1);
        std::queue<int> q;
        q.push(s);
        std::vector<bool> seen(size_t(n), false);
        seen[size_t(s)] = true;
        while (!q.empty() && !seen[size_t(t)]) {
            const int v = q.front();
            q.pop();
            for (int a : adj[size_t(v)]) {
                if (arcs[size_t(a)].residual == 0)
                    continue;
                const int to = arcs[size_t(a)].to;
                if (seen[size_t(to)])
                    continue;
                seen[size_t(to)] = true;
                parent_arc[size_t(to)] = a;
                q.push(to);
            }
        }
        if (!seen[size_t(t)])
            break;
        BigInt push = -1;
        for (int v = t; v != s; v = arcs[size_t(parent_arc[size_t(v)] ^ 1)].to) {
            const BigInt& res = arcs[size_t(parent_arc[size_t(v)])].residual;
            if (push < 0 || res < push)
                push = res;
        }
        for (int v = t; v != s; v = arcs[size_t(parent_arc[size_t(v)] ^ 1)].to) {
            arcs[size_t(parent_arc[size_t(v)])].residual -= push;
            arcs[size_t(parent_arc[size_t(v)]) ^ 1].residual += push;
        }
        flow += push;
    }
    return Rational(flow) / Rational(scale);
}

/// An (S, DC)-cut as the set of far-side ("DC side") vertices.
struct CutPartition {
    std::vector<bool> far_side;
};

/// Staged cut of the given type: the designated newcomers' in/mid/out
/// triples plus DC form the far side. `designated` lists, per type part,
/// the repair stage and the part's node ids.
inline CutPartition type_cut(const FlowGraph& g, const CutType& type,
                             const std::vector<std::pair<int, std::vector<int>>>& designated) {
    if (designated.size() != type.parts.size())
        throw parameter_error("designated stages do not match cut type " + type.str());
    CutPartition cut;
    cut.far_side.assign(g.vertices().size(), false);
    int prev_stage = 0;
    for (size_t v = 0; v < designated.size(); ++v) {
        const auto& [stage, nodes] = designated[v];
        if (stage <= prev_stage || stage > g.stage_count())
            throw parameter_error("designated stages must be strictly increasing and exist");
        prev_stage = stage;
        if (static_cast<int>(nodes.size()) != type.parts[v])
            throw parameter_error("stage " + std::to_string(stage) + " designates " +
                                  std::to_string(nodes.size()) + " nodes, type wants " +
                                  std::to_string(type.parts[v]));
        for (int i : nodes) {
            if (!g.has_vertex(VertexKind::in, stage, i))
                throw parameter_error("node " + std::to_string(i) +
                                      " was not repaired in stage " + std::to_string(stage));
            if (g.latest_out_stage(i) != stage)
                throw parameter_error("node " + std::to_string(i) +
                                      " was repaired again after stage " + std::to_string(stage) +
                                      "; its stage-" + std::to_string(stage) +
                                      " copy is not the one the collector reads");
            cut.far_side[size_t(g.vertex_index(VertexKind::in, stage, i))] = true;
            cut.far_side[size_t(g.vertex_index(VertexKind::mid, stage, i))] = true;
            cut.far_side[size_t(g.vertex_index(VertexKind::out, stage, i))] = true;
        }
    }
    cut.far_side[size_t(g.dc())] = true;
    return cut;
}

struct CutCapacity {
    bool infinite = false;
    Rational value;
    std::map<int, Rational> by_stage; // crossing capacity into each far-side stage
};

inline CutCapacity cut_capacity(const FlowGraph& g, const CutPartition& cut) {
    if (cut.far_side.size() != g.vertices().size())
        throw parameter_error("partition does not match graph");
    if (cut.far_side[size_t(g.source())])
        throw parameter_error("source must be on the near side");
    if (!cut.far_side[size_t(g.dc())])
        throw parameter_error("data collector must be on the far side");
    CutCapacity out;
    for (const FlowEdge& e : g.edges()) {
        if (cut.far_side[size_t(e.from)] || !cut.far_side[size_t(e.to)])
            continue;
        if (e.infinite) {
            out.infinite = true;
            continue;
        }
        out.value += e.capacity;
        out.by_stage[g.vertices()[size_t(e.to)].stage] += e.capacity;
    }
    return out;
}

struct HistorySpec {
    FlowParams params;
    RepairHistory history;
};

namespace detail {

inline std::vector<int> parse_id_list(const std::string& text, int line) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos)
            comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        try {
            size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size())
                throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw spec_parse_error(line, "expected a node id, got '" + item + "'");
        }
        pos = comma + 1;
    }
    if (out.empty())
        throw spec_parse_error(line, "empty id list");
    return out;
}

} // namespace detail

/*
 * History spec text format, one directive per line ('#' starts a comment):
 *
 *   params n=5 k=3 d=3 r=2 alpha=7 beta1=2 beta2=1
 *   stage fail=4,5
 *   stage fail=1,2 helpers 1=3,4,5 2=3,4,5
 *
 * The params line comes first; capacities accept exact rationals ("16/3").
 * Stages without a helpers clause use the default rule (all survivors when
 * d = n-r, otherwise the most recently repaired live nodes).
 */
inline HistorySpec parse_history_spec(std::istream& is) {
    HistorySpec spec;
    bool have_params = false;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::istringstream words(line);
        std::string word;
        if (!(words >> word))
            continue;
        if (word == "params") {
            if (have_params)
                throw spec_parse_error(line_no, "duplicate params line");
            std::map<std::string, std::string> kv;
            while (words >> word) {
                const size_t eq = word.find('=');
                if (eq == std::string::npos)
                    throw spec_parse_error(line_no, "expected key=value, got '" + word + "'");
                kv[word.substr(0, eq)] = word.substr(eq + 1);
            }
            for (const char* key : {"n", "k", "d", "r", "alpha", "beta1", "beta2"})
                if (!kv.count(key))
                    throw spec_parse_error(line_no, std::string("params line missing ") + key);
            try {
                spec.params.n = std::stoi(kv["n"]);
                spec.params.k = std::stoi(kv["k"]);
                spec.params.d = std::stoi(kv["d"]);
                spec.params.r = std::stoi(kv["r"]);
                spec.params.alpha = parse_rational(kv["alpha"]);
                spec.params.beta1 = parse_rational(kv["beta1"]);
                spec.params.beta2 = parse_rational(kv["beta2"]);
            } catch (const spec_parse_error&) {
                throw;
            } catch (const std::exception& e) {
                throw spec_parse_error(line_no, e.what());
            }
            have_params = true;
        } else if (word == "stage") {
            if (!have_params)
                throw spec_parse_error(line_no, "stage before params line");
            RepairStage stage;
            if (!(words >> word) || word.rfind("fail=", 0) != 0)
                throw spec_parse_error(line_no, "stage line needs fail=<id,id,...>");
            stage.failed = detail::parse_id_list(word.substr(5), line_no);
            if (words >> word) {
                if (word != "helpers")
                    throw spec_parse_error(line_no, "unexpected token '" + word + "'");
                while (words >> word) {
                    const size_t eq = word.find('=');
                    if (eq == std::string::npos)
                        throw spec_parse_error(line_no,
                                               "helpers entries look like <id>=<h,h,...>");
                    int newcomer = 0;
                    try {
                        newcomer = std::stoi(word.substr(0, eq));
                    } catch (const std::exception&) {
                        throw spec_parse_error(line_no, "bad newcomer id in helpers clause");
                    }
                    stage.helpers[newcomer] = detail::parse_id_list(word.substr(eq + 1), line_no);
                }
            }
            spec.history.stages.push_back(std::move(stage));
        } else {
            throw spec_parse_error(line_no, "unknown directive '" + word + "'");
        }
    }
    if (!have_params)
        throw spec_parse_error(line_no, "missing params line");
    return spec;
}

/// One edge per line: <from> <to> <capacity>, vertices as stage:kind:node.
inline void write_edge_list(const FlowGraph& g, std::ostream& os) {
    for (const FlowEdge& e : g.edges()) {
        os << g.vertex_name(e.from) << ' ' << g.vertex_name(e.to) << ' ';
        if (e.infinite)
            os << "inf";
        else
            os << to_string(e.capacity);
        os << '\n';
    }
}

} // namespace mbcr
