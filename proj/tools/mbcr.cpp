// Command-line front end: encode/decode/repair share files, query repair
// bandwidth bounds, build information flow graphs, and run fail-and-repair
// simulations.
//
// Exit codes: 0 success, 1 usage error, 2 data corruption, 3 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <mbcr/bounds.hpp>
#include <mbcr/code.hpp>
#include <mbcr/flowgraph.hpp>
#include <mbcr/share_io.hpp>
#include <mbcr/simulator.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace mbcr;

std::vector<int> parse_csv_ints(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw parameter_error(what + ": expected comma-separated integers, got '" + text +
                                  "'");
        }
    }
    if (out.empty())
        throw parameter_error(what + ": empty list");
    return out;
}

uint32_t parse_poly(const std::string& text) {
    try {
        size_t used = 0;
        const unsigned long v = std::stoul(text, &used, 0); // accepts 0x... and decimal
        if (used != text.size() || v > 0x1FFFF)
            throw std::invalid_argument(text);
        return static_cast<uint32_t>(v);
    } catch (const std::exception&) {
        throw parameter_error("bad polynomial '" + text + "' (use e.g. 0x11D)");
    }
}

struct CodeFlags {
    int k = 0, r = 0;
    int n = -1, d = -1;
    unsigned degree = 8;
    std::string poly;
    std::string generator = "auto";
    std::string eval_points;

    void attach(CLI::App& cmd) {
        cmd.add_option("-k", k, "data groups per stripe (= d)")->required();
        cmd.add_option("-r", r, "simultaneous failures repaired per round")->required();
        cmd.add_option("-n", n, "total nodes (must equal k + r; default)");
        cmd.add_option("-d", d, "helpers per newcomer (must equal k; default)");
        cmd.add_option("--field-degree", degree, "field degree m, packets in GF(2^m)")
            ->default_val(8);
        cmd.add_option("--field-poly", poly,
                       "reduction polynomial bitmask (default per degree; "
                       "MBCR_FIELD_POLY overrides)");
        cmd.add_option("--generator", generator, "auto | builtin | vandermonde")
            ->default_val("auto");
        cmd.add_option("--eval-points", eval_points,
                       "comma-separated vandermonde points (default 0..n-2)");
    }

    CodeParams build() const {
        if (k < 1 || r < 1)
            throw parameter_error("need k >= 1 and r >= 1");
        if (n != -1 && n != k + r)
            throw parameter_error("this family requires n = d + r = " + std::to_string(k + r) +
                                  ", got n = " + std::to_string(n));
        if (d != -1 && d != k)
            throw parameter_error("this family requires d = k = " + std::to_string(k) +
                                  ", got d = " + std::to_string(d));
        uint32_t poly_mask;
        if (!poly.empty()) {
            poly_mask = parse_poly(poly);
        } else if (const char* env = std::getenv("MBCR_FIELD_POLY"); env && *env) {
            poly_mask = parse_poly(env);
        } else {
            poly_mask = Field::default_reduction_poly(degree);
        }
        auto field = std::make_shared<Field>(degree, poly_mask);

        std::string kind = generator;
        if (kind == "auto")
            kind = (k == 3 && r == 2 && field->degree() == 1) ? "builtin" : "vandermonde";
        GeneratorSpec spec;
        if (kind == "builtin") {
            spec = GeneratorSpec::builtin_gf2_spec();
            if (*spec.field != *field)
                throw parameter_error("the builtin generator lives in GF(2)");
            spec.field = field;
        } else if (kind == "vandermonde") {
            std::vector<uint32_t> points;
            if (!eval_points.empty())
                for (int p : parse_csv_ints(eval_points, "--eval-points"))
                    points.push_back(static_cast<uint32_t>(p));
            spec = GeneratorSpec::vandermonde_spec(k, k + r - 1, field, std::move(points));
            if (static_cast<uint32_t>(k + r - 1) > field->order())
                throw parameter_error("vandermonde needs q >= n-1: GF(2^" +
                                      std::to_string(degree) + ") is too small for n = " +
                                      std::to_string(k + r));
        } else {
            throw parameter_error("unknown generator kind '" + generator + "'");
        }
        return CodeParams::make(k, r, std::move(spec));
    }
};

std::string rational_line(const Rational& v) {
    std::ostringstream os;
    os << to_string(v) << " (~" << to_double(v) << ")";
    return os.str();
}

int cmd_bound(long B, int k, int d, int r, bool compare_single_loss, bool lp_verify) {
    const SystemParams sys{B, k, d, r, 0};
    const Rational bound = mbcr_lower_bound(sys);
    const auto [b1, b2] = mbcr_point(sys);
    std::cout << "gamma_bound = " << rational_line(bound) << "\n";
    std::cout << "optimal split: beta1 = " << rational_line(b1)
              << ", beta2 = " << rational_line(b2) << "\n";
    if (compare_single_loss) {
        const Rational single = single_loss_bound(B, k, d);
        std::cout << "single-loss bound = " << rational_line(single) << "\n";
        std::cout << "cooperative saving = " << rational_line(single - bound) << "\n";
    }
    if (lp_verify) {
        const LpResult lp = optimal_tradeoff_lp(sys);
        std::cout << "lp optimum: beta1 = " << to_string(lp.beta1)
                  << ", beta2 = " << to_string(lp.beta2) << ", gamma = " << to_string(lp.gamma)
                  << "\n";
        const bool match = lp.beta1 == b1 && lp.beta2 == b2 && lp.gamma == bound;
        std::cout << (match ? "lp verdict: vertex matches closed form"
                            : "lp verdict: MISMATCH against closed form")
                  << "\n";
        if (!match)
            return 1;
    }
    return 0;
}

void print_repair_summary(const RepairSummary& s) {
    std::cout << "repaired nodes:";
    for (int j : s.failed)
        std::cout << " " << j;
    std::cout << "\nstripes: " << s.stripe_count << "\n";
    std::cout << "phase-1 packets: " << s.phase1_packets
              << ", phase-2 packets: " << s.phase2_packets
              << ", total: " << (s.phase1_packets + s.phase2_packets) << "\n";
    for (const auto& [node, g] : s.gamma_measured)
        std::cout << "newcomer " << node << " received " << rational_line(g)
                  << " packets per stripe\n";
    std::cout << "bound per newcomer: " << rational_line(s.gamma_bound) << "\n";
    std::cout << "measured/bound ratio: " << rational_line(s.ratio) << "\n";
    for (const std::string& path : s.outputs)
        std::cout << "wrote " << path << "\n";
}

nlohmann::json repair_summary_json(const RepairSummary& s) {
    nlohmann::json j;
    j["failed"] = s.failed;
    j["stripe_count"] = s.stripe_count;
    j["phase1_packets"] = s.phase1_packets;
    j["phase2_packets"] = s.phase2_packets;
    nlohmann::json jg;
    for (const auto& [node, g] : s.gamma_measured)
        jg[std::to_string(node)] = to_string(g);
    j["gamma_measured"] = jg;
    j["bound"] = to_string(s.gamma_bound);
    j["ratio"] = to_string(s.ratio);
    j["outputs"] = s.outputs;
    return j;
}

int cmd_flowgraph(const std::string& spec_path, const std::string& dc_csv,
                  const std::string& export_path, const std::string& cut_req) {
    std::ifstream in(spec_path);
    if (!in)
        throw io_error("cannot open " + spec_path);
    const HistorySpec spec = parse_history_spec(in);
    const std::vector<int> dc = parse_csv_ints(dc_csv, "--dc");
    const FlowGraph graph = build_graph(spec.params, spec.history, dc);

    if (!export_path.empty()) {
        std::ofstream out(export_path);
        if (!out)
            throw io_error("cannot open " + export_path + " for writing");
        write_edge_list(graph, out);
        std::cout << "edge list written to " << export_path << "\n";
    }
    std::cout << "vertices: " << graph.vertices().size() << ", edges: " << graph.edges().size()
              << "\n";
    std::cout << "max_flow = " << rational_line(max_flow(graph)) << "\n";

    // The staged cut a collector induces: its nodes grouped by repair stage.
    std::map<int, std::vector<int>> by_stage;
    bool all_repaired = true;
    for (int node : dc) {
        const int stage = graph.latest_out_stage(node);
        if (stage == 0)
            all_repaired = false;
        else
            by_stage[stage].push_back(node);
    }
    if (!all_repaired) {
        std::cout << "type cut: n/a (collector reads never-repaired nodes)\n";
        if (!cut_req.empty())
            throw parameter_error("--cut requires a collector of repaired nodes");
        return 0;
    }
    CutType type;
    std::vector<std::pair<int, std::vector<int>>> designated;
    for (auto& [stage, nodes] : by_stage) {
        std::sort(nodes.begin(), nodes.end());
        type.parts.push_back(static_cast<int>(nodes.size()));
        designated.emplace_back(stage, nodes);
    }
    if (!cut_req.empty()) {
        const std::vector<int> want = parse_csv_ints(cut_req, "--cut");
        if (want != type.parts)
            throw parameter_error("requested cut type does not match the collector's stage "
                                  "distribution " +
                                  type.str());
    }
    const CutCapacity cap = cut_capacity(graph, type_cut(graph, type, designated));
    std::cout << "cut type " << type.str() << " capacity = "
              << (cap.infinite ? std::string("inf") : rational_line(cap.value)) << "\n";
    return 0;
}

std::vector<std::vector<int>> parse_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open schedule " + path);
    std::vector<std::vector<int>> schedule;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = raw.substr(0, raw.find('#'));
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)))
                trimmed += c;
        if (trimmed.empty())
            continue;
        try {
            schedule.push_back(parse_csv_ints(trimmed, "schedule"));
        } catch (const parameter_error& e) {
            throw spec_parse_error(line_no, e.what());
        }
    }
    return schedule;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-bandwidth cooperative regenerating codes: encode files across n "
                 "nodes, rebuild from any k, repair any r simultaneous failures at the "
                 "bandwidth lower bound, and certify the bound by LP and max-flow."};
    app.require_subcommand(1);

    // encode
    auto* enc = app.add_subcommand("encode", "split a file into n share files");
    std::string enc_input, enc_outdir;
    CodeFlags enc_flags;
    enc->add_option("input", enc_input, "file to encode")->required();
    enc->add_option("-o,--out-dir", enc_outdir, "directory for the share files")->required();
    enc_flags.attach(*enc);

    // decode
    auto* dec = app.add_subcommand("decode", "rebuild the file from any k share files");
    std::vector<std::string> dec_shares;
    std::string dec_output;
    dec->add_option("shares", dec_shares, "share files (any k of n)")->required();
    dec->add_option("-o,--output", dec_output, "output path")->required();

    // repair
    auto* rep = app.add_subcommand("repair", "regenerate failed nodes from all survivors");
    std::vector<std::string> rep_shares;
    std::string rep_failed, rep_outdir, rep_transcript;
    rep->add_option("shares", rep_shares, "survivor share files (all d = n-r)")->required();
    rep->add_option("--failed", rep_failed, "comma-separated failed node ids")->required();
    rep->add_option("-o,--out-dir", rep_outdir, "directory for regenerated shares")->required();
    rep->add_option("--transcript", rep_transcript, "write the repair transcript as JSON");

    // bound
    auto* bnd = app.add_subcommand("bound", "evaluate the repair-bandwidth lower bound");
    long bnd_B = 0;
    int bnd_k = 0, bnd_d = 0, bnd_r = 0;
    bool bnd_single = false, bnd_lp = false;
    bnd->add_option("-B", bnd_B, "file size in packets")->required();
    bnd->add_option("-k", bnd_k, "collector degree")->required();
    bnd->add_option("-d", bnd_d, "helpers per newcomer")->required();
    bnd->add_option("-r", bnd_r, "simultaneous failures")->required();
    bnd->add_flag("--compare-single-loss", bnd_single, "also print the one-by-one repair bound");
    bnd->add_flag("--lp-verify", bnd_lp, "certify the bound by the exact cut-constraint LP");

    // flowgraph
    auto* flw = app.add_subcommand("flowgraph", "build an information flow graph");
    std::string flw_spec, flw_dc, flw_export, flw_cut;
    flw->add_option("--spec", flw_spec, "history spec file")->required();
    flw->add_option("--dc", flw_dc, "comma-separated collector node ids")->required();
    flw->add_option("-o,--export", flw_export, "write the edge list to this path");
    flw->add_option("--cut", flw_cut, "report the staged cut of this type, e.g. 2,1,2");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run fail-and-repair rounds and audit");
    CodeFlags sim_flags;
    int sim_rounds = -1, sim_stripes = 1;
    uint64_t sim_seed = 0;
    std::string sim_schedule, sim_output;
    sim_flags.attach(*sim);
    sim->add_option("--rounds", sim_rounds, "fail-and-repair rounds (default: schedule length)");
    sim->add_option("--seed", sim_seed, "rng seed, recorded in the report")->default_val(0);
    sim->add_option("--schedule", sim_schedule, "explicit failure schedule, one id list per line");
    sim->add_option("--stripes", sim_stripes, "stripes of random data")->default_val(1);
    sim->add_option("-o,--output", sim_output, "write the JSON report here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (enc->parsed()) {
            const CodeParams params = enc_flags.build();
            for (const std::string& path : encode_file(enc_input, enc_outdir, params))
                std::cout << "wrote " << path << "\n";
        } else if (dec->parsed()) {
            decode_file(dec_shares, dec_output);
            std::cout << "wrote " << dec_output << "\n";
        } else if (rep->parsed()) {
            const RepairSummary summary =
                repair_files(rep_shares, parse_csv_ints(rep_failed, "--failed"), rep_outdir);
            print_repair_summary(summary);
            if (!rep_transcript.empty()) {
                std::ofstream out(rep_transcript);
                if (!out)
                    throw io_error("cannot open " + rep_transcript + " for writing");
                out << repair_summary_json(summary).dump(2) << "\n";
            }
        } else if (bnd->parsed()) {
            return cmd_bound(bnd_B, bnd_k, bnd_d, bnd_r, bnd_single, bnd_lp);
        } else if (flw->parsed()) {
            return cmd_flowgraph(flw_spec, flw_dc, flw_export, flw_cut);
        } else if (sim->parsed()) {
            FailureModel model = FailureModel::uniform();
            if (!sim_schedule.empty())
                model = FailureModel::from_schedule(parse_schedule_file(sim_schedule));
            int rounds = sim_rounds;
            if (rounds < 0) {
                if (model.kind != FailureModel::Kind::explicit_schedule)
                    throw parameter_error("--rounds is required without a schedule");
                rounds = static_cast<int>(model.schedule.size());
            }
            const CodeParams params = sim_flags.build();
            const BandwidthReport report =
                run_simulation(params, rounds, model, sim_seed, sim_stripes);
            const std::string doc = to_json(report).dump(2) + "\n";
            if (sim_output.empty()) {
                std::cout << doc;
            } else {
                std::ofstream out(sim_output);
                if (!out)
                    throw io_error("cannot open " + sim_output + " for writing");
                out << doc;
            }
            if (!(report.all_ratio_one && report.all_audits_passed && report.all_state_restored))
                return 2;
        }
    } catch (const corruption_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mbcr::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
