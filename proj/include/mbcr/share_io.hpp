#pragma once

/*
 * On-disk share format and the file-level encode/decode/repair operations.
 *
 * Layout (all header integers little-endian):
 *   magic "MBCR" | version u8 (=1) | n,k,d,r u16 | field degree u8 |
 *   reduction poly u16 | generator kind u8 | eval points (n-1 bytes,
 *   vandermonde only) | node id u16 | original length u64 | stripe count u32
 * Body: per stripe, alpha = k+n-1 symbols (systematic group ascending, then
 * parity offsets t = 1..n-1), each ceil(m/8) bytes, big-endian when m > 8.
 *
 * Files are padded with zeros to a whole number of stripes; the true length
 * in the header restores them on decode. The format is bit-reproducible:
 * identical inputs yield identical share files.
 */

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "code.hpp"

namespace mbcr {

constexpr uint8_t share_format_version = 1;

struct ShareFileHeader {
    uint16_t n = 0, k = 0, d = 0, r = 0;
    uint8_t field_degree = 0;
    uint16_t reduction_poly = 0;
    uint8_t generator_kind = 0;
    std::vector<uint8_t> eval_points; // vandermonde only
    uint16_t node_id = 0;
    uint64_t original_length = 0;
    uint32_t stripe_count = 0;
};

/// Bytes per stored symbol: 1 for m <= 8, 2 for m in 9..16.
inline int symbol_width(const Field& f) { return f.degree() <= 8 ? 1 : 2; }

namespace detail {

inline void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    ByteReader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() {
        auto b = take(2);
        return static_cast<uint16_t>(b[0] | (b[1] << 8));
    }
    uint32_t u32() {
        auto b = take(4);
        return static_cast<uint32_t>(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
               (uint32_t(b[3]) << 24);
    }
    uint64_t u64() {
        uint64_t v = 0;
        auto b = take(8);
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | b[size_t(i)];
        return v;
    }
    std::vector<uint8_t> take(size_t count) {
        if (pos_ + count > data_.size())
            throw corruption_error(path_ + ": truncated share file");
        std::vector<uint8_t> out(data_.begin() + static_cast<long>(pos_),
                                 data_.begin() + static_cast<long>(pos_ + count));
        pos_ += count;
        return out;
    }
    size_t remaining() const { return data_.size() - pos_; }

private:
    const std::string& data_;
    std::string path_;
    size_t pos_ = 0;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path + " for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw io_error("read failure on " + path);
    return data;
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<long>(data.size()));
    if (!out)
        throw io_error("write failure on " + path);
}

} // namespace detail

inline ShareFileHeader make_header(const CodeParams& p, int node_id, uint64_t original_length,
                                   uint32_t stripe_count) {
    ShareFileHeader h;
    h.n = static_cast<uint16_t>(p.n);
    h.k = static_cast<uint16_t>(p.k);
    h.d = static_cast<uint16_t>(p.d);
    h.r = static_cast<uint16_t>(p.r);
    h.field_degree = static_cast<uint8_t>(p.field->degree());
    h.reduction_poly = static_cast<uint16_t>(p.field->reduction_poly() & 0xFFFF);
    h.generator_kind = static_cast<uint8_t>(p.generator_spec.kind);
    if (p.generator_spec.kind == GeneratorKind::vandermonde) {
        for (uint32_t pt : p.generator_spec.eval_points) {
            if (pt > 0xFF)
                throw parameter_error("evaluation point " + std::to_string(pt) +
                                      " does not fit the one-byte share-header slot");
            h.eval_points.push_back(static_cast<uint8_t>(pt));
        }
    }
    h.node_id = static_cast<uint16_t>(node_id);
    h.original_length = original_length;
    h.stripe_count = stripe_count;
    return h;
}

/// Rebuild CodeParams from a header; violations are data corruption.
inline CodeParams params_from_header(const ShareFileHeader& h, const std::string& path) {
    try {
        if (h.d != h.k || h.n != h.d + h.r)
            throw parameter_error("header violates d=k, n=d+r");
        if (h.field_degree < 1 || h.field_degree > 16)
            throw parameter_error("field degree out of range");
        // Bit m of the reduction polynomial is implied (it cannot fit in the
        // 16-bit slot when m = 16).
        const uint32_t poly = (uint32_t{1} << h.field_degree) | h.reduction_poly;
        auto field = std::make_shared<Field>(h.field_degree, poly);
        GeneratorSpec spec;
        if (h.generator_kind == static_cast<uint8_t>(GeneratorKind::builtin_gf2)) {
            spec = GeneratorSpec::builtin_gf2_spec();
            spec.field = std::move(field);
        } else if (h.generator_kind == static_cast<uint8_t>(GeneratorKind::vandermonde)) {
            std::vector<uint32_t> points(h.eval_points.begin(), h.eval_points.end());
            spec = GeneratorSpec::vandermonde_spec(h.k, h.n - 1, std::move(field),
                                                   std::move(points));
        } else {
            throw parameter_error("unknown generator kind " + std::to_string(h.generator_kind));
        }
        return CodeParams::make(h.k, h.r, std::move(spec));
    } catch (const parameter_error& e) {
        throw corruption_error(path + ": invalid share header (" + e.what() + ")");
    }
}

inline void write_share_file(const std::string& path, const CodeParams& p, int node_id,
                             uint64_t original_length, const std::vector<NodeShare>& stripes) {
    const ShareFileHeader h =
        make_header(p, node_id, original_length, static_cast<uint32_t>(stripes.size()));
    std::string out;
    out += "MBCR";
    out.push_back(static_cast<char>(share_format_version));
    detail::put_u16(out, h.n);
    detail::put_u16(out, h.k);
    detail::put_u16(out, h.d);
    detail::put_u16(out, h.r);
    out.push_back(static_cast<char>(h.field_degree));
    detail::put_u16(out, h.reduction_poly);
    out.push_back(static_cast<char>(h.generator_kind));
    for (uint8_t pt : h.eval_points)
        out.push_back(static_cast<char>(pt));
    detail::put_u16(out, h.node_id);
    detail::put_u64(out, h.original_length);
    detail::put_u32(out, h.stripe_count);

    const int width = symbol_width(*p.field);
    auto put_symbol = [&](FieldElement e) {
        if (width == 2)
            out.push_back(static_cast<char>(e.value() >> 8)); // big-endian
        out.push_back(static_cast<char>(e.value() & 0xFF));
    };
    for (const NodeShare& share : stripes) {
        if (share.node_id != node_id)
            throw parameter_error("share/node id mismatch while writing " + path);
        for (FieldElement e : share.systematic)
            put_symbol(e);
        for (FieldElement e : share.parity)
            put_symbol(e);
    }
    detail::write_file(path, out);
}

struct ShareFileData {
    ShareFileHeader header;
    CodeParams params;
    std::vector<NodeShare> stripes;
};

inline ShareFileData read_share_file(const std::string& path) {
    const std::string data = detail::read_file(path);
    detail::ByteReader in(data, path);

    const auto magic = in.take(4);
    if (magic != std::vector<uint8_t>{'M', 'B', 'C', 'R'})
        throw corruption_error(path + ": bad magic; not a share file");
    if (in.u8() != share_format_version)
        throw corruption_error(path + ": unsupported format version");

    ShareFileHeader h;
    h.n = in.u16();
    h.k = in.u16();
    h.d = in.u16();
    h.r = in.u16();
    h.field_degree = in.u8();
    h.reduction_poly = in.u16();
    h.generator_kind = in.u8();
    if (h.generator_kind == static_cast<uint8_t>(GeneratorKind::vandermonde)) {
        if (h.n < 1)
            throw corruption_error(path + ": invalid node count");
        h.eval_points = in.take(size_t(h.n) - 1);
    }
    h.node_id = in.u16();
    h.original_length = in.u64();
    h.stripe_count = in.u32();

    CodeParams params = params_from_header(h, path);
    if (h.node_id < 1 || h.node_id > h.n)
        throw corruption_error(path + ": node id out of range");

    const int width = symbol_width(*params.field);
    const size_t expected_body =
        size_t(h.stripe_count) * size_t(params.node_packets()) * size_t(width);
    if (in.remaining() != expected_body)
        throw corruption_error(path + ": body is " + std::to_string(in.remaining()) +
                               " bytes, header promises " + std::to_string(expected_body));

    auto read_symbol = [&]() -> FieldElement {
        uint32_t v = in.u8();
        if (width == 2)
            v = (v << 8) | in.u8();
        if (v >= params.field->order())
            throw corruption_error(path + ": symbol value " + std::to_string(v) +
                                   " outside the field");
        return {v, *params.field};
    };

    ShareFileData out{h, params, {}};
    out.stripes.reserve(h.stripe_count);
    for (uint32_t s = 0; s < h.stripe_count; ++s) {
        NodeShare share;
        share.node_id = h.node_id;
        for (int i = 0; i < params.k; ++i)
            share.systematic.push_back(read_symbol());
        for (int t = 1; t <= params.n - 1; ++t)
            share.parity.push_back(read_symbol());
        out.stripes.push_back(std::move(share));
    }
    return out;
}

inline std::string share_file_name(int node_id) {
    return "node" + std::to_string(node_id) + ".mbcr";
}

namespace detail {

inline std::vector<FieldElement> bytes_to_symbols(const std::string& bytes, size_t offset,
                                                  size_t count, const Field& f) {
    const int width = symbol_width(f);
    std::vector<FieldElement> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        uint32_t v = 0;
        for (int b = 0; b < width; ++b) {
            const size_t pos = offset + i * size_t(width) + size_t(b);
            v = (v << 8) | (pos < bytes.size() ? static_cast<uint8_t>(bytes[pos]) : 0);
        }
        if (v >= f.order())
            throw parameter_error("input byte value " + std::to_string(v) +
                                  " not representable in GF(2^" + std::to_string(f.degree()) +
                                  "); use a field of degree 8 or 16 for arbitrary data");
        out.emplace_back(v, f);
    }
    return out;
}

inline void symbols_to_bytes(const FieldVector& symbols, const Field& f, std::string& out) {
    const int width = symbol_width(f);
    for (FieldElement e : symbols) {
        if (width == 2)
            out.push_back(static_cast<char>(e.value() >> 8));
        out.push_back(static_cast<char>(e.value() & 0xFF));
    }
}

} // namespace detail

/// Encodes a file into n share files named node<i>.mbcr under out_dir.
inline std::vector<std::string> encode_file(const std::string& input_path,
                                            const std::string& out_dir, const CodeParams& p) {
    const std::string data = detail::read_file(input_path);
    const int width = symbol_width(*p.field);
    const size_t stripe_bytes = size_t(p.stripe_packets()) * size_t(width);
    const size_t stripe_count = (data.size() + stripe_bytes - 1) / stripe_bytes;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw io_error("cannot create directory " + out_dir + ": " + ec.message());

    std::map<int, std::vector<NodeShare>> per_node;
    for (size_t s = 0; s < stripe_count; ++s) {
        const Stripe stripe = detail::bytes_to_symbols(data, s * stripe_bytes,
                                                       size_t(p.stripe_packets()), *p.field);
        for (NodeShare& share : encode_stripe(stripe, p))
            per_node[share.node_id].push_back(std::move(share));
    }

    std::vector<std::string> paths;
    for (int i = 1; i <= p.n; ++i) {
        const std::string path = (std::filesystem::path(out_dir) / share_file_name(i)).string();
        write_share_file(path, p, i, data.size(),
                         stripe_count ? per_node.at(i) : std::vector<NodeShare>{});
        paths.push_back(path);
    }
    return paths;
}

namespace detail {

inline void require_consistent(const ShareFileData& a, const ShareFileData& b,
                               const std::string& path) {
    const ShareFileHeader &ha = a.header, &hb = b.header;
    if (ha.n != hb.n || ha.k != hb.k || ha.d != hb.d || ha.r != hb.r ||
        ha.field_degree != hb.field_degree || ha.reduction_poly != hb.reduction_poly ||
        ha.generator_kind != hb.generator_kind || ha.eval_points != hb.eval_points ||
        ha.original_length != hb.original_length || ha.stripe_count != hb.stripe_count)
        throw parameter_error(path + ": header disagrees with the other shares");
}

} // namespace detail

/// Reconstructs the original file from any k (or more) consistent shares.
inline void decode_file(const std::vector<std::string>& share_paths,
                        const std::string& output_path) {
    if (share_paths.empty())
        throw parameter_error("no share files given");
    std::vector<ShareFileData> shares;
    for (const std::string& path : share_paths) {
        shares.push_back(read_share_file(path));
        detail::require_consistent(shares.front(), shares.back(), path);
    }
    const CodeParams& p = shares.front().params;
    if (static_cast<int>(shares.size()) < p.k)
        throw parameter_error("insufficient shares: got " + std::to_string(shares.size()) +
                              ", need any k=" + std::to_string(p.k));
    std::sort(shares.begin(), shares.end(),
              [](const ShareFileData& a, const ShareFileData& b) {
                  return a.header.node_id < b.header.node_id;
              });
    for (size_t i = 1; i < shares.size(); ++i)
        if (shares[i].header.node_id == shares[i - 1].header.node_id)
            throw parameter_error("duplicate share for node " +
                                  std::to_string(shares[i].header.node_id));

    std::string out;
    const uint32_t stripe_count = shares.front().header.stripe_count;
    for (uint32_t s = 0; s < stripe_count; ++s) {
        std::vector<NodeShare> collector;
        for (int i = 0; i < p.k; ++i)
            collector.push_back(shares[size_t(i)].stripes[s]);
        const Stripe stripe = reconstruct(collector, p);
        detail::symbols_to_bytes(stripe, *p.field, out);
    }
    const uint64_t length = shares.front().header.original_length;
    if (out.size() < length)
        throw corruption_error("decoded " + std::to_string(out.size()) +
                               " bytes but header promises " + std::to_string(length));
    out.resize(length);
    detail::write_file(output_path, out);
}

struct RepairSummary {
    std::vector<int> failed;
    int stripe_count = 0;
    long phase1_packets = 0;
    long phase2_packets = 0;
    std::map<int, Rational> gamma_measured; // per newcomer per stripe
    Rational gamma_bound;
    Rational ratio;
    std::vector<std::string> outputs;
};

/// Regenerates the r failed nodes' share files from all d = n-r survivors.
inline RepairSummary repair_files(const std::vector<std::string>& survivor_paths,
                                  const std::vector<int>& failed_ids,
                                  const std::string& out_dir) {
    if (survivor_paths.empty())
        throw parameter_error("no survivor shares given");
    std::vector<ShareFileData> shares;
    for (const std::string& path : survivor_paths) {
        shares.push_back(read_share_file(path));
        detail::require_consistent(shares.front(), shares.back(), path);
    }
    const CodeParams& p = shares.front().params;

    std::set<int> failed(failed_ids.begin(), failed_ids.end());
    std::set<int> survivor_ids;
    for (const ShareFileData& s : shares)
        if (!survivor_ids.insert(s.header.node_id).second)
            throw parameter_error("duplicate share for node " +
                                  std::to_string(s.header.node_id));
    if (failed.size() != failed_ids.size())
        throw parameter_error("duplicate failed node id");
    for (int id : failed)
        if (survivor_ids.count(id))
            throw parameter_error("node " + std::to_string(id) +
                                  " is listed failed but a share for it was supplied");
    if (static_cast<int>(failed.size()) != p.r ||
        static_cast<int>(survivor_ids.size()) != p.n - p.r)
        throw unsupported_failure_pattern_error(
            "repair needs exactly r=" + std::to_string(p.r) + " failed nodes and all d=" +
            std::to_string(p.n - p.r) + " survivor shares; got " +
            std::to_string(failed.size()) + " failed, " + std::to_string(survivor_ids.size()) +
            " survivors");

    const RepairPlan plan = plan_repair(std::vector<int>(failed.begin(), failed.end()), p);
    std::map<int, std::vector<NodeShare>> survivor_shares;
    for (ShareFileData& s : shares)
        survivor_shares.emplace(s.header.node_id, std::move(s.stripes));
    auto [regenerated, transcript] = execute_repair(plan, survivor_shares, p);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw io_error("cannot create directory " + out_dir + ": " + ec.message());

    RepairSummary summary;
    summary.failed = plan.failed;
    summary.stripe_count = static_cast<int>(shares.front().header.stripe_count);
    summary.phase1_packets = transcript.packets(1, summary.stripe_count);
    summary.phase2_packets = transcript.packets(2, summary.stripe_count);
    const SystemParams sys{p.stripe_packets(), p.k, p.d, p.r, p.n};
    summary.gamma_bound = mbcr_lower_bound(sys);
    Rational worst = 0;
    for (const auto& [node, packets] : transcript.received_packets()) {
        const Rational per_stripe =
            summary.stripe_count ? Rational(packets) / summary.stripe_count : Rational(0);
        summary.gamma_measured[node] = per_stripe;
        worst = std::max(worst, per_stripe);
    }
    summary.ratio = worst / summary.gamma_bound;
    for (int j : plan.failed) {
        const std::string path = (std::filesystem::path(out_dir) / share_file_name(j)).string();
        write_share_file(path, p, j, shares.front().header.original_length, regenerated.at(j));
        summary.outputs.push_back(path);
    }
    return summary;
}

} // namespace mbcr
