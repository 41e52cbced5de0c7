#pragma once

/*
 * Construction and verification of k x (n-1) MDS generator matrices: every
 * k columns linearly independent. Two kinds are supported:
 *
 *  - builtin_gf2: the hard-coded 3x4 matrix over GF(2) whose rows are
 *    (1,1,0,0), (1,0,1,0), (1,0,0,1); verified MDS at construction.
 *  - vandermonde: column j is (1, p_j, p_j^2, ..., p_j^{k-1}) for pairwise
 *    distinct evaluation points p_j; requires q >= length.
 */

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace mbcr {

enum class GeneratorKind : uint8_t { builtin_gf2 = 0, vandermonde = 1 };

struct GeneratorSpec {
    GeneratorKind kind;
    int k = 0;
    int length = 0; // n - 1
    std::shared_ptr<const Field> field;
    std::vector<uint32_t> eval_points; // vandermonde only

    static GeneratorSpec builtin_gf2_spec() {
        GeneratorSpec s;
        s.kind = GeneratorKind::builtin_gf2;
        s.k = 3;
        s.length = 4;
        s.field = std::make_shared<Field>(1, 0x3);
        return s;
    }

    static GeneratorSpec vandermonde_spec(int k, int length, std::shared_ptr<const Field> field,
                                          std::vector<uint32_t> points = {}) {
        GeneratorSpec s;
        s.kind = GeneratorKind::vandermonde;
        s.k = k;
        s.length = length;
        s.field = std::move(field);
        if (points.empty() && length > 0) {
            points.resize(length);
            std::iota(points.begin(), points.end(), 0u);
        }
        s.eval_points = std::move(points);
        return s;
    }

    void validate() const {
        if (!field)
            throw parameter_error("generator spec has no field");
        if (k < 1 || length < k)
            throw parameter_error("generator needs 1 <= k <= length, got k=" + std::to_string(k) +
                                  " length=" + std::to_string(length));
        switch (kind) {
        case GeneratorKind::builtin_gf2:
            if (k != 3 || length != 4 || field->degree() != 1)
                throw parameter_error("builtin generator exists only for k=3, length=4 over GF(2)");
            break;
        case GeneratorKind::vandermonde: {
            if (static_cast<uint32_t>(length) > field->order())
                throw parameter_error("vandermonde length " + std::to_string(length) +
                                      " exceeds field order " + std::to_string(field->order()));
            if (static_cast<int>(eval_points.size()) != length)
                throw parameter_error("vandermonde needs exactly " + std::to_string(length) +
                                      " evaluation points");
            for (uint32_t p : eval_points)
                if (p >= field->order())
                    throw parameter_error("evaluation point " + std::to_string(p) +
                                          " outside the field");
            std::vector<uint32_t> sorted = eval_points;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw parameter_error("duplicate vandermonde evaluation points");
            break;
        }
        default:
            throw parameter_error("unknown generator kind");
        }
    }
};

/// True iff every k-column submatrix of G has rank k.
inline bool is_mds(const FieldMatrix& G, int k) {
    if (G.rows() != k)
        throw parameter_error("is_mds: k=" + std::to_string(k) + " does not match row count " +
                              std::to_string(G.rows()));
    if (G.cols() < k)
        throw parameter_error("is_mds: fewer columns than k");
    std::vector<int> subset(k);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
        if (rank(G.select_columns(subset)) != k)
            return false;
        // next k-combination of {0..cols-1}
        int i = k - 1;
        while (i >= 0 && subset[i] == G.cols() - k + i)
            --i;
        if (i < 0)
            return true;
        ++subset[i];
        for (int j = i + 1; j < k; ++j)
            subset[j] = subset[j - 1] + 1;
    }
}

inline FieldMatrix build_generator(const GeneratorSpec& spec) {
    spec.validate();
    const Field& f = *spec.field;
    FieldMatrix G(spec.k, spec.length, f);
    switch (spec.kind) {
    case GeneratorKind::builtin_gf2:
        G = FieldMatrix::from_rows({{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}}, f);
        break;
    case GeneratorKind::vandermonde:
        for (int j = 0; j < spec.length; ++j) {
            FieldElement p(spec.eval_points[j], f);
            FieldElement acc(1, f);
            for (int i = 0; i < spec.k; ++i) {
                G.set(i, j, acc);
                acc *= p;
            }
        }
        break;
    }
    if (!is_mds(G, spec.k))
        throw internal_error("constructed generator is not MDS");
    return G;
}

} // namespace mbcr
