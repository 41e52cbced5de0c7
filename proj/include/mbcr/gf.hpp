#pragma once

/*
 * Arithmetic in binary extension fields GF(2^m), 1 <= m <= 16.
 *
 * A Field owns log/antilog tables built at construction; the reduction
 * polynomial is verified irreducible by an exhaustive trial-division test.
 * Elements are polynomial-basis bitmasks, addition is XOR, multiplication
 * goes through the discrete-log tables.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mbcr {

namespace detail {

/// Degree of a nonzero GF(2) polynomial bitmask.
inline int poly_degree(uint32_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

/// Remainder of a modulo b over GF(2), b != 0.
inline uint32_t poly_mod(uint64_t a, uint32_t b) {
    const int db = poly_degree(b);
    for (int shift = 63 - db; shift >= 0; --shift) {
        if (a & (uint64_t{1} << (shift + db)))
            a ^= uint64_t{b} << shift;
    }
    return static_cast<uint32_t>(a);
}

/// Carryless product of two GF(2) polynomial bitmasks.
inline uint64_t poly_mul(uint32_t a, uint32_t b) {
    uint64_t acc = 0;
    for (int i = 0; i <= poly_degree(b); ++i)
        if (b & (uint32_t{1} << i))
            acc ^= uint64_t{a} << i;
    return acc;
}

} // namespace detail

class Field {
public:
    Field(unsigned degree, uint32_t reduction_poly)
        : degree_(degree), poly_(reduction_poly) {
        if (degree < 1 || degree > 16)
            throw parameter_error("field degree must be in [1, 16], got " + std::to_string(degree));
        if (detail::poly_degree(poly_) != static_cast<int>(degree))
            throw parameter_error("reduction polynomial 0x" + hex(poly_) + " does not have degree " +
                                  std::to_string(degree));
        if (!is_irreducible(poly_))
            throw parameter_error("reduction polynomial 0x" + hex(poly_) + " is reducible over GF(2)");
        build_tables();
    }

    unsigned degree() const { return degree_; }
    uint32_t order() const { return uint32_t{1} << degree_; }
    uint32_t reduction_poly() const { return poly_; }

    uint32_t add(uint32_t a, uint32_t b) const {
        check_element(a);
        check_element(b);
        return a ^ b;
    }

    uint32_t mul(uint32_t a, uint32_t b) const {
        check_element(a);
        check_element(b);
        if (a == 0 || b == 0)
            return 0;
        return exp_[(log_[a] + log_[b]) % (order() - 1)];
    }

    uint32_t inv(uint32_t a) const {
        check_element(a);
        if (a == 0)
            throw division_by_zero_error("inverse of zero in GF(2^" + std::to_string(degree_) + ")");
        return exp_[(order() - 1 - log_[a]) % (order() - 1)];
    }

    friend bool operator==(const Field& a, const Field& b) {
        return a.degree_ == b.degree_ && a.poly_ == b.poly_;
    }
    friend bool operator!=(const Field& a, const Field& b) { return !(a == b); }

    /// Conventional primitive polynomial for each supported degree.
    static uint32_t default_reduction_poly(unsigned degree) {
        static constexpr uint32_t polys[17] = {
            0,      0x3,    0x7,    0xB,    0x13,   0x25,    0x43,   0x89,  0x11D,
            0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443,  0x8003, 0x1100B};
        if (degree < 1 || degree > 16)
            throw parameter_error("no default polynomial for degree " + std::to_string(degree));
        return polys[degree];
    }

private:
    static std::string hex(uint32_t v) {
        static const char* digits = "0123456789ABCDEF";
        std::string s;
        do {
            s.insert(s.begin(), digits[v & 0xF]);
            v >>= 4;
        } while (v);
        return s;
    }

    static bool is_irreducible(uint32_t p) {
        const int deg = detail::poly_degree(p);
        // Trial division by every polynomial of degree 1..deg/2.
        for (uint32_t div = 2; detail::poly_degree(div) <= deg / 2; ++div)
            if (detail::poly_mod(p, div) == 0)
                return false;
        return true;
    }

    void check_element(uint32_t v) const {
        if (v >= order())
            throw parameter_error("value " + std::to_string(v) + " outside GF(2^" +
                                  std::to_string(degree_) + ")");
    }

    uint32_t raw_mul(uint32_t a, uint32_t b) const {
        return detail::poly_mod(detail::poly_mul(a, b), poly_);
    }

    void build_tables() {
        const uint32_t q = order();
        exp_.assign(q - 1, 1);
        log_.assign(q, 0);
        if (q == 2) {
            log_[1] = 0;
            return;
        }
        uint32_t g = find_generator();
        uint32_t acc = 1;
        for (uint32_t i = 0; i < q - 1; ++i) {
            exp_[i] = static_cast<uint16_t>(acc);
            log_[acc] = i;
            acc = raw_mul(acc, g);
        }
    }

    uint32_t find_generator() const {
        const uint32_t q = order();
        for (uint32_t g = 2; g < q; ++g) {
            uint32_t acc = g;
            uint32_t steps = 1;
            while (acc != 1) {
                acc = raw_mul(acc, g);
                ++steps;
            }
            if (steps == q - 1)
                return g;
        }
        throw internal_error("no multiplicative generator found; field tables corrupt");
    }

    unsigned degree_;
    uint32_t poly_;
    std::vector<uint16_t> exp_;
    std::vector<uint32_t> log_;
};

/// A value in [0, q-1] bound to its field; arithmetic checks field identity.
class FieldElement {
public:
    FieldElement(uint32_t value, const Field& field) : value_(value), field_(&field) {
        if (value >= field.order())
            throw parameter_error("element value " + std::to_string(value) + " >= field order " +
                                  std::to_string(field.order()));
    }

    uint32_t value() const { return value_; }
    const Field& field() const { return *field_; }
    bool is_zero() const { return value_ == 0; }

    FieldElement inverse() const { return {field_->inv(value_), *field_}; }

    friend FieldElement operator+(FieldElement a, FieldElement b) {
        require_same_field(a, b);
        return {a.field_->add(a.value_, b.value_), *a.field_};
    }
    friend FieldElement operator-(FieldElement a, FieldElement b) { return a + b; }
    friend FieldElement operator*(FieldElement a, FieldElement b) {
        require_same_field(a, b);
        return {a.field_->mul(a.value_, b.value_), *a.field_};
    }
    friend FieldElement operator/(FieldElement a, FieldElement b) { return a * b.inverse(); }

    FieldElement& operator+=(FieldElement b) { return *this = *this + b; }
    FieldElement& operator*=(FieldElement b) { return *this = *this * b; }

    friend bool operator==(FieldElement a, FieldElement b) {
        require_same_field(a, b);
        return a.value_ == b.value_;
    }
    friend bool operator!=(FieldElement a, FieldElement b) { return !(a == b); }

private:
    static void require_same_field(FieldElement a, FieldElement b) {
        if (*a.field_ != *b.field_)
            throw parameter_error("operands from different fields: GF(2^" +
                                  std::to_string(a.field_->degree()) + ") vs GF(2^" +
                                  std::to_string(b.field_->degree()) + ")");
    }

    uint32_t value_;
    const Field* field_;
};

inline FieldElement gf_add(FieldElement a, FieldElement b) { return a + b; }
inline FieldElement gf_mul(FieldElement a, FieldElement b) { return a * b; }
inline FieldElement gf_inv(FieldElement a) { return a.inverse(); }

} // namespace mbcr
