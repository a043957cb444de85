#pragma once

// Dense univariate polynomials with exact coefficient arithmetic.
//
// basic_poly<T> is a thin coefficient vector (index = degree). The production
// instantiation is IntPoly over GMP's mpz_class: domination polynomials are
// counts and must never overflow or round. A uint64 instantiation exists as a
// fast path for small trees inside the search loop; callers there guarantee
// the counts fit (every coefficient of a domination polynomial on n vertices
// is at most 2^n).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace domlc {

template <typename T>
struct basic_poly {
    std::vector<T> c;  // c[i] = coefficient of x^i

    basic_poly() = default;
    explicit basic_poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}
    basic_poly(std::initializer_list<T> coeffs) : c(coeffs) {}

    static basic_poly zero() { return basic_poly{}; }
    static basic_poly one() { return basic_poly{T(1)}; }
    // x^k
    static basic_poly monomial(std::size_t k, T coeff = T(1)) {
        basic_poly p;
        p.c.assign(k + 1, T(0));
        p.c[k] = std::move(coeff);
        return p;
    }

    bool is_zero() const {
        for (const T& v : c)
            if (v != 0) return false;
        return true;
    }

    // Degree of the trimmed polynomial; -1 for the zero polynomial.
    long degree() const {
        for (std::size_t i = c.size(); i-- > 0;)
            if (c[i] != 0) return static_cast<long>(i);
        return -1;
    }

    // Coefficient access with implicit zeros beyond the stored range.
    const T& coeff(std::size_t i) const {
        static const T kZero = T(0);
        return i < c.size() ? c[i] : kZero;
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    basic_poly trimmed() const {
        basic_poly p = *this;
        p.trim();
        return p;
    }

    // Zero-pads (or checks) to exactly len coefficients. Refuses to drop a
    // nonzero high coefficient.
    basic_poly padded(std::size_t len) const {
        basic_poly p = trimmed();
        if (p.c.size() > len)
            throw std::invalid_argument("padded: polynomial degree exceeds requested length");
        p.c.resize(len, T(0));
        return p;
    }

    // Canonical equality: coefficient-wise after trimming trailing zeros.
    friend bool operator==(const basic_poly& p, const basic_poly& q) {
        std::size_t n = std::max(p.c.size(), q.c.size());
        for (std::size_t i = 0; i < n; ++i)
            if (p.coeff(i) != q.coeff(i)) return false;
        return true;
    }

    friend basic_poly operator+(const basic_poly& p, const basic_poly& q) {
        basic_poly r;
        r.c.resize(std::max(p.c.size(), q.c.size()), T(0));
        for (std::size_t i = 0; i < p.c.size(); ++i) r.c[i] += p.c[i];
        for (std::size_t i = 0; i < q.c.size(); ++i) r.c[i] += q.c[i];
        return r;
    }

    friend basic_poly operator-(const basic_poly& p, const basic_poly& q) {
        basic_poly r;
        r.c.resize(std::max(p.c.size(), q.c.size()), T(0));
        for (std::size_t i = 0; i < p.c.size(); ++i) r.c[i] += p.c[i];
        for (std::size_t i = 0; i < q.c.size(); ++i) r.c[i] -= q.c[i];
        return r;
    }

    // Schoolbook convolution. Degrees stay in the low thousands here, where
    // this beats fancier schemes once big-integer sizes are accounted for.
    friend basic_poly operator*(const basic_poly& p, const basic_poly& q) {
        basic_poly pt = p.trimmed(), qt = q.trimmed();
        if (pt.c.empty() || qt.c.empty()) return basic_poly{};
        basic_poly r;
        r.c.assign(pt.c.size() + qt.c.size() - 1, T(0));
        for (std::size_t i = 0; i < pt.c.size(); ++i) {
            if (pt.c[i] == 0) continue;
            for (std::size_t j = 0; j < qt.c.size(); ++j)
                r.c[i + j] += pt.c[i] * qt.c[j];  // gmpxx lowers this to addmul
        }
        return r;
    }

    basic_poly& operator+=(const basic_poly& q) { return *this = *this + q; }
    basic_poly& operator*=(const basic_poly& q) { return *this = *this * q; }

    // Multiply by x^k.
    basic_poly shifted_up(std::size_t k) const {
        if (is_zero()) return basic_poly{};
        basic_poly r;
        r.c.assign(c.size() + k, T(0));
        for (std::size_t i = 0; i < c.size(); ++i) r.c[i + k] = c[i];
        return r;
    }

    // Exact division by x: the constant term must vanish.
    basic_poly divided_by_x() const {
        if (!c.empty() && c[0] != 0)
            throw std::logic_error("divided_by_x: nonzero constant term, division is not exact");
        basic_poly r;
        if (c.size() > 1) r.c.assign(c.begin() + 1, c.end());
        return r;
    }
};

template <typename T>
basic_poly<T> pow(const basic_poly<T>& base, unsigned long e) {
    basic_poly<T> result = basic_poly<T>::one();
    basic_poly<T> sq = base;
    while (e > 0) {
        if (e & 1) result = result * sq;
        e >>= 1;
        if (e > 0) sq = sq * sq;
    }
    return result;
}

using BigInt = mpz_class;
using IntPoly = basic_poly<BigInt>;

// Sequences cross module and process boundaries as decimal strings so no
// word-size cap ever applies.
inline std::vector<std::string> to_decimal_strings(const IntPoly& p) {
    std::vector<std::string> out;
    out.reserve(p.c.size());
    for (const BigInt& v : p.c) out.push_back(v.get_str());
    return out;
}

inline IntPoly from_decimal_strings(const std::vector<std::string>& strs) {
    IntPoly p;
    p.c.reserve(strs.size());
    for (const std::string& s : strs) {
        mpz_class v;
        if (s.empty() || v.set_str(s, 10) != 0)
            throw std::invalid_argument("invalid decimal integer: \"" + s + "\"");
        p.c.push_back(std::move(v));
    }
    return p;
}

}  // namespace domlc
