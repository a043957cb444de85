#include <catch2/catch_amalgamated.hpp>

#include "domlc/poly.hpp"
#include "domlc/rng.hpp"

using namespace domlc;

namespace {

IntPoly random_poly(Rng& rng, int max_deg) {
    IntPoly p;
    int deg = rng.next_index(max_deg + 1);
    for (int i = 0; i <= deg; ++i) {
        // two 64-bit words so products exercise multi-limb arithmetic
        BigInt v(static_cast<unsigned long>(rng.next_u64() >> 32));
        v <<= 64;
        v += static_cast<unsigned long>(rng.next_u64() >> 16);
        p.c.push_back(v);
    }
    return p;
}

}  // namespace

TEST_CASE("addition") {
    IntPoly one_plus_x{BigInt(1), BigInt(1)};
    IntPoly x = IntPoly::monomial(1);
    CHECK(one_plus_x + x == IntPoly{BigInt(1), BigInt(2)});
    CHECK(one_plus_x + IntPoly::zero() == one_plus_x);

    // A_L + B_L + C_L = x(2 + 3x + x^2)
    IntPoly a{BigInt(0), BigInt(0), BigInt(2), BigInt(1)};  // x^2(2+x)
    IntPoly b{BigInt(0), BigInt(1), BigInt(1)};             // x(1+x)
    IntPoly expected{BigInt(0), BigInt(2), BigInt(3), BigInt(1)};
    CHECK(a + b + x == expected);
}

TEST_CASE("multiplication") {
    IntPoly one_plus_x{BigInt(1), BigInt(1)};
    CHECK(one_plus_x * one_plus_x == IntPoly{BigInt(1), BigInt(2), BigInt(1)});

    // (2x+x^2)^2; value frozen from the 4-path brute-force oracle (see the
    // dompoly suite, which recomputes it from subsets).
    IntPoly q{BigInt(0), BigInt(2), BigInt(1)};
    CHECK(q * q == IntPoly{BigInt(0), BigInt(0), BigInt(4), BigInt(4), BigInt(1)});

    IntPoly p{BigInt(7), BigInt(0), BigInt(3)};
    CHECK(p * IntPoly::one() == p);
    CHECK(p * IntPoly::zero() == IntPoly::zero());
}

TEST_CASE("power") {
    IntPoly one_plus_x{BigInt(1), BigInt(1)};
    CHECK(pow(one_plus_x, 2) == IntPoly{BigInt(1), BigInt(2), BigInt(1)});
    CHECK(pow(IntPoly{BigInt(1), BigInt(3), BigInt(1)}, 1) ==
          IntPoly{BigInt(1), BigInt(3), BigInt(1)});
    IntPoly p{BigInt(5), BigInt(9)};
    CHECK(pow(p, 0) == IntPoly::one());

    // repeated squaring agrees with naive products
    IntPoly naive = IntPoly::one();
    for (int i = 0; i < 7; ++i) naive *= one_plus_x;
    CHECK(pow(one_plus_x, 7) == naive);
}

TEST_CASE("mul is commutative and associative") {
    Rng rng(20240811);
    for (int iter = 0; iter < 50; ++iter) {
        IntPoly a = random_poly(rng, 12), b = random_poly(rng, 12), c = random_poly(rng, 12);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("trim, pad, shift, exact division") {
    IntPoly p{BigInt(0), BigInt(1), BigInt(0), BigInt(0)};
    CHECK(p.trimmed().c.size() == 2);
    CHECK(p.padded(5).c.size() == 5);
    CHECK_THROWS_AS(p.padded(1), std::invalid_argument);

    CHECK(IntPoly::monomial(1).shifted_up(2) == IntPoly::monomial(3));
    CHECK(IntPoly{BigInt(0), BigInt(2), BigInt(1)}.divided_by_x() ==
          IntPoly{BigInt(2), BigInt(1)});
    CHECK_THROWS_AS(IntPoly::one().divided_by_x(), std::logic_error);
    CHECK(IntPoly::zero().divided_by_x() == IntPoly::zero());
}

TEST_CASE("degree and coefficient access") {
    IntPoly p{BigInt(0), BigInt(5)};
    CHECK(p.degree() == 1);
    CHECK(p.coeff(7) == 0);
    CHECK(IntPoly::zero().degree() == -1);
    CHECK(IntPoly{BigInt(0), BigInt(0)}.degree() == -1);
}

TEST_CASE("decimal string round trip") {
    Rng rng(7);
    for (int iter = 0; iter < 20; ++iter) {
        IntPoly p = random_poly(rng, 8);
        CHECK(from_decimal_strings(to_decimal_strings(p)) == p);
    }
    CHECK_THROWS_AS(from_decimal_strings({"12x"}), std::invalid_argument);
    CHECK_THROWS_AS(from_decimal_strings({""}), std::invalid_argument);
    // decimal strings must never clip at word size
    IntPoly big = from_decimal_strings({"340282366920938463463374607431768211456"});
    CHECK(big.c[0] == BigInt(1) << 128);
}
