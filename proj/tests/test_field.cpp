#include <catch2/catch_amalgamated.hpp>

#include "charp/field.hpp"
#include "test_util.hpp"

using namespace charp;

TEST_CASE("prime field construction validates the modulus") {
    CHECK_NOTHROW(PrimeField(2));
    CHECK_NOTHROW(PrimeField(7));
    CHECK_NOTHROW(PrimeField(2147483647u));  // 2^31 - 1
    CHECK_THROWS_AS(PrimeField(1), field_error);
    CHECK_THROWS_AS(PrimeField(4), field_error);
    CHECK_THROWS_AS(PrimeField(91), field_error);  // 7 * 13
}

TEST_CASE("field arithmetic in F_5") {
    PrimeField F(5);
    CHECK(F.add(Fp{3}, Fp{4}) == Fp{2});
    CHECK(F.sub(Fp{1}, Fp{3}) == Fp{3});
    CHECK(F.mul(Fp{3}, Fp{4}) == Fp{2});
    CHECK(F.neg(Fp{2}) == Fp{3});
    CHECK(F.inv(Fp{2}) == Fp{3});
    CHECK(F.pow(Fp{2}, 4) == Fp{1});
    CHECK(F.from_int(-7) == Fp{3});
    CHECK_THROWS_AS(F.inv(Fp{0}), field_error);
}

TEST_CASE("field axioms on random samples") {
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 101u}) {
        PrimeField F(p);
        test::Rng rng(p * 977);
        for (int t = 0; t < 200; ++t) {
            Fp a = F.from_int(static_cast<std::int64_t>(rng.below(p)));
            Fp b = F.from_int(static_cast<std::int64_t>(rng.below(p)));
            Fp c = F.from_int(static_cast<std::int64_t>(rng.below(p)));
            CHECK(F.add(a, b) == F.add(b, a));
            CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
            CHECK(F.add(a, F.neg(a)) == Fp{0});
            if (a.v != 0) CHECK(F.mul(a, F.inv(a)) == Fp{1});
        }
    }
}

TEST_CASE("binomial coefficients: known values") {
    PrimeField F5(5);
    CHECK(F5.binomial(7, 2) == Fp{1});  // 21 mod 5
    CHECK(F5.binomial(5, 1) == Fp{0});
    CHECK(F5.binomial(123456, 0) == Fp{1});
    CHECK(F5.binomial(3, 7) == Fp{0});  // k > l
}

TEST_CASE("Lucas binomials agree with the Pascal-triangle oracle") {
    // Oracle: Pascal's recurrence mod p is exact integer arithmetic reduced
    // mod p, an independent route from the Lucas decomposition.
    constexpr std::size_t L = 201;
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
        PrimeField F(p);
        std::vector<std::vector<std::uint32_t>> pascal(L);
        for (std::size_t l = 0; l < L; ++l) {
            pascal[l].assign(l + 1, 1);
            for (std::size_t k = 1; k < l; ++k)
                pascal[l][k] = (pascal[l - 1][k - 1] + pascal[l - 1][k]) % p;
        }
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t k = 0; k <= l; ++k)
                REQUIRE(F.binomial(l, k).v == pascal[l][k]);
    }
}

TEST_CASE("Vandermonde convolution mod p") {
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
        PrimeField F(p);
        test::Rng rng(31 * p);
        for (int t = 0; t < 50; ++t) {
            std::uint64_t a = rng.below(300), b = rng.below(300), k = rng.below(80);
            Fp lhs{0};
            for (std::uint64_t j = 0; j <= k; ++j)
                lhs = F.add(lhs, F.mul(F.binomial(a, j), F.binomial(b, k - j)));
            CHECK(lhs == F.binomial(a + b, k));
        }
    }
}
