#include <catch2/catch_amalgamated.hpp>

#include "charp/poly.hpp"
#include "test_util.hpp"

using namespace charp;

namespace {
AmbientPtr amb5() { return make_ambient(5, {"x1", "x2"}); }
}  // namespace

TEST_CASE("parse: worked examples") {
    auto amb = amb5();
    CHECK(parse_poly("x1^2+x2^2-1", amb).nterms() == 3);
    CHECK(parse_poly("x1^2 + 4*x1^2", amb).is_zero());
    CHECK_THROWS_AS(parse_poly("x3", amb), parse_error);
    CHECK_THROWS_AS(parse_poly("x1 +", amb), parse_error);
    CHECK_THROWS_AS(parse_poly("(x1", amb), parse_error);
}

TEST_CASE("parse handles precedence, parentheses and unary minus") {
    auto amb = amb5();
    CHECK(parse_poly("2*x1^2", amb) == parse_poly("2*(x1^2)", amb));
    CHECK(parse_poly("-x1+1", amb) == parse_poly("1-x1", amb));
    CHECK(parse_poly("(x1+x2)^2", amb) ==
          parse_poly("x1^2+2*x1*x2+x2^2", amb));
    CHECK(parse_poly("  x1 * x2 ^ 3 ", amb) == parse_poly("x1*x2^3", amb));
}

TEST_CASE("print/parse round trip on random polynomials") {
    auto amb = make_ambient(7, {"x1", "x2", "x3"});
    test::Rng rng(42);
    for (int t = 0; t < 100; ++t) {
        Polynomial f = test::random_poly(rng, amb, 6, 8);
        CHECK(parse_poly(to_string(f), amb) == f);
    }
    CHECK(to_string(Polynomial::zero(amb)) == "0");
}

TEST_CASE("arithmetic: worked examples") {
    auto amb = amb5();
    Polynomial x1 = Polynomial::variable(amb, 0), x2 = Polynomial::variable(amb, 1);
    CHECK((x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2);
    CHECK((x1 * Polynomial::zero(amb)).is_zero());

    // substitute x1 -> x1 + t into x1^2, with t adjoined
    auto ambt = make_ambient(5, {"x1", "x2", "t"});
    std::vector<Polynomial> images = {
        parse_poly("x1+t", ambt), parse_poly("x2", ambt)};
    CHECK((x1 * x1).substitute(ambt, images) == parse_poly("x1^2+2*x1*t+t^2", ambt));
}

TEST_CASE("evaluation at field points") {
    auto amb = amb5();
    Polynomial f = parse_poly("x1^2+x2^2-1", amb);
    CHECK(f.evaluate({Fp{0}, Fp{1}}) == Fp{0});
    CHECK(f.evaluate({Fp{2}, Fp{2}}) == Fp{2});  // 4 + 4 - 1 = 7 = 2 mod 5
    CHECK_THROWS_AS(f.evaluate({Fp{1}}), poly_error);
}

TEST_CASE("ring axioms on random polynomials") {
    auto amb = make_ambient(7, {"x1", "x2"});
    test::Rng rng(7);
    for (int t = 0; t < 40; ++t) {
        Polynomial f = test::random_poly(rng, amb, 4, 5);
        Polynomial g = test::random_poly(rng, amb, 4, 5);
        Polynomial h = test::random_poly(rng, amb, 4, 5);
        CHECK(f * g == g * f);
        CHECK((f + g) * h == f * h + g * h);
        CHECK(f * (g * h) == (f * g) * h);
    }
}

TEST_CASE("divided partials: worked examples") {
    auto amb = amb5();
    Polynomial x1_7 = Polynomial::variable(amb, 0, 7);
    CHECK(divided_partial(0, 2, x1_7) == Polynomial::variable(amb, 0, 5));  // C(7,2)=21=1 mod 5
    CHECK(divided_partial(0, 1, Polynomial::variable(amb, 1)).is_zero());
    CHECK(divided_partial(0, 1, parse_poly("x1^2", amb)) == parse_poly("2*x1", amb));
    CHECK(divided_partial(0, 0, x1_7) == x1_7);
}

TEST_CASE("Leibniz and higher product rule") {
    auto amb = make_ambient(5, {"x1", "x2"});
    test::Rng rng(99);
    for (int t = 0; t < 25; ++t) {
        Polynomial f = test::random_poly(rng, amb, 5, 6);
        Polynomial g = test::random_poly(rng, amb, 5, 6);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(divided_partial(i, 1, f * g) ==
                  divided_partial(i, 1, f) * g + f * divided_partial(i, 1, g));
            for (std::uint64_t k = 2; k <= 6; ++k) {
                Polynomial rhs(amb);
                for (std::uint64_t a = 0; a <= k; ++a)
                    rhs = rhs + divided_partial(i, a, f) * divided_partial(i, k - a, g);
                CHECK(divided_partial(i, k, f * g) == rhs);
            }
        }
    }
}

TEST_CASE("iterativity of divided partials on monomials") {
    auto amb = make_ambient(5, {"x1", "x2"});
    for (std::uint32_t d = 0; d <= 20; ++d) {
        Polynomial m = Polynomial::variable(amb, 0, d);
        for (std::uint64_t k = 0; k <= 5; ++k)
            for (std::uint64_t l = 0; l <= 5; ++l) {
                Polynomial lhs = divided_partial(0, k, divided_partial(0, l, m));
                Polynomial rhs =
                    divided_partial(0, k + l, m).scaled(amb->field.binomial(k + l, k));
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("characteristic-p kernel of divided partials") {
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
        auto amb = make_ambient(p, {"x"});
        Polynomial xp = Polynomial::variable(amb, 0, p);
        CHECK(divided_partial(0, 1, xp).is_zero());
        CHECK(divided_partial(0, p, xp) == Polynomial::constant(amb, 1));
    }
}

TEST_CASE("jacobian matrices") {
    auto amb = amb5();
    auto J = jacobian({parse_poly("x1^2+x2^2-1", amb)}, amb);
    REQUIRE(J.rows() == 1);
    REQUIRE(J.cols() == 2);
    CHECK(J.at(0, 0) == parse_poly("2*x1", amb));
    CHECK(J.at(0, 1) == parse_poly("2*x2", amb));

    auto amb7 = make_ambient(7, {"x1", "x2"});
    auto Jc = jacobian({parse_poly("x2^2-x1^3", amb7)}, amb7);
    CHECK(Jc.at(0, 0) == parse_poly("-3*x1^2", amb7));
    CHECK(Jc.at(0, 1) == parse_poly("2*x2", amb7));

    auto J0 = jacobian({}, amb);
    CHECK(J0.rows() == 0);
    CHECK(J0.cols() == 2);
}

TEST_CASE("minor determinants with column order and the empty convention") {
    auto amb = make_ambient(5, {"x1", "x2", "x3"});
    auto J = jacobian({parse_poly("x2-x1^2", amb), parse_poly("x3-x1^3", amb)}, amb);
    CHECK(minor_det(J, {}, {}) == Polynomial::constant(amb, 1));
    CHECK(minor_det(J, {0, 1}, {1, 2}) == Polynomial::constant(amb, 1));
    CHECK(minor_det(J, {0, 1}, {0, 1}) == parse_poly("3*x1^2", amb));
    CHECK(minor_det(J, {0, 1}, {0, 2}) == parse_poly("-2*x1", amb));
    // swapping columns flips the sign
    CHECK(minor_det(J, {0, 1}, {2, 1}) == parse_poly("-1", amb));
}

TEST_CASE("term orders: grevlex vs lex") {
    Monomial a{2, 0}, b{0, 2}, c{1, 0}, d{0, 3};
    CHECK(mono_cmp(a, b, TermOrder::grevlex) > 0);
    CHECK(mono_cmp(c, d, TermOrder::grevlex) < 0);  // degree decides first
    CHECK(mono_cmp(c, d, TermOrder::lex) > 0);      // x1 beats any power of x2
}
