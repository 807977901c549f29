#include <doctest.h>

#include <random>

#include "mrc/answer.hpp"
#include "mrc/serde.hpp"

using namespace mrc;

TEST_CASE("normalize_answer handles plain integers") {
    auto a = normalize_answer("42");
    REQUIRE(a.has_value());
    CHECK(a->num == 42);
    CHECK(a->den == 1);
    CHECK(a->raw == "42");
}

TEST_CASE("normalize_answer strips separators and keeps exact decimals") {
    // 1000.50 = 100050/100 = 2001/2 by hand.
    auto a = normalize_answer("1,000.50");
    REQUIRE(a.has_value());
    CHECK(a->num == 2001);
    CHECK(a->den == 2);
}

TEST_CASE("normalize_answer maps Unicode decimal digits") {
    // Bengali FOUR U+09EA and TWO U+09E8 have decimal-digit values 4 and 2.
    auto a = normalize_answer("৪২");
    REQUIRE(a.has_value());
    CHECK(*a == make_answer(42));

    CHECK(*normalize_answer("๔๒") == make_answer(42));    // Thai
    CHECK(*normalize_answer("౪౨") == make_answer(42));    // Telugu
    CHECK(*normalize_answer("४२") == make_answer(42));    // Devanagari
    CHECK(*normalize_answer("４２") == make_answer(42));  // Fullwidth
}

TEST_CASE("normalize_answer strips currency and space grouping") {
    CHECK(*normalize_answer("$1,250") == make_answer(1250));
    CHECK(*normalize_answer("€3.50") == make_answer(7, 2));
    CHECK(*normalize_answer("1 000") == make_answer(1000));  // narrow no-break space
    CHECK(*normalize_answer("1 000") == make_answer(1000));  // thin space
    CHECK(*normalize_answer("₹25") == make_answer(25));
}

TEST_CASE("normalize_answer treats repeated periods as grouping") {
    CHECK(*normalize_answer("1.000.000") == make_answer(1000000));
    CHECK(*normalize_answer("1.000") == make_answer(1));  // single period stays decimal
}

TEST_CASE("normalize_answer trailing forms") {
    CHECK(*normalize_answer("42.") == make_answer(42));  // sentence period
    CHECK(*normalize_answer("42.0") == make_answer(42));
    CHECK(*normalize_answer("42.00") == make_answer(42));
    // Decimal point plus sentence period: 2001.50 = 4003/2 by hand.
    CHECK(*normalize_answer("$2,001.50.") == make_answer(4003, 2));
    CHECK(*normalize_answer("1.000.000.") == make_answer(1000000));
    CHECK(*normalize_answer(".5") == make_answer(1, 2));
    CHECK(*normalize_answer("-3") == make_answer(-3));
    CHECK(*normalize_answer("−3") == make_answer(-3));  // unicode minus
    CHECK(*normalize_answer("+7") == make_answer(7));
}

TEST_CASE("normalize_answer rejects junk and overflow") {
    CHECK_FALSE(normalize_answer("").has_value());
    CHECK_FALSE(normalize_answer("   ").has_value());
    CHECK_FALSE(normalize_answer("abc").has_value());
    CHECK_FALSE(normalize_answer("12a").has_value());
    CHECK_FALSE(normalize_answer("..").has_value());
    CHECK_FALSE(normalize_answer("-").has_value());
    CHECK_FALSE(normalize_answer("99999999999999999999999").has_value());   // > int64
    CHECK_FALSE(normalize_answer("0.0000000000000000000001").has_value());  // denominator overflow
    CHECK_FALSE(normalize_answer("1 2").has_value());  // interior plain space
}

TEST_CASE("answer equality is an equivalence relation over reduced forms") {
    auto a = normalize_answer("42");
    auto b = normalize_answer("42.0");
    auto c = normalize_answer("42.00");
    REQUIRE(a);
    REQUIRE(b);
    REQUIRE(c);
    CHECK(*a == *a);
    CHECK(*a == *b);
    CHECK(*b == *a);
    CHECK(*b == *c);
    CHECK(*a == *c);  // transitivity across the chain
    CHECK(*normalize_answer("0.5") == make_answer(1, 2));
    CHECK_FALSE(*normalize_answer("0.5") == make_answer(1, 3));
}

TEST_CASE("make_answer reduces to canonical form") {
    auto a = make_answer(6, 4);
    CHECK(a.num == 3);
    CHECK(a.den == 2);
    auto b = make_answer(3, -6);
    CHECK(b.num == -1);
    CHECK(b.den == 2);
    CHECK_THROWS_AS(make_answer(1, 0), std::invalid_argument);
    CHECK(make_answer(-7).to_string() == "-7");
    CHECK(make_answer(-7, 2).to_string() == "-7/2");
}

TEST_CASE("answers_equal tolerance") {
    CHECK(answers_equal(make_answer(1, 3), make_answer(1, 3)));
    CHECK_FALSE(answers_equal(make_answer(1, 3), make_answer(3339, 10000)));
    CHECK(answers_equal(make_answer(1, 3), make_answer(3334, 10000), 1e-3));
}

TEST_CASE("core serde round-trips random rationals") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::int64_t num = static_cast<std::int64_t>(rng() % 2000000) - 1000000;
        std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 1000);
        NumericAnswer a = make_answer(num, den, "raw" + std::to_string(i));
        NumericAnswer back = answer_from_json(to_json(a));
        CHECK(back == a);
        CHECK(back.raw == a.raw);
    }
}
