#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "support/oracles.hpp"
#include "tractdist/error.hpp"
#include "tractdist/model.hpp"

using namespace tractdist;

namespace {

Errc error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::IoError;
}

}  // namespace

TEST_CASE("build_streamline keeps distinct points") {
    const Streamline s = Streamline::build({{0, 0, 0}, {1, 0, 0}});
    CHECK(s.size() == 2);
    CHECK(s[1] == Point3{1, 0, 0});
}

TEST_CASE("build_streamline collapses consecutive duplicates") {
    const Streamline s = Streamline::build({{0, 0, 0}, {0, 0, 0}, {1, 0, 0}});
    REQUIRE(s.size() == 2);
    CHECK(s[0] == Point3{0, 0, 0});
    CHECK(s[1] == Point3{1, 0, 0});
}

TEST_CASE("build_streamline rejects degenerate input") {
    CHECK(error_of([] { (void)Streamline::build({{0, 0, 0}}); }) == Errc::FewerThanTwoDistinctPoints);
    CHECK(error_of([] { (void)Streamline::build({{1, 1, 1}, {1, 1, 1}}); }) == Errc::FewerThanTwoDistinctPoints);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(error_of([&] { (void)Streamline::build({{0, 0, 0}, {nan, 0, 0}}); }) == Errc::NonFiniteCoordinate);
    CHECK(error_of([&] { (void)Streamline::build({{0, inf, 0}, {1, 0, 0}}); }) == Errc::NonFiniteCoordinate);
}

TEST_CASE("resample straight segment") {
    const Streamline r = resample(Streamline::build({{0, 0, 0}, {2, 0, 0}}), 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == Point3{0, 0, 0});
    CHECK(r[1] == Point3{1, 0, 0});
    CHECK(r[2] == Point3{2, 0, 0});

    const Streamline two = resample(Streamline::build({{0, 0, 0}, {1, 0, 0}}), 2);
    CHECK(two == Streamline::build({{0, 0, 0}, {1, 0, 0}}));
}

TEST_CASE("resample corner matches the arc-length walker") {
    const Streamline s = Streamline::build({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
    const auto expected = oracle::arc_walk(s, 3);
    const Streamline r = resample(s, 3);
    REQUIRE(r.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r[i].x == doctest::Approx(expected[i].x).epsilon(1e-9));
        CHECK(r[i].y == doctest::Approx(expected[i].y).epsilon(1e-9));
        CHECK(r[i].z == doctest::Approx(expected[i].z).epsilon(1e-9));
    }
    CHECK(expected[1] == Point3{1, 0, 0});
}

TEST_CASE("resample rejects m < 2") {
    const Streamline s = Streamline::build({{0, 0, 0}, {1, 0, 0}});
    CHECK(error_of([&] { (void)resample(s, 1); }) == Errc::InvalidResampleCount);
    CHECK(error_of([&] { (void)resample(s, 0); }) == Errc::InvalidResampleCount);
}

TEST_CASE("there-and-back streamline resampled to two points collapses") {
    const Streamline s = Streamline::build({{0, 0, 0}, {1, 0, 0}, {0, 0, 0}});
    const auto raw = resample_points(s, 2);
    CHECK(raw[0] == raw[1]);
    CHECK(error_of([&] { (void)resample(s, 2); }) == Errc::FewerThanTwoDistinctPoints);
}

TEST_CASE("resample properties on random streamlines") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Streamline s = oracle::random_streamline(rng, 2, 40);
        const auto m = static_cast<std::size_t>(rng.between(2, 50));
        const Streamline r = resample(s, m);
        CHECK(r.size() == m);
        CHECK(r.front() == s.front());
        CHECK(r.back() == s.back());
        CHECK(r.arc_length() <= s.arc_length() * (1 + 1e-9));

        const auto walked = oracle::arc_walk(s, m);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(oracle::euclid(walked[i], r[i]) <= 1e-9 * (1 + s.arc_length()));
        }
    }
}

TEST_CASE("resample is idempotent on collinear streamlines") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Point3> pts;
        double x = 0;
        const auto n = rng.between(2, 30);
        for (std::uint64_t i = 0; i < n; ++i) {
            pts.push_back({x, 2 * x, -x});
            x += rng.uniform(0.1, 3.0);
        }
        const Streamline s = Streamline::build(pts);
        const auto m = static_cast<std::size_t>(rng.between(2, 40));
        const Streamline once = resample(s, m);
        const Streamline twice = resample(once, m);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::abs(once[i].x - twice[i].x) <= 1e-9);
            CHECK(std::abs(once[i].y - twice[i].y) <= 1e-9);
            CHECK(std::abs(once[i].z - twice[i].z) <= 1e-9);
        }
    }
}

TEST_CASE("resample is not idempotent across corners") {
    // Chords of the first pass cut the corner, so the second pass re-spaces them.
    const Streamline s = Streamline::build({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
    const Streamline once = resample(s, 4);
    const Streamline twice = resample(once, 4);
    CHECK(once[1].x == doctest::Approx(2.0 / 3.0));
    CHECK(std::abs(twice[1].x - once[1].x) > 1e-3);
}

TEST_CASE("flip reverses and is an involution") {
    CHECK(flip(Streamline::build({{0, 0, 0}, {1, 0, 0}})) == Streamline::build({{1, 0, 0}, {0, 0, 0}}));

    const Streamline palindrome = Streamline::build({{0, 0, 0}, {1, 0, 0}, {0, 0, 0}});
    CHECK(flip(palindrome) == palindrome);

    const Streamline s = Streamline::build({{0, 0, 0}, {1, 0, 0}, {2, 1, 0}});
    CHECK(flip(flip(s)) == s);
    CHECK(!(flip(s) == s));
}

TEST_CASE("BundleRef sorts, deduplicates and range-checks") {
    const BundleRef b("t", {5, 1, 3, 1}, 6);
    REQUIRE(b.size() == 3);
    CHECK(b.indices()[0] == 1);
    CHECK(b.indices()[2] == 5);
    CHECK(b.contains(3));
    CHECK(!b.contains(4));
    CHECK(error_of([] { (void)BundleRef("t", {0, 6}, 6); }) == Errc::IndexOutOfRange);
}
