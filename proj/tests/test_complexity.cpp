#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ccid/complexity.hpp"
#include "ccid/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccid;

TEST_SUITE("complexity") {

TEST_CASE("least-squares line") {
    const auto fit = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_line({1, 2}, {1, 2}), DegenerateError);
    CHECK_THROWS_AS(fit_line({1, 1, 1}, {1, 2, 3}), DegenerateError);
}

TEST_CASE("box counting: line, constant, noise") {
    const auto line = box_counting_dimension(fixture::ramp(3000));
    CHECK(line.value == doctest::Approx(1.0).epsilon(0.05));
    CHECK(line.fit.xs.size() == 9);  // floor(log2 3000) - 2

    const auto flat = box_counting_dimension(std::vector<double>(3000, 2.0));
    CHECK(flat.value == 1.0);
    CHECK(flat.fit.xs.empty());

    double sum = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto fd = box_counting_dimension(fixture::white_noise(3000, 200 + seed));
        CHECK(fd.value >= 1.4);
        CHECK(fd.value <= 2.0);
        CHECK(fd.fit.r_squared > 0.95);
        sum += fd.value;
    }
    MESSAGE("mean white-noise FD over 100 seeds: " << sum / 100.0);
    CHECK_THROWS_AS(box_counting_dimension(std::vector<double>(63, 0.0)), DataError);
}

TEST_CASE("box counts match the brute-force reference") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> x;
        switch (trial % 3) {
        case 0: x = fixture::white_noise(150, rng()); break;
        case 1: x = fixture::random_walk(150, rng()); break;
        default: x = fixture::sine(150, 700.0, 20000.0); break;
        }
        for (std::size_t m : {2u, 4u, 8u, 16u, 32u}) {
            CHECK(count_boxes(x, m) == count_boxes_reference(x, m));
        }
    }
}

TEST_CASE("box counts are monotone in resolution") {
    const auto x = fixture::white_noise(3000, 1);
    std::size_t previous = 0;
    for (std::size_t m = 2; m <= 512; m *= 2) {
        const std::size_t c = count_boxes(x, m);
        CHECK(c >= previous);
        CHECK(c >= m);  // the graph crosses every column
        CHECK(c <= m * m);
        previous = c;
    }
}

TEST_CASE("Hurst segment lengths") {
    const auto lens = hurst_segment_lengths(3000);
    CHECK(lens.front() == kHurstMinSegment);
    CHECK(lens.back() == 1500);
    CHECK(lens.size() == kHurstScales);
    CHECK(std::is_sorted(lens.begin(), lens.end()));
}

TEST_CASE("Hurst of white noise and of a random walk") {
    double noise = 0, walk = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        noise += hurst_exponent(fixture::white_noise(3000, 900 + seed)).value;
        walk += hurst_exponent(fixture::random_walk(3000, 900 + seed)).value;
    }
    CHECK(std::abs(noise / 100.0 - 0.5) <= 0.1);
    CHECK(std::abs(walk / 100.0 - 1.0) <= 0.1);
}

TEST_CASE("Hurst errors") {
    CHECK_THROWS_AS(hurst_exponent(std::vector<double>(3000, 1.0)), DegenerateError);
    CHECK_THROWS_AS(hurst_exponent(std::vector<double>(99, 1.0)), DataError);
}

TEST_CASE("mirrored partition of a reversed window equals the forward estimate") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto x = fixture::random_walk(2999, seed);
        const double forward = hurst_exponent(x).value;
        std::reverse(x.begin(), x.end());
        CHECK(hurst_exponent(x, PartitionMode::mirrored).value == doctest::Approx(forward).epsilon(1e-9));
    }
}

TEST_CASE("FD and H are affine invariant") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = seed % 2 ? fixture::white_noise(3000, seed) : fixture::random_walk(3000, seed);
        for (const auto& [a, b] : {std::pair{3.0, -1.0}, std::pair{-0.25, 40.0}, std::pair{1e3, 1e3}}) {
            std::vector<double> y(x);
            for (double& v : y) {
                v = a * v + b;
            }
            CHECK(box_counting_dimension(y).value == doctest::Approx(box_counting_dimension(x).value).epsilon(1e-9));
            CHECK(hurst_exponent(y).value == doctest::Approx(hurst_exponent(x).value).epsilon(1e-9));
        }
    }
}

} // TEST_SUITE
