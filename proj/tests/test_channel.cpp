#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "scf/channel.hpp"
#include "scf/infoq.hpp"

using namespace scf;
using namespace scf::channel;

TEST_CASE("gaussian density") {
    CHECK(gaussian_density(0.0, 0.0, 1.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
    CHECK(gaussian_density(1.0, 0.0, 1.0) == doctest::Approx(0.2419707245).epsilon(1e-9));
    // the mode sits at the mean
    for (double y : {-1.0, -0.3, 0.4, 2.0})
        CHECK(gaussian_density(y, 0.5, 0.7) <= gaussian_density(0.5, 0.5, 0.7));
    CHECK_THROWS_AS(gaussian_density(0.0, 0.0, 0.0), Error);
    CHECK_THROWS_AS(gaussian_density(0.0, 0.0, -1.0), Error);
}

TEST_CASE("transmission") {
    MacChannelParams p{1.0, 1.0, 1e-12, Constellation::bpsk()};
    galois::FieldVector x0(2, {0, 0, 0, 0});
    galois::FieldVector x1(2, {1, 0, 1, 0});
    auto y = transmit(x0, x1, p, 42);
    REQUIRE(y.size() == 4);
    CHECK(std::abs(y[0] - 0.0) < 1e-4);  // sigma(1) + sigma(0) = 0
    CHECK(std::abs(y[1] - 2.0) < 1e-4);

    CHECK(transmit(x0, x1, p, 42) == y);  // same seed, same block

    MacChannelParams unit{1.0, 1.0, 1.0, Constellation::bpsk()};
    galois::FieldVector big(2, 100000);
    auto yy = transmit(big, big, unit, 7);
    double mean = 0.0;
    for (double v : yy) mean += v;
    mean /= static_cast<double>(yy.size());
    CHECK(std::abs(mean - 2.0) < 0.02);

    CHECK_THROWS_AS(transmit(x0, galois::FieldVector(2, 3), p, 1), Error);
}

TEST_CASE("pair likelihood") {
    MacChannelParams flat{0.0, 0.0, 1.0, Constellation::bpsk()};
    double base = pair_likelihood(0.3, 0, 0, flat);
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b)
            CHECK(pair_likelihood(0.3, a, b, flat) == base);

    MacChannelParams p{1.0, 1.0, 1.0, Constellation::bpsk()};
    CHECK(pair_likelihood(2.0, 0, 0, p) == doctest::Approx(0.3989422804).epsilon(1e-9));
    // swapping users is invisible when the gains agree
    for (double y : {-1.5, 0.0, 0.8})
        CHECK(pair_likelihood(y, 0, 1, p) == pair_likelihood(y, 1, 0, p));
}

TEST_CASE("degraded channel density") {
    MacChannelParams p{1.0, 1.0, 1.0, Constellation::bpsk()};
    // misaligned symbols cancel: a single standard normal at 0
    CHECK(degraded_density(0.0, 1, p) == doctest::Approx(0.3989422804).epsilon(1e-9));
    // aligned symbols sit at +-2
    CHECK(degraded_density(0.0, 0, p) == doctest::Approx(0.0539909665).epsilon(1e-8));

    CHECK(std::exp(log_degraded_density(0.7, 1, p, 1, 0)) ==
          doctest::Approx(degraded_density(0.7, 1, p, 1, 0)).epsilon(1e-12));

    // each conditional integrates to one
    infoq::QuadratureSpec spec;
    for (std::uint32_t c = 0; c < 2; ++c) {
        double mass = infoq::integrate([&](double y) { return degraded_density(y, c, p); },
                                       -14.0, 14.0, spec, std::vector<double>{-2.0, 0.0, 2.0});
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("shifts fold into the sum symbol") {
    MacChannelParams p{1.3, 0.6, 0.8, Constellation::bpsk()};
    for (std::uint32_t c = 0; c < 2; ++c)
        for (std::uint32_t s1 = 0; s1 < 2; ++s1)
            for (std::uint32_t s2 = 0; s2 < 2; ++s2)
                for (double y : {-2.0, -0.4, 0.0, 1.1, 3.0})
                    CHECK(degraded_density(y, c, p, s1, s2) ==
                          doctest::Approx(degraded_density(y, (c + s1 + s2) % 2, p))
                              .epsilon(1e-14));
}

TEST_CASE("transmitted samples follow the pair likelihood") {
    // Kolmogorov-Smirnov distance between 1e5 samples of Y | (0,0) and the
    // closed-form conditional law.
    MacChannelParams p{1.0, 1.0, 1.0, Constellation::bpsk()};
    const std::size_t n = 100000;
    galois::FieldVector zeros(2, n);
    auto y = transmit(zeros, zeros, p, 2024);
    std::sort(y.begin(), y.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double cdf = 0.5 * std::erfc(-(y[i] - 2.0) / std::sqrt(2.0));
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    CHECK(ks < 0.01);
}
