#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scf/infoq.hpp"

using namespace scf;
using namespace scf::infoq;

namespace {

constexpr double kHalfLn2PiE = 1.4189385332046727;  // entropy of a unit Gaussian

channel::MacChannelParams bpsk(double h, double n0 = 1.0) {
    return {h, h, n0, channel::Constellation::bpsk()};
}

}  // namespace

TEST_CASE("mixture validation") {
    CHECK_THROWS_AS((GaussianMixture{{0.5, 0.6}, {0.0, 1.0}, 1.0}).validate(), Error);
    CHECK_THROWS_AS((GaussianMixture{{1.0}, {0.0}, 0.0}).validate(), Error);
    CHECK_THROWS_AS((GaussianMixture{{-0.2, 1.2}, {0.0, 1.0}, 1.0}).validate(), Error);
    CHECK_NOTHROW((GaussianMixture{{0.25, 0.75}, {0.0, 1.0}, 2.0}).validate());
}

TEST_CASE("mixture entropy closed forms") {
    QuadratureSpec spec;
    GaussianMixture g{{1.0}, {0.0}, 1.0};
    CHECK(mixture_entropy(g, spec) == doctest::Approx(kHalfLn2PiE).epsilon(1e-10));

    // duplicate-mean components collapse to a single Gaussian
    GaussianMixture dup = merge_components({0.5, 0.5}, {3.0, 3.0}, 1.0);
    CHECK(mixture_entropy(dup, spec) == doctest::Approx(kHalfLn2PiE).epsilon(1e-10));

    // far-separated equal halves pick up exactly one bit
    GaussianMixture sep{{0.5, 0.5}, {-12.0, 12.0}, 1.0};
    CHECK(mixture_entropy(sep, spec) ==
          doctest::Approx(std::numbers::ln2 + kHalfLn2PiE).epsilon(1e-6));
}

TEST_CASE("entropy is translation invariant and truncation stable") {
    QuadratureSpec spec;
    GaussianMixture a{{0.3, 0.7}, {-1.0, 2.5}, 0.6};
    GaussianMixture b{{0.3, 0.7}, {-1.0 + 17.25, 2.5 + 17.25}, 0.6};
    double ha = mixture_entropy(a, spec);
    CHECK(std::abs(ha - mixture_entropy(b, spec)) < 1e-10);

    QuadratureSpec wide = spec;
    wide.truncation_sigmas = 24.0;
    CHECK(std::abs(ha - mixture_entropy(a, wide)) < 1e-6);

    channel::MacChannelParams ch{1.0, 1.0, 1.0, channel::Constellation::bpsk()};
    CHECK(std::abs(renyi_down(ch, 0.3, Marginal::X1, spec) -
                   renyi_down(ch, 0.3, Marginal::X1, wide)) < 1e-6);
    CHECK(std::abs(mutual_infos(ch, spec).i_y_sum - mutual_infos(ch, wide).i_y_sum) < 1e-6);
}

TEST_CASE("mutual informations of the two-user channel") {
    QuadratureSpec spec;

    InfoReport silent = mutual_infos(bpsk(0.0), spec);
    CHECK(std::abs(silent.i_y_x1) < 1e-9);
    CHECK(std::abs(silent.i_y_x1x2) < 1e-9);
    CHECK(std::abs(silent.i_y_sum) < 1e-9);

    // far-separated constellation: the sum carries one bit, a single input
    // half a bit, the pair one and a half
    InfoReport strong = mutual_infos(bpsk(12.0), spec);
    CHECK(std::abs(strong.i_y_sum - std::numbers::ln2) < 1e-3);
    CHECK(std::abs(strong.i_y_x1 - 0.5 * std::numbers::ln2) < 1e-3);
    CHECK(std::abs(strong.i_y_x1x2 - 1.5 * std::numbers::ln2) < 1e-3);

    for (double h : {0.5, 1.0, 2.0}) {
        InfoReport r = mutual_infos(bpsk(h), spec);
        CHECK(r.i_y_x1 >= 0.0);
        CHECK(r.i_y_x1 <= r.i_y_x1x2 + 1e-12);
        CHECK(r.i_y_x1x2 >= r.i_y_sum - 1e-12);  // the pair resolves the sum
    }
}


TEST_CASE("renyi information, limits and ordering") {
    QuadratureSpec spec;

    CHECK(std::abs(renyi_down(bpsk(0.0), 0.3, Marginal::X1X2, spec)) < 1e-9);

    // s -> 0 recovers the mutual information
    for (double h : {1.0, 3.0}) {
        InfoReport r = mutual_infos(bpsk(h), spec);
        CHECK(std::abs(renyi_down(bpsk(h), 1e-3, Marginal::X1, spec) - r.i_y_x1) <= 1e-3);
        CHECK(std::abs(renyi_down(bpsk(h), 1e-3, Marginal::X1X2, spec) - r.i_y_x1x2) <= 1e-3);
        CHECK(renyi_down(bpsk(h), 0.0, Marginal::X1, spec) == r.i_y_x1);
    }

    // nondecreasing in s
    for (double h : {0.5, 1.0, 2.0})
        for (Marginal which : {Marginal::X1, Marginal::X1X2}) {
            double prev = renyi_down(bpsk(h), 0.0, which, spec);
            for (double s : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
                double cur = renyi_down(bpsk(h), s, which, spec);
                CHECK(cur >= prev - 1e-9);
                prev = cur;
            }
        }

    // pair information exceeds the single marginal by at most log q
    for (double h : {0.5, 1.0, 2.0, 4.0})
        for (double s : {0.1, 0.25, 0.5}) {
            double i1 = renyi_down(bpsk(h), s, Marginal::X1, spec);
            double i12 = renyi_down(bpsk(h), s, Marginal::X1X2, spec);
            CHECK(std::exp(s * i12) <=
                  std::pow(2.0, s) * std::exp(s * i1) * (1.0 + 1e-9));
        }

    CHECK_THROWS_AS(renyi_down(bpsk(1.0), 0.6, Marginal::X1, spec), Error);
    CHECK_THROWS_AS(renyi_down(bpsk(1.0), -0.1, Marginal::X1, spec), Error);
}

TEST_CASE("quadrature machinery") {
    QuadratureSpec spec;
    double third = integrate([](double y) { return y * y; }, 0.0, 1.0, spec);
    CHECK(third == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // an integrable singularity cannot converge with a tiny depth budget
    QuadratureSpec shallow;
    shallow.max_subdivisions = 6;
    shallow.abs_tol = 1e-12;
    CHECK_THROWS_AS(integrate([](double y) { return 1.0 / std::sqrt(y + 1e-300); }, 0.0,
                              1.0, shallow),
                    QuadratureError);

    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0, spec), Error);
    QuadratureSpec bad;
    bad.truncation_sigmas = 2.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}
