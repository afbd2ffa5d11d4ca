#include "scf/channel.hpp"

#include <cmath>
#include <numbers>

namespace scf::channel {

Constellation Constellation::bpsk() {
    return Constellation{2, {1.0, -1.0}};
}

void Constellation::validate() const {
    if (!galois::is_prime(q)) throw Error("constellation: q must be prime");
    if (points.size() != q) throw Error("constellation: needs one point per symbol");
    for (double p : points)
        if (!std::isfinite(p)) throw Error("constellation: non-finite point");
}

void MacChannelParams::validate() const {
    constellation.validate();
    if (!(n0 > 0.0)) throw Error("channel: noise variance must be positive");
    if (!std::isfinite(h1) || !std::isfinite(h2)) throw Error("channel: non-finite gain");
}

double gaussian_density(double y, double mean, double n0) {
    if (!(n0 > 0.0)) throw Error("gaussian density: variance must be positive");
    double d = y - mean;
    return std::exp(-d * d / (2.0 * n0)) / std::sqrt(2.0 * std::numbers::pi * n0);
}

double log_gaussian_density(double y, double mean, double n0) {
    if (!(n0 > 0.0)) throw Error("gaussian density: variance must be positive");
    double d = y - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * n0) - d * d / (2.0 * n0);
}

double GaussianSampler::next_uniform() {
    state_ = rng::splitmix64(state_);
    // Top 53 bits, shifted into (0, 1); never exactly 0.
    return (static_cast<double>(state_ >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianSampler::next() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

ReceivedBlock transmit(const FieldVector& x1, const FieldVector& x2,
                       const MacChannelParams& params, std::uint64_t seed) {
    params.validate();
    if (x1.size() != x2.size()) throw Error("transmit: input length mismatch");
    GaussianSampler gauss(seed);
    double sd = std::sqrt(params.n0);
    ReceivedBlock y(x1.size());
    for (std::size_t t = 0; t < y.size(); ++t)
        y[t] = params.mean(x1[t], x2[t]) + sd * gauss.next();
    return y;
}

double pair_likelihood(double y, std::uint32_t a, std::uint32_t b,
                       const MacChannelParams& params) {
    return gaussian_density(y, params.mean(a, b), params.n0);
}

double degraded_density(double y, std::uint32_t c, const MacChannelParams& params,
                        std::uint32_t shift1, std::uint32_t shift2) {
    const std::uint32_t q = params.constellation.q;
    double acc = 0.0;
    for (std::uint32_t a = 0; a < q; ++a) {
        std::uint32_t s1 = galois::mod_add(a, shift1 % q, q);
        std::uint32_t s2 = galois::mod_add(galois::mod_sub(c % q, a, q), shift2 % q, q);
        acc += gaussian_density(y, params.mean(s1, s2), params.n0);
    }
    return acc / static_cast<double>(q);
}

double log_degraded_density(double y, std::uint32_t c, const MacChannelParams& params,
                            std::uint32_t shift1, std::uint32_t shift2) {
    const std::uint32_t q = params.constellation.q;
    std::vector<double> logs(q);
    for (std::uint32_t a = 0; a < q; ++a) {
        std::uint32_t s1 = galois::mod_add(a, shift1 % q, q);
        std::uint32_t s2 = galois::mod_add(galois::mod_sub(c % q, a, q), shift2 % q, q);
        logs[a] = log_gaussian_density(y, params.mean(s1, s2), params.n0);
    }
    return num::log_sum_exp(logs) - std::log(static_cast<double>(q));
}

}  // namespace scf::channel
