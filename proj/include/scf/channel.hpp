#ifndef SCF_CHANNEL_HPP
#define SCF_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "scf/galois.hpp"

namespace scf::channel {

using galois::FieldVector;

// Symbol-to-amplitude map sigma: F_q -> R.
struct Constellation {
    std::uint32_t q = 2;
    std::vector<double> points;

    static Constellation bpsk();  // sigma(x) = (-1)^x
    double map(std::uint32_t symbol) const { return points[symbol]; }
    void validate() const;
};

// Two-user Gaussian multiple-access channel
//   Y = h1 sigma(X1) + h2 sigma(X2) + Z,  Z ~ N(0, N0).
struct MacChannelParams {
    double h1 = 1.0, h2 = 1.0;
    double n0 = 1.0;
    Constellation constellation = Constellation::bpsk();

    void validate() const;
    double mean(std::uint32_t a, std::uint32_t b) const {
        return h1 * constellation.map(a) + h2 * constellation.map(b);
    }
};

using ReceivedBlock = std::vector<double>;

double gaussian_density(double y, double mean, double n0);
double log_gaussian_density(double y, double mean, double n0);

// One block of n simultaneous channel uses; deterministic given seed.
ReceivedBlock transmit(const FieldVector& x1, const FieldVector& x2,
                       const MacChannelParams& params, std::uint64_t seed);

// Density of Y given X1 = a, X2 = b.
double pair_likelihood(double y, std::uint32_t a, std::uint32_t b,
                       const MacChannelParams& params);

// Density of Y given X1 + X2 = c with the per-user inputs uniform over the
// sum class, evaluated with the public shifts folded into the symbols:
//   (1/q) sum_a phi(y; h1 sigma(a + shift1) + h2 sigma(c - a + shift2), N0).
double degraded_density(double y, std::uint32_t c, const MacChannelParams& params,
                        std::uint32_t shift1 = 0, std::uint32_t shift2 = 0);
double log_degraded_density(double y, std::uint32_t c, const MacChannelParams& params,
                            std::uint32_t shift1 = 0, std::uint32_t shift2 = 0);

// Deterministic standard normal draws (Box-Muller on explicit 53-bit
// uniforms) so blocks are reproducible across standard libraries.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : state_(seed) {}
    double next();

  private:
    double next_uniform();  // (0, 1)
    std::uint64_t state_;
};

}  // namespace scf::channel

#endif
