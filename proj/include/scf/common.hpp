#ifndef SCF_COMMON_HPP
#define SCF_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scf {

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when adaptive quadrature fails to reach the requested tolerance.
class QuadratureError : public Error {
  public:
    explicit QuadratureError(const std::string& what) : Error(what) {}
};

namespace rng {

// SplitMix64 finalizer; used to derive independent per-trial seed streams
// from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x51ed270b0a5e4c9dull));
}

}  // namespace rng

namespace num {

inline double log_sum_exp(std::span<const double> logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - m);
    return m + std::log(acc);
}

inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (!std::isfinite(a)) return a;
    return a + std::log1p(std::exp(b - a));
}

// Decimal with 10 significant digits; shared by all CSV/JSON emitters.
std::string format10(double v);

}  // namespace num
}  // namespace scf

#endif
