#ifndef SCF_BOUNDS_HPP
#define SCF_BOUNDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scf/infoq.hpp"

namespace scf::bounds {

struct CodeRateParams {
    std::size_t n = 0, k = 0, kbar = 0;
    std::uint32_t q = 2;

    void validate() const;  // kbar <= k <= n, q prime
    double r0() const;      // (k/n) log q, nats
    double r1() const;      // (kbar/n) log q, nats
};

// First finite-length leakage bound at parameter s, given the per-letter
// Renyi information of Y against one input:
//   B1 = 3 q^{s(n-k-kbar)} exp(s n I).
double log_bound_b1(const CodeRateParams& p, double s, double renyi_x1);
double bound_b1(const CodeRateParams& p, double s, double renyi_x1);

// Second bound, two log-domain terms:
//   B2 = 3 q^{-s(k+kbar)} exp(s n I12) + 3 A^s q^{-s kbar} exp(s n I1).
double log_bound_b2_logA(const CodeRateParams& p, double s, double log_A, double renyi_x1,
                         double renyi_x1x2);
double bound_b2(const CodeRateParams& p, double s, double A, double renyi_x1,
                double renyi_x1x2);

struct LeakageBoundReport {
    double s_star = 0.0;  // argmin for the requested bound
    double b1 = 0.0;
    double log_b1 = 0.0;  // natural log; finite even when b1 saturates
    std::optional<double> b2;
    std::optional<double> log_b2;
    std::optional<double> a_used;
    bool b1_overflowed = false;
    bool b2_overflowed = false;
};

enum class BoundKind { b1, b2 };

// Minimises the requested bound over s in [0, 1/2]: 64-point grid plus
// golden-section refinement to |ds| <= 1e-4. The Renyi integrals are
// recomputed per candidate s (memoised on exact s values).
LeakageBoundReport optimize_bound(BoundKind kind, const CodeRateParams& p,
                                  std::optional<double> A,
                                  const channel::MacChannelParams& channel,
                                  const infoq::QuadratureSpec& spec);

struct ExponentReport {
    double e1 = 0.0;
    double e2 = 0.0;
};

// Asymptotic decay exponents of the two bounds at rates derived from p.
ExponentReport exponents(const CodeRateParams& p, const channel::MacChannelParams& channel,
                         double r2, const infoq::QuadratureSpec& spec);

struct RateReport {
    double r0 = 0.0;
    double rate1 = 0.0;  // 2 r0 - log q - I(Y;X1)
    double rate2 = 0.0;  // min(2 r0 - I(Y;X1,X2), r0 - r2 - I(Y;X1))
    double rate3 = 0.0;  // rate2 at r2 = 0
    double r2_used = 0.0;
};

RateReport rate_report(const channel::MacChannelParams& channel, double r0, double r2,
                       const infoq::QuadratureSpec& spec);

// Closed-form BPSK rate curves in the offset convention with component
// means 0, h, 2h and common variance N0 (evaluated mean-centred).
double rate_h13(double h, double n0, const infoq::QuadratureSpec& spec);
double rate_h17(double h, double n0, const infoq::QuadratureSpec& spec);
double i_of_h(double h, double n0, const infoq::QuadratureSpec& spec);

struct RateCurveRow {
    double h = 0.0;
    double rate_h13 = 0.0;
    double rate_h17 = 0.0;
    double i_h = 0.0;
};

std::vector<RateCurveRow> bpsk_rate_curves(std::span<const double> h_grid, double n0,
                                           const infoq::QuadratureSpec& spec);

// Sign changes of f on [lo, hi] located by scan + bisection to 1e-6.
std::vector<double> find_zero_crossings(const std::function<double(double)>& f, double lo,
                                        double hi, double step);

// Rate penalty table Delta I(h) for a practically decodable code family,
// ingested from CSV (header `h,delta_i_nats`, `#` comments allowed).
struct DeltaITable {
    struct Row {
        double h = 0.0;
        double delta_i = 0.0;
    };
    std::vector<Row> rows;  // strictly increasing h, delta_i >= 0
    std::string family;     // free-form label from `# family:` comments

    static DeltaITable parse(std::istream& in);
    static DeltaITable load_file(const std::string& path);
    // Linear interpolation; h outside the table range is an error.
    double interpolate(double h) const;
};

struct AdjustedRateRow {
    double h = 0.0;
    double rate_h14 = 0.0;  // rate_h13 - 2 DeltaI(h)
    double rate_h18 = 0.0;  // rate_h17 - 2 DeltaI(h)
};

std::vector<AdjustedRateRow> ldpc_adjusted_rates(const DeltaITable& table,
                                                 std::span<const double> h_grid, double n0,
                                                 const infoq::QuadratureSpec& spec);

struct VerifyGrid {
    std::vector<std::size_t> ns{8, 16, 64};
    std::vector<double> k_fractions{0.25, 0.5, 0.75};
    std::vector<double> ss{0.1, 0.3, 0.5};
    std::vector<double> hs{0.5, 1.0, 2.0, 4.0};
    double n0 = 1.0;
    std::uint32_t q = 2;

    static VerifyGrid full();
    static VerifyGrid small();
};

struct VerificationReport {
    struct Check {
        std::string name;
        bool pass = false;
        double margin = 0.0;  // worst slack observed; negative means violated
        std::string detail;
    };
    std::vector<Check> checks;

    bool all_pass() const;
};

// Machine-checks the bound-comparison inequality, the pair-marginal Renyi
// inequality, and the rate identity on the given grids. inject_fault
// deliberately corrupts the first check (harness self-test).
VerificationReport verify_inequalities(const VerifyGrid& grid = VerifyGrid::full(),
                                       bool inject_fault = false);

}  // namespace scf::bounds

#endif
