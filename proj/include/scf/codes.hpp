#ifndef SCF_CODES_HPP
#define SCF_CODES_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scf/galois.hpp"

namespace scf::codes {

using galois::FieldMatrix;
using galois::FieldVector;

// v in F_q^len for index in [0, q^len), least-significant digit first.
FieldVector nth_vector(std::uint32_t q, std::size_t len, std::uint64_t index);

// Injective linear encoder F_q^k -> F_q^n held as an n x k matrix.
struct GeneratorCode {
    std::size_t n = 0, k = 0;
    std::uint32_t q = 2;
    FieldMatrix matrix;  // n x k, rank k

    static GeneratorCode create(FieldMatrix m);
    FieldVector encode(const FieldVector& v) const { return matrix * v; }
};

GeneratorCode repetition_code(std::size_t n, std::uint32_t q = 2);
GeneratorCode single_parity_check_code(std::size_t n, std::uint32_t q = 2);

// Message/dummy-randomness split: F projects onto the first k-kbar
// coordinates, F1 embeds messages there, F2 embeds the sacrificed symbols
// into the remaining kbar coordinates. F*F1 = I, F*F2 = 0, [F1|F2] invertible.
struct HashSplit {
    std::size_t k = 0, kbar = 0;
    std::uint32_t q = 2;
    FieldMatrix F;   // (k-kbar) x k
    FieldMatrix F1;  // k x (k-kbar)
    FieldMatrix F2;  // k x kbar

    // V = F1 m + F2 l.
    FieldVector combine(const FieldVector& m, const FieldVector& l) const;
    void validate() const;  // throws on any broken invariant
};

HashSplit make_hash_split(std::size_t k, std::size_t kbar, std::uint32_t q);

// Symbol-count histogram of a word of length n over F_q.
struct Composition {
    std::vector<std::uint64_t> counts;  // length q, sums to n

    std::uint64_t total() const;
    bool operator<(const Composition& o) const { return counts < o.counts; }
    bool operator==(const Composition& o) const = default;
};

Composition composition_of(const FieldVector& x);
std::string to_string(const Composition& c);

// log of the multinomial coefficient n over (counts); exact flag reports
// whether the companion value() is an exactly represented integer.
struct Multinomial {
    double value;
    double log_value;
    bool exact;
};
Multinomial multinomial(const Composition& c);

enum class EnsembleKind { uniform, toeplitz, fixed_permuted };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::uniform;
    std::size_t n = 0, k = 0;
    std::uint32_t q = 2;
    std::uint64_t seed = 0;
    std::optional<GeneratorCode> base_code;  // required for fixed_permuted

    void validate() const;
};

// Deterministic given spec.seed. Uniform kind redraws until rank k
// (at most 256 attempts), toeplitz stacks an identity over a random
// Toeplitz block, fixed_permuted applies a uniform row permutation.
GeneratorCode sample_code(const EnsembleSpec& spec);

struct MembershipProbability {
    double value = 0.0;
    bool exact = false;
    std::uint64_t samples = 0;  // 0 in exact mode
};

// Pr{x in Im G} under the ensemble, for nonzero x. Exact by full enumeration
// when the ensemble is small enough, otherwise Monte Carlo over sampled codes.
MembershipProbability membership_probability(const EnsembleSpec& spec, const FieldVector& x,
                                             std::uint64_t mc_samples = 200000);

// Codeword count per nonzero composition class, by enumeration of all q^k
// codewords. Requires q^k <= 2^20.
std::map<Composition, std::uint64_t> composition_counts(const GeneratorCode& code);

struct DeviationReport {
    double a = 0.0;      // max over nonzero compositions of N * q^(n-k) / multinomial
    double log_a = 0.0;  // natural log, safe for large n
    Composition argmax;
    bool exact = true;  // value computed in exactly-representable integer arithmetic
};

// Deviation of a single code, which is also the ensemble value under the
// row-permutation ensemble of that code.
DeviationReport deviation_A(const GeneratorCode& code);

// Ensemble-averaged deviation by Monte Carlo: per-composition codeword
// counts are averaged over sampled codes first, the maximum is taken last.
DeviationReport deviation_A_ensemble(const EnsembleSpec& spec, std::size_t num_samples);

// G v + e.
FieldVector encode_node(const FieldVector& v, const GeneratorCode& code, const FieldVector& e);

// Standalone Toeplitz hash family F_q^cols -> F_q^rows (uniform diagonals).
FieldMatrix sample_toeplitz_hash(std::size_t rows, std::size_t cols, std::uint32_t q,
                                 std::uint64_t seed);

// Sparse parity-check matrices in alist text form (binary only).
FieldMatrix parse_alist(std::istream& in);
FieldMatrix load_alist_file(const std::string& path);

// Systematic-style generator for the null space of H, via elimination.
GeneratorCode generator_from_parity(const FieldMatrix& parity);

}  // namespace scf::codes

#endif
