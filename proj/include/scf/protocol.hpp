#ifndef SCF_PROTOCOL_HPP
#define SCF_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scf/channel.hpp"
#include "scf/codes.hpp"

namespace scf::protocol {

using codes::FieldMatrix;
using codes::FieldVector;
using codes::GeneratorCode;
using codes::HashSplit;

enum class DecoderKind { ml, bp };
enum class ShiftMode { fixed, random_per_trial };
enum class BroadcastMode { hashed, raw };  // relay sends F(V_R) or V_R

struct ProtocolConfig {
    channel::MacChannelParams channel;
    GeneratorCode code;
    HashSplit split;

    ShiftMode shift_mode = ShiftMode::fixed;
    FieldVector e1, e2;  // used when shift_mode == fixed; length n

    DecoderKind decoder = DecoderKind::ml;
    int bp_iterations = 50;
    std::optional<FieldMatrix> parity_check;  // required for bp; null space must contain Im G

    BroadcastMode broadcast = BroadcastMode::hashed;

    // Every violated invariant, or empty when the config is usable.
    std::vector<std::string> violations() const;
    void validate() const;  // throws with all violations joined
};

// One full round: draw messages and dummy randomness, encode with the hash
// split and shifts, transmit, decode the modulo sum at the relay, broadcast,
// recover the peer messages at both nodes.
struct TrialRecord {
    FieldVector m1, m2;  // length k - kbar
    FieldVector l1, l2;  // length kbar
    FieldVector e1, e2;  // length n
    std::vector<double> y;
    FieldVector v_hat;            // decoded V1 + V2
    FieldVector relay_broadcast;  // F(v_hat) or v_hat
    FieldVector recovered_m2_at_node1;
    FieldVector recovered_m1_at_node2;
    bool sum_decode_ok = false;
    bool recovery_ok = false;
};

TrialRecord run_trial(const ProtocolConfig& config, std::uint64_t seed);

// Exhaustive maximum-likelihood decoding of the sum vector: argmax over all
// v of the shift-aware degraded log likelihood, ties broken by the
// lexicographically smallest v. Requires q^k <= 2^20.
FieldVector ml_decode(const std::vector<double>& y, const GeneratorCode& code,
                      const channel::MacChannelParams& params, const FieldVector& e1,
                      const FieldVector& e2);

struct BpResult {
    FieldVector v_hat;
    bool parity_ok = false;
};

// Binary sum-product decoding on the Tanner graph of `parity`, fed with
// shift-aware degraded-channel LLRs; the decoded codeword is mapped back to
// message coordinates through the generator.
BpResult bp_decode(const std::vector<double>& y, const GeneratorCode& code,
                   const FieldMatrix& parity, int iterations,
                   const channel::MacChannelParams& params, const FieldVector& e1,
                   const FieldVector& e2);

struct ErrorRateReport {
    double p_sum_err = 0.0;
    double p_recovery_err = 0.0;
    double wilson_halfwidth = 0.0;  // 95% interval halfwidth for p_sum_err
    std::uint64_t trials = 0;
};

ErrorRateReport error_rate(const ProtocolConfig& config, std::uint64_t trials,
                           std::uint64_t master_seed);

enum class LeakageMethod { exact_quadrature, monte_carlo };

struct LeakageEstimate {
    double value = 0.0;  // total variation, in [0, 2]
    LeakageMethod method = LeakageMethod::exact_quadrature;
    std::optional<double> std_error;
    int node = 1;
};

// Exact total variation between the joint law of (message, relay
// observation) and the product of its marginals, at the fixed shifts of the
// config. Tensor-product adaptive quadrature; requires n <= 2 and
// q^(2k) <= 2^10.
LeakageEstimate leakage_exact(const ProtocolConfig& config, int node);

// Same criterion averaged over all q^(2n) shift pairs.
LeakageEstimate leakage_exact_shift_averaged(const ProtocolConfig& config, int node);

// Monte Carlo companion: E |1 - p(y)/p(y|m)| under the joint law, with the
// per-sample densities enumerated exactly. Requires q^(2k) <= 2^16.
LeakageEstimate leakage_mc(const ProtocolConfig& config, int node, std::uint64_t samples,
                           std::uint64_t master_seed);

// One JSON object per line; field names match TrialRecord.
std::string trial_to_json(const TrialRecord& t);

}  // namespace scf::protocol

#endif
