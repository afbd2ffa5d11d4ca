#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "scf/protocol.hpp"

using namespace scf;
using namespace scf::protocol;

namespace {

ProtocolConfig basic_config(std::size_t n, std::size_t k, std::size_t kbar, double h,
                            double n0, std::uint64_t code_seed = 1) {
    ProtocolConfig cfg;
    cfg.channel = {h, h, n0, channel::Constellation::bpsk()};
    codes::EnsembleSpec spec{codes::EnsembleKind::toeplitz, n, k, 2, code_seed, std::nullopt};
    cfg.code = codes::sample_code(spec);
    cfg.split = codes::make_hash_split(k, kbar, 2);
    cfg.shift_mode = ShiftMode::random_per_trial;
    return cfg;
}

galois::FieldMatrix hamming74_parity() {
    galois::FieldMatrix h(2, 3, 7);
    for (std::uint32_t col = 1; col <= 7; ++col)
        for (std::uint32_t bit = 0; bit < 3; ++bit)
            if (col & (1u << bit)) h.set(bit, col - 1, 1);
    return h;
}

}  // namespace

TEST_CASE("config validation lists every violation") {
    ProtocolConfig cfg = basic_config(4, 2, 1, 1.0, 1.0);
    CHECK(cfg.violations().empty());

    cfg.split = codes::make_hash_split(3, 1, 2);  // wrong k
    cfg.channel.n0 = -1.0;
    cfg.decoder = DecoderKind::bp;  // no parity check supplied
    auto v = cfg.violations();
    CHECK(v.size() >= 3);
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("trials are deterministic and noiseless rounds always succeed") {
    ProtocolConfig cfg = basic_config(6, 3, 1, 1.0, 1e-12);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        TrialRecord t = run_trial(cfg, seed);
        CHECK(t.sum_decode_ok);
        CHECK(t.recovery_ok);
    }
    CHECK(trial_to_json(run_trial(cfg, 5)) == trial_to_json(run_trial(cfg, 5)));
    CHECK(trial_to_json(run_trial(cfg, 5)) != trial_to_json(run_trial(cfg, 6)));
}

TEST_CASE("correct sum decodes always imply peer recovery, even under noise") {
    ProtocolConfig cfg = basic_config(8, 3, 1, 1.0, 1.0);
    int decoded = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        TrialRecord t = run_trial(cfg, seed);
        if (t.sum_decode_ok) {
            ++decoded;
            CHECK(t.recovery_ok);
        }
    }
    CHECK(decoded > 0);  // the implication must not hold vacuously
}

TEST_CASE("degenerate split: everything sacrificed") {
    ProtocolConfig cfg = basic_config(4, 2, 2, 1.0, 1e-12);
    TrialRecord t = run_trial(cfg, 3);
    CHECK(t.m1.size() == 0);
    CHECK(t.relay_broadcast.size() == 0);
    CHECK(t.recovery_ok);  // vacuous
}

TEST_CASE("raw broadcast variant also recovers the peer messages") {
    ProtocolConfig cfg = basic_config(6, 3, 1, 1.0, 1e-12);
    cfg.broadcast = BroadcastMode::raw;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        TrialRecord t = run_trial(cfg, seed);
        CHECK(t.relay_broadcast.size() == 3);
        CHECK(t.recovery_ok);
    }
}

TEST_CASE("maximum-likelihood sum decoding") {
    ProtocolConfig cfg = basic_config(6, 3, 0, 1.0, 1e-12);
    const auto& code = cfg.code;
    galois::FieldVector e1(2, 6), e2(2, 6);

    // noiseless: always the true sum
    for (std::uint64_t i = 0; i < 8; ++i)
        for (std::uint64_t j = 0; j < 8; ++j) {
            auto v1 = codes::nth_vector(2, 3, i);
            auto v2 = codes::nth_vector(2, 3, j);
            auto y = channel::transmit(codes::encode_node(v1, code, e1),
                                       codes::encode_node(v2, code, e2), cfg.channel, i ^ j);
            CHECK(ml_decode(y, code, cfg.channel, e1, e2) == v1 + v2);
        }

    // ties resolve to the lexicographically smallest candidate, stably
    channel::MacChannelParams silent{0.0, 0.0, 1.0, channel::Constellation::bpsk()};
    std::vector<double> y0(6, 0.25);
    auto first = ml_decode(y0, code, silent, e1, e2);
    CHECK(first == galois::FieldVector(2, 3));
    CHECK(ml_decode(y0, code, silent, e1, e2) == first);

    CHECK_THROWS_AS(ml_decode(std::vector<double>(5, 0.0), code, cfg.channel, e1, e2),
                    Error);
}

TEST_CASE("ml decoding under negated observations and complemented shifts") {
    // For the symmetric binary constellation, negating the block and
    // complementing both shift vectors leaves the decision unchanged.
    ProtocolConfig cfg = basic_config(4, 2, 0, 1.2, 0.9, 5);
    const auto& code = cfg.code;
    channel::GaussianSampler gs(77);
    for (std::uint64_t e1i = 0; e1i < 16; ++e1i)
        for (std::uint64_t e2i = 0; e2i < 16; ++e2i) {
            auto e1 = codes::nth_vector(2, 4, e1i);
            auto e2 = codes::nth_vector(2, 4, e2i);
            galois::FieldVector ones(2, {1, 1, 1, 1});
            std::vector<double> y(4), neg(4);
            for (int t = 0; t < 4; ++t) {
                y[t] = 2.4 * gs.next();
                neg[t] = -y[t];
            }
            CHECK(ml_decode(y, code, cfg.channel, e1, e2) ==
                  ml_decode(neg, code, cfg.channel, e1 + ones, e2 + ones));
        }
}

TEST_CASE("ml decoding error rate at high gain") {
    ProtocolConfig cfg = basic_config(16, 4, 0, 5.0, 1.0);
    auto rep = error_rate(cfg, 10000, 99);
    CHECK(rep.p_sum_err < 1e-2);
    CHECK(rep.p_recovery_err <= rep.p_sum_err + 1e-12);
}

TEST_CASE("silent channel collapses to the uniform-guess baseline") {
    ProtocolConfig cfg = basic_config(6, 2, 0, 0.0, 1.0);
    auto rep = error_rate(cfg, 8000, 17);
    double baseline = 1.0 - 0.25;  // decoder emits one fixed guess out of q^k
    CHECK(std::abs(rep.p_sum_err - baseline) <= rep.wilson_halfwidth + 0.01);
}

TEST_CASE("halfwidth shrinks like the square root of the trial count") {
    ProtocolConfig cfg = basic_config(8, 2, 0, 1.0, 1.0);
    auto a = error_rate(cfg, 2000, 5);
    auto b = error_rate(cfg, 4000, 5);
    double ratio = a.wilson_halfwidth / b.wilson_halfwidth;
    CHECK(ratio > 1.2);
    CHECK(ratio < 1.7);
}

TEST_CASE("belief propagation matches exhaustive decoding") {
    // repetition code as a degenerate sparse graph
    {
        ProtocolConfig cfg;
        cfg.channel = {3.0, 3.0, 1.0, channel::Constellation::bpsk()};
        cfg.code = codes::repetition_code(3);
        cfg.split = codes::make_hash_split(1, 0, 2);
        galois::FieldMatrix h(2, 2, 3);
        h.set(0, 0, 1);
        h.set(0, 1, 1);
        h.set(1, 1, 1);
        h.set(1, 2, 1);
        cfg.parity_check = h;
        cfg.decoder = DecoderKind::bp;
        cfg.shift_mode = ShiftMode::random_per_trial;
        cfg.bp_iterations = 30;
        CHECK(cfg.violations().empty());

        int agree = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            TrialRecord t = run_trial(cfg, seed);
            auto ml = ml_decode(t.y, cfg.code, cfg.channel, t.e1, t.e2);
            if (ml == t.v_hat) ++agree;
        }
        CHECK(agree == 100);
    }

    // Hamming (7,4)
    {
        auto h = hamming74_parity();
        auto code = codes::generator_from_parity(h);
        REQUIRE(code.k == 4);
        ProtocolConfig cfg;
        cfg.channel = {5.0, 5.0, 1.0, channel::Constellation::bpsk()};
        cfg.code = code;
        cfg.split = codes::make_hash_split(4, 0, 2);
        cfg.parity_check = h;
        cfg.decoder = DecoderKind::bp;
        cfg.shift_mode = ShiftMode::random_per_trial;
        cfg.bp_iterations = 50;
        CHECK(cfg.violations().empty());

        int agree = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            TrialRecord t = run_trial(cfg, seed);
            auto ml = ml_decode(t.y, cfg.code, cfg.channel, t.e1, t.e2);
            if (ml == t.v_hat) ++agree;
        }
        CHECK(agree >= 99);
    }
}

TEST_CASE("belief propagation rejects bad inputs") {
    auto code = codes::repetition_code(3);
    channel::MacChannelParams p{1.0, 1.0, 1.0, channel::Constellation::bpsk()};
    galois::FieldVector e(2, 3);
    galois::FieldMatrix wrong(2, 1, 4);
    CHECK_THROWS_AS(bp_decode({0.0, 0.0, 0.0}, code, wrong, 10, p, e, e), Error);

    galois::FieldMatrix not_orth(2, 1, 3);
    not_orth.set(0, 0, 1);
    CHECK_THROWS_AS(bp_decode({0.0, 0.0, 0.0}, code, not_orth, 10, p, e, e), Error);
}

TEST_CASE("noiseless belief propagation needs no iterations") {
    auto h = hamming74_parity();
    auto code = codes::generator_from_parity(h);
    channel::MacChannelParams p{2.0, 2.0, 1e-12, channel::Constellation::bpsk()};
    galois::FieldVector e(2, 7);
    auto v1 = codes::nth_vector(2, 4, 9);
    auto v2 = codes::nth_vector(2, 4, 6);
    auto y = channel::transmit(code.encode(v1), code.encode(v2), p, 4);
    auto res = bp_decode(y, code, h, 0, p, e, e);
    CHECK(res.parity_ok);
    CHECK(res.v_hat == v1 + v2);
}

TEST_CASE("whenever the sum decodes, both peers recover, exhaustively") {
    struct Case {
        std::size_t n, k, kbar;
    };
    for (Case c : {Case{3, 1, 0}, Case{3, 2, 1}, Case{6, 3, 1}, Case{5, 2, 0}}) {
        ProtocolConfig cfg = basic_config(c.n, c.k, c.kbar, 1.0, 1e-12, 11);
        const auto& code = cfg.code;
        const auto& split = cfg.split;
        galois::FieldVector e1(2, c.n), e2(2, c.n);

        std::uint64_t n_m = 1ull << (c.k - c.kbar), n_l = 1ull << c.kbar;
        for (std::uint64_t m1 = 0; m1 < n_m; ++m1)
            for (std::uint64_t l1 = 0; l1 < n_l; ++l1)
                for (std::uint64_t m2 = 0; m2 < n_m; ++m2)
                    for (std::uint64_t l2 = 0; l2 < n_l; ++l2) {
                        auto mv1 = codes::nth_vector(2, c.k - c.kbar, m1);
                        auto lv1 = codes::nth_vector(2, c.kbar, l1);
                        auto mv2 = codes::nth_vector(2, c.k - c.kbar, m2);
                        auto lv2 = codes::nth_vector(2, c.kbar, l2);
                        auto v1 = split.combine(mv1, lv1);
                        auto v2 = split.combine(mv2, lv2);
                        auto y = channel::transmit(codes::encode_node(v1, code, e1),
                                                   codes::encode_node(v2, code, e2),
                                                   cfg.channel, m1 * 64 + l1 * 16 + m2 * 4 + l2);
                        auto v_hat = ml_decode(y, code, cfg.channel, e1, e2);
                        REQUIRE(v_hat == v1 + v2);
                        auto broadcast = split.F * v_hat;
                        CHECK(broadcast - mv1 == mv2);
                        CHECK(broadcast - mv2 == mv1);
                    }
    }
}

TEST_CASE("the decoded sum is independent of each node's vector") {
    // count-based factorisation of (v1+v2, v1) over the full message box
    const std::size_t k = 3;
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> counts;
    for (std::uint64_t a = 0; a < 8; ++a)
        for (std::uint64_t b = 0; b < 8; ++b) {
            auto v1 = codes::nth_vector(2, k, a);
            auto v2 = codes::nth_vector(2, k, b);
            auto sum = v1 + v2;
            std::uint64_t si = 0;
            for (std::size_t i = 0; i < k; ++i) si |= static_cast<std::uint64_t>(sum[i]) << i;
            ++counts[{si, a}];
        }
    CHECK(counts.size() == 64);
    for (const auto& [key, c] : counts) CHECK(c == 1);
}

namespace {

ProtocolConfig leakage_config(double h, double n0) {
    ProtocolConfig cfg;
    cfg.channel = {h, h, n0, channel::Constellation::bpsk()};
    cfg.code = codes::repetition_code(2);
    cfg.split = codes::make_hash_split(1, 0, 2);
    cfg.shift_mode = ShiftMode::fixed;
    cfg.e1 = galois::FieldVector(2, 2);
    cfg.e2 = galois::FieldVector(2, 2);
    return cfg;
}

}  // namespace

TEST_CASE("exact leakage oracle") {
    // silent channel leaks nothing
    auto silent = leakage_exact(leakage_config(0.0, 1.0), 1);
    CHECK(std::abs(silent.value) <= 1e-9);

    // no message variable, nothing to leak
    ProtocolConfig all_dummy = leakage_config(1.0, 1.0);
    all_dummy.split = codes::make_hash_split(1, 1, 2);
    CHECK(leakage_exact(all_dummy, 1).value == 0.0);

    // pinned regression value for the 2-use repetition setup at unit gain
    auto est = leakage_exact(leakage_config(1.0, 1.0), 1);
    CHECK(std::abs(est.value - 0.49766112818898656) <= 1e-6);
    CHECK(est.value >= 0.0);
    CHECK(est.value <= 2.0);
    // the two nodes are symmetric here
    CHECK(leakage_exact(leakage_config(1.0, 1.0), 2).value ==
          doctest::Approx(est.value).epsilon(1e-9));

    CHECK_THROWS_AS(leakage_exact(leakage_config(1.0, 1.0), 3), Error);
    ProtocolConfig big = basic_config(6, 3, 0, 1.0, 1.0);
    big.shift_mode = ShiftMode::fixed;
    big.e1 = galois::FieldVector(2, 6);
    big.e2 = galois::FieldVector(2, 6);
    CHECK_THROWS_AS(leakage_exact(big, 1), Error);  // n too large for the oracle
}

TEST_CASE("shift-averaged exact leakage") {
    auto est = leakage_exact_shift_averaged(leakage_config(1.0, 1.0), 1);
    CHECK(std::abs(est.value - 0.6701809554066205) <= 1e-6);
}

TEST_CASE("monte-carlo leakage agrees with the exact oracle") {
    auto exact = leakage_exact(leakage_config(1.0, 1.0), 1);
    auto mc = leakage_mc(leakage_config(1.0, 1.0), 1, 20000, 7);
    REQUIRE(mc.std_error);
    CHECK(std::abs(mc.value - exact.value) <= 3.0 * *mc.std_error);
    CHECK(mc.value <= 2.0 + 3.0 * *mc.std_error);

    auto silent = leakage_mc(leakage_config(0.0, 1.0), 1, 5000, 3);
    CHECK(std::abs(silent.value) <= 3.0 * (*silent.std_error + 1e-12));

    // deterministic given the master seed
    auto again = leakage_mc(leakage_config(1.0, 1.0), 1, 20000, 7);
    CHECK(again.value == mc.value);
}

TEST_CASE("trial records serialise with the agreed field names") {
    ProtocolConfig cfg = basic_config(4, 2, 1, 1.0, 1.0);
    TrialRecord t = run_trial(cfg, 12);
    auto j = nlohmann::json::parse(trial_to_json(t));
    for (const char* key :
         {"m1", "m2", "l1", "l2", "e1", "e2", "y", "v_hat", "relay_broadcast",
          "recovered_m2_at_node1", "recovered_m1_at_node2", "sum_decode_ok", "recovery_ok"})
        CHECK(j.contains(key));
    CHECK(j["y"].size() == 4);
    CHECK(j["m1"].size() == 1);
    CHECK(j["l1"].size() == 1);
    CHECK(j["sum_decode_ok"].is_boolean());
}
