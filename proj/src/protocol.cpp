#include "scf/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "scf/infoq.hpp"

namespace scf::protocol {

namespace {

std::uint64_t pow_u64(std::uint64_t b, std::size_t e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

FieldVector draw_vector(std::uint32_t q, std::size_t len, std::mt19937_64& eng) {
    FieldVector v(q, len);
    for (std::size_t i = 0; i < len; ++i) v.set(i, static_cast<std::uint32_t>(eng() % q));
    return v;
}

// Lexicographic enumeration: index digit 0 is the first (most significant)
// coordinate, so increasing index is increasing lexicographic order.
FieldVector lex_vector(std::uint32_t q, std::size_t len, std::uint64_t index) {
    FieldVector v(q, len);
    for (std::size_t i = len; i-- > 0;) {
        v.set(i, static_cast<std::uint32_t>(index % q));
        index /= q;
    }
    return v;
}

}  // namespace

std::vector<std::string> ProtocolConfig::violations() const {
    std::vector<std::string> out;
    try {
        channel.validate();
    } catch (const Error& e) {
        out.push_back(e.what());
    }
    if (channel.constellation.q != code.q) out.push_back("constellation/code modulus mismatch");
    if (split.k != code.k) out.push_back("hash split dimension disagrees with code dimension");
    try {
        split.validate();
    } catch (const Error& e) {
        out.push_back(e.what());
    }
    if (shift_mode == ShiftMode::fixed) {
        if (e1.size() != code.n || e2.size() != code.n)
            out.push_back("fixed shift vectors must have length n");
        else if (e1.q() != code.q || e2.q() != code.q)
            out.push_back("shift vector modulus mismatch");
    }
    if (decoder == DecoderKind::bp) {
        if (code.q != 2)
            out.push_back("belief propagation supports q = 2 only");
        if (!parity_check)
            out.push_back("belief propagation needs a parity-check matrix");
        else if (parity_check->cols() != code.n)
            out.push_back("parity-check column count disagrees with n");
        else if (parity_check->q() != code.q)
            out.push_back("parity-check modulus mismatch");
        else if (!(*parity_check * code.matrix).is_zero())
            out.push_back("parity-check null space does not contain the code image");
        if (bp_iterations < 1) out.push_back("belief propagation needs at least one iteration");
    }
    return out;
}

void ProtocolConfig::validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid protocol config:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw Error(msg);
}

FieldVector ml_decode(const std::vector<double>& y, const GeneratorCode& code,
                      const channel::MacChannelParams& params, const FieldVector& e1,
                      const FieldVector& e2) {
    if (y.size() != code.n) throw Error("ml decode: block length mismatch");
    double bits = static_cast<double>(code.k) * std::log2(static_cast<double>(code.q));
    if (bits > 20.0) throw Error("ml decode: q^k exceeds the exhaustive-search budget");

    const std::uint32_t q = code.q;
    // Per-position log likelihood of each candidate sum symbol.
    std::vector<std::vector<double>> table(code.n, std::vector<double>(q));
    for (std::size_t t = 0; t < code.n; ++t)
        for (std::uint32_t c = 0; c < q; ++c)
            table[t][c] = channel::log_degraded_density(y[t], c, params, e1[t], e2[t]);

    std::uint64_t total = pow_u64(q, code.k);
    double best = -std::numeric_limits<double>::infinity();
    FieldVector best_v(q, code.k);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        FieldVector v = lex_vector(q, code.k, idx);
        FieldVector x = code.encode(v);
        double score = 0.0;
        for (std::size_t t = 0; t < code.n; ++t) score += table[t][x[t]];
        if (score > best) {  // first hit wins ties: lexicographically smallest
            best = score;
            best_v = v;
        }
    }
    return best_v;
}

BpResult bp_decode(const std::vector<double>& y, const GeneratorCode& code,
                   const FieldMatrix& parity, int iterations,
                   const channel::MacChannelParams& params, const FieldVector& e1,
                   const FieldVector& e2) {
    if (code.q != 2) throw Error("bp decode: q = 2 only");
    if (parity.cols() != code.n || parity.q() != 2)
        throw Error("bp decode: parity-check shape mismatch");
    if (!(parity * code.matrix).is_zero())
        throw Error("bp decode: parity-check does not annihilate the code");
    if (y.size() != code.n) throw Error("bp decode: block length mismatch");

    const std::size_t n = code.n, m = parity.rows();
    std::vector<std::vector<std::size_t>> check_vars(m);
    std::vector<std::vector<std::size_t>> var_checks(n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (parity.at(i, j)) {
                check_vars[i].push_back(j);
                var_checks[j].push_back(i);
            }

    std::vector<double> llr(n);
    for (std::size_t t = 0; t < n; ++t)
        llr[t] = channel::log_degraded_density(y[t], 0, params, e1[t], e2[t]) -
                 channel::log_degraded_density(y[t], 1, params, e1[t], e2[t]);

    auto clamp = [](double v) { return std::clamp(v, -30.0, 30.0); };

    // Messages stored per (check, position-in-check) edge.
    std::vector<std::vector<double>> var_to_check(m), check_to_var(m);
    for (std::size_t i = 0; i < m; ++i) {
        var_to_check[i].resize(check_vars[i].size());
        check_to_var[i].assign(check_vars[i].size(), 0.0);
        for (std::size_t e = 0; e < check_vars[i].size(); ++e)
            var_to_check[i][e] = llr[check_vars[i][e]];
    }

    std::vector<std::uint32_t> hard(n);
    auto decide = [&]() {
        for (std::size_t t = 0; t < n; ++t) {
            double total = llr[t];
            for (std::size_t i : var_checks[t]) {
                const auto& vars = check_vars[i];
                std::size_t e = static_cast<std::size_t>(
                    std::find(vars.begin(), vars.end(), t) - vars.begin());
                total += check_to_var[i][e];
            }
            hard[t] = total < 0.0 ? 1u : 0u;
        }
    };
    auto parity_holds = [&]() {
        for (std::size_t i = 0; i < m; ++i) {
            std::uint32_t acc = 0;
            for (std::size_t j : check_vars[i]) acc ^= hard[j];
            if (acc) return false;
        }
        return true;
    };

    decide();
    bool ok = parity_holds();
    for (int it = 0; it < iterations && !ok; ++it) {
        // Check update.
        for (std::size_t i = 0; i < m; ++i) {
            const auto& vars = check_vars[i];
            for (std::size_t e = 0; e < vars.size(); ++e) {
                double prod = 1.0;
                for (std::size_t e2i = 0; e2i < vars.size(); ++e2i) {
                    if (e2i == e) continue;
                    prod *= std::tanh(0.5 * clamp(var_to_check[i][e2i]));
                }
                prod = std::clamp(prod, -0.999999999999, 0.999999999999);
                check_to_var[i][e] = 2.0 * std::atanh(prod);
            }
        }
        // Variable update.
        for (std::size_t i = 0; i < m; ++i) {
            const auto& vars = check_vars[i];
            for (std::size_t e = 0; e < vars.size(); ++e) {
                std::size_t t = vars[e];
                double total = llr[t];
                for (std::size_t i2 : var_checks[t]) {
                    if (i2 == i) continue;
                    const auto& vars2 = check_vars[i2];
                    std::size_t e2i = static_cast<std::size_t>(
                        std::find(vars2.begin(), vars2.end(), t) - vars2.begin());
                    total += check_to_var[i2][e2i];
                }
                var_to_check[i][e] = clamp(total);
            }
        }
        decide();
        ok = parity_holds();
    }

    // Map the codeword estimate back to message coordinates via k
    // independent rows of G.
    std::vector<std::size_t> rows = galois::independent_rows(code.matrix);
    FieldMatrix gsub(2, code.k, code.k);
    FieldVector xsub(2, code.k);
    for (std::size_t i = 0; i < code.k; ++i) {
        for (std::size_t j = 0; j < code.k; ++j) gsub.set(i, j, code.matrix.at(rows[i], j));
        xsub.set(i, hard[rows[i]]);
    }
    auto v = galois::solve_membership(gsub, xsub);
    BpResult res;
    res.v_hat = v ? *v : FieldVector(2, code.k);
    if (ok && v) {
        // Outside the code image counts as failure even if parity held.
        ok = code.encode(*v).entries() == std::vector<std::uint32_t>(hard.begin(), hard.end());
    }
    res.parity_ok = ok && v.has_value();
    return res;
}

TrialRecord run_trial(const ProtocolConfig& config, std::uint64_t seed) {
    config.validate();
    const auto& code = config.code;
    const std::uint32_t q = code.q;
    std::mt19937_64 eng(rng::derive_seed(seed, 0x7121a1));

    TrialRecord t;
    t.m1 = draw_vector(q, code.k - config.split.kbar, eng);
    t.l1 = draw_vector(q, config.split.kbar, eng);
    t.m2 = draw_vector(q, code.k - config.split.kbar, eng);
    t.l2 = draw_vector(q, config.split.kbar, eng);
    if (config.shift_mode == ShiftMode::random_per_trial) {
        t.e1 = draw_vector(q, code.n, eng);
        t.e2 = draw_vector(q, code.n, eng);
    } else {
        t.e1 = config.e1;
        t.e2 = config.e2;
    }

    FieldVector v1 = config.split.combine(t.m1, t.l1);
    FieldVector v2 = config.split.combine(t.m2, t.l2);
    FieldVector x1 = codes::encode_node(v1, code, t.e1);
    FieldVector x2 = codes::encode_node(v2, code, t.e2);
    t.y = channel::transmit(x1, x2, config.channel, rng::derive_seed(seed, 0xc4a2));

    if (config.decoder == DecoderKind::ml) {
        t.v_hat = ml_decode(t.y, code, config.channel, t.e1, t.e2);
    } else {
        t.v_hat = bp_decode(t.y, code, *config.parity_check, config.bp_iterations,
                            config.channel, t.e1, t.e2)
                      .v_hat;
    }
    t.sum_decode_ok = (t.v_hat == v1 + v2);

    // Broadcast phase is error-free; each node subtracts what it knows.
    if (config.broadcast == BroadcastMode::hashed) {
        t.relay_broadcast = config.split.F * t.v_hat;
        t.recovered_m2_at_node1 = t.relay_broadcast - t.m1;
        t.recovered_m1_at_node2 = t.relay_broadcast - t.m2;
    } else {
        t.relay_broadcast = t.v_hat;
        t.recovered_m2_at_node1 = config.split.F * (t.v_hat - v1);
        t.recovered_m1_at_node2 = config.split.F * (t.v_hat - v2);
    }
    t.recovery_ok = (t.recovered_m2_at_node1 == t.m2) && (t.recovered_m1_at_node2 == t.m1);
    return t;
}

ErrorRateReport error_rate(const ProtocolConfig& config, std::uint64_t trials,
                           std::uint64_t master_seed) {
    if (trials < 1) throw Error("error rate: need at least one trial");
    config.validate();
    std::uint64_t sum_err = 0, rec_err = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        TrialRecord t = run_trial(config, rng::derive_seed(master_seed, i));
        if (!t.sum_decode_ok) ++sum_err;
        if (!t.recovery_ok) ++rec_err;
    }
    ErrorRateReport r;
    r.trials = trials;
    r.p_sum_err = static_cast<double>(sum_err) / static_cast<double>(trials);
    r.p_recovery_err = static_cast<double>(rec_err) / static_cast<double>(trials);
    const double z = 1.959963984540054;  // 95%
    double tn = static_cast<double>(trials);
    double p = r.p_sum_err;
    r.wilson_halfwidth =
        z / (1.0 + z * z / tn) * std::sqrt(p * (1.0 - p) / tn + z * z / (4.0 * tn * tn));
    return r;
}

namespace {

// Conditional law of the relay observation given one node's message, as a
// mixture of product Gaussians indexed by the conditioned message value.
struct NodeLaw {
    std::size_t n = 0;
    double n0 = 1.0;
    // per message value: list of (mean tuple, weight), weights sum to 1
    std::vector<std::vector<std::pair<std::vector<double>, double>>> per_message;

    double log_pdf(std::size_t msg, std::span<const double> y) const {
        const auto& comps = per_message[msg];
        std::vector<double> logs(comps.size());
        for (std::size_t j = 0; j < comps.size(); ++j) {
            double lp = std::log(comps[j].second);
            for (std::size_t t = 0; t < n; ++t)
                lp += channel::log_gaussian_density(y[t], comps[j].first[t], n0);
            logs[j] = lp;
        }
        return num::log_sum_exp(logs);
    }
};

NodeLaw build_node_law(const ProtocolConfig& config, int node, const FieldVector& e1,
                       const FieldVector& e2) {
    const auto& code = config.code;
    const auto& split = config.split;
    const std::uint32_t q = code.q;
    const std::uint64_t n_msgs = pow_u64(q, code.k - split.kbar);
    const std::uint64_t n_dummy = pow_u64(q, split.kbar);
    const std::uint64_t n_other = pow_u64(q, code.k);
    const double w = 1.0 / (static_cast<double>(n_dummy) * static_cast<double>(n_other));

    NodeLaw law;
    law.n = code.n;
    law.n0 = config.channel.n0;
    law.per_message.resize(n_msgs);

    for (std::uint64_t mi = 0; mi < n_msgs; ++mi) {
        std::map<std::vector<double>, double> agg;
        FieldVector m = codes::nth_vector(q, code.k - split.kbar, mi);
        for (std::uint64_t li = 0; li < n_dummy; ++li) {
            FieldVector l = codes::nth_vector(q, split.kbar, li);
            FieldVector v_cond = split.combine(m, l);
            FieldVector x_cond = codes::encode_node(v_cond, code, node == 1 ? e1 : e2);
            for (std::uint64_t oi = 0; oi < n_other; ++oi) {
                FieldVector v_other = codes::nth_vector(q, code.k, oi);
                FieldVector x_other =
                    codes::encode_node(v_other, code, node == 1 ? e2 : e1);
                std::vector<double> mean(code.n);
                for (std::size_t t = 0; t < code.n; ++t)
                    mean[t] = node == 1 ? config.channel.mean(x_cond[t], x_other[t])
                                        : config.channel.mean(x_other[t], x_cond[t]);
                agg[mean] += w;
            }
        }
        auto& list = law.per_message[mi];
        list.assign(agg.begin(), agg.end());
    }
    return law;
}

struct Axis {
    double lo, hi;
    std::vector<double> cuts;
};

Axis axis_for(const NodeLaw& law, std::size_t t, double truncation) {
    double sd = std::sqrt(law.n0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::vector<double> cuts;
    for (const auto& msg : law.per_message)
        for (const auto& comp : msg) {
            double mean = comp.first[t];
            lo = std::min(lo, mean);
            hi = std::max(hi, mean);
            cuts.push_back(mean);
            cuts.push_back(mean - 3.0 * sd);
            cuts.push_back(mean + 3.0 * sd);
        }
    return Axis{lo - truncation * sd, hi + truncation * sd, std::move(cuts)};
}

// sum_m P(m) |p(y|m) - p(y)| at one observation point.
double tv_integrand(const NodeLaw& law, std::span<const double> y) {
    const std::size_t nm = law.per_message.size();
    std::vector<double> lp(nm);
    for (std::size_t m = 0; m < nm; ++m) lp[m] = law.log_pdf(m, y);
    double lp_bar = num::log_sum_exp(lp) - std::log(static_cast<double>(nm));
    double p_bar = std::exp(lp_bar);
    double acc = 0.0;
    for (std::size_t m = 0; m < nm; ++m)
        acc += std::abs(std::exp(lp[m]) - p_bar) / static_cast<double>(nm);
    return acc;
}

double leakage_quadrature(const NodeLaw& law) {
    infoq::QuadratureSpec outer;
    outer.abs_tol = 1e-9;
    infoq::QuadratureSpec inner;
    inner.abs_tol = 1e-10;

    if (law.n == 1) {
        Axis ax = axis_for(law, 0, outer.truncation_sigmas);
        return infoq::integrate(
            [&](double y) {
                double yy[1] = {y};
                return tv_integrand(law, yy);
            },
            ax.lo, ax.hi, outer, ax.cuts);
    }
    Axis ax0 = axis_for(law, 0, outer.truncation_sigmas);
    Axis ax1 = axis_for(law, 1, outer.truncation_sigmas);
    return infoq::integrate(
        [&](double y0) {
            return infoq::integrate(
                [&](double y1) {
                    double yy[2] = {y0, y1};
                    return tv_integrand(law, yy);
                },
                ax1.lo, ax1.hi, inner, ax1.cuts);
        },
        ax0.lo, ax0.hi, outer, ax0.cuts);
}

void require_exact_budget(const ProtocolConfig& config) {
    if (config.code.n > 2) throw Error("exact leakage: n must be at most 2");
    double bits = 2.0 * static_cast<double>(config.code.k) *
                  std::log2(static_cast<double>(config.code.q));
    if (bits > 10.0) throw Error("exact leakage: q^(2k) exceeds the enumeration budget");
}

void require_node(int node) {
    if (node != 1 && node != 2) throw Error("leakage: node must be 1 or 2");
}

}  // namespace

LeakageEstimate leakage_exact(const ProtocolConfig& config, int node) {
    require_node(node);
    config.validate();
    require_exact_budget(config);
    if (config.shift_mode != ShiftMode::fixed)
        throw Error("exact leakage: fixed shifts required");

    LeakageEstimate est;
    est.method = LeakageMethod::exact_quadrature;
    est.node = node;
    if (config.split.kbar == config.split.k) return est;  // no message variable

    NodeLaw law = build_node_law(config, node, config.e1, config.e2);
    est.value = leakage_quadrature(law);
    return est;
}

LeakageEstimate leakage_exact_shift_averaged(const ProtocolConfig& config, int node) {
    require_node(node);
    config.validate();
    require_exact_budget(config);

    LeakageEstimate est;
    est.method = LeakageMethod::exact_quadrature;
    est.node = node;
    if (config.split.kbar == config.split.k) return est;

    const std::uint32_t q = config.code.q;
    const std::uint64_t shift_count = pow_u64(q, config.code.n);
    double acc = 0.0;
    for (std::uint64_t i1 = 0; i1 < shift_count; ++i1) {
        FieldVector e1 = codes::nth_vector(q, config.code.n, i1);
        for (std::uint64_t i2 = 0; i2 < shift_count; ++i2) {
            FieldVector e2 = codes::nth_vector(q, config.code.n, i2);
            acc += leakage_quadrature(build_node_law(config, node, e1, e2));
        }
    }
    est.value = acc / (static_cast<double>(shift_count) * static_cast<double>(shift_count));
    return est;
}

LeakageEstimate leakage_mc(const ProtocolConfig& config, int node, std::uint64_t samples,
                           std::uint64_t master_seed) {
    require_node(node);
    config.validate();
    if (samples < 2) throw Error("mc leakage: need at least two samples");
    double bits = 2.0 * static_cast<double>(config.code.k) *
                  std::log2(static_cast<double>(config.code.q));
    if (bits > 16.0) throw Error("mc leakage: q^(2k) exceeds the enumeration budget");
    if (config.shift_mode != ShiftMode::fixed)
        throw Error("mc leakage: fixed shifts required");

    LeakageEstimate est;
    est.method = LeakageMethod::monte_carlo;
    est.node = node;
    if (config.split.kbar == config.split.k) {
        est.std_error = 0.0;
        return est;
    }

    NodeLaw law = build_node_law(config, node, config.e1, config.e2);
    const std::size_t nm = law.per_message.size();
    const double log_nm = std::log(static_cast<double>(nm));

    std::mt19937_64 eng(rng::derive_seed(master_seed, 0x1ea4));
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> y(law.n), lp(nm);
    for (std::uint64_t s = 0; s < samples; ++s) {
        // Draw the conditioned message, then an observation from its law.
        std::size_t m = static_cast<std::size_t>(eng() % nm);
        const auto& comps = law.per_message[m];
        double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        std::size_t pick = 0;
        double cum = 0.0;
        for (std::size_t j = 0; j < comps.size(); ++j) {
            cum += comps[j].second;
            if (u < cum) {
                pick = j;
                break;
            }
            pick = j;
        }
        channel::GaussianSampler gauss(eng());
        double sd = std::sqrt(law.n0);
        for (std::size_t t = 0; t < law.n; ++t)
            y[t] = comps[pick].first[t] + sd * gauss.next();

        for (std::size_t mi = 0; mi < nm; ++mi) lp[mi] = law.log_pdf(mi, y);
        double lp_bar = num::log_sum_exp(lp) - log_nm;
        double stat = std::abs(1.0 - std::exp(lp_bar - lp[m]));
        sum += stat;
        sum_sq += stat * stat;
    }
    double mean = sum / static_cast<double>(samples);
    double var = std::max(0.0, sum_sq / static_cast<double>(samples) - mean * mean);
    est.value = mean;
    est.std_error = std::sqrt(var / static_cast<double>(samples));
    return est;
}

namespace {

nlohmann::json vec_json(const FieldVector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (std::size_t i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

}  // namespace

std::string trial_to_json(const TrialRecord& t) {
    nlohmann::json j;
    j["m1"] = vec_json(t.m1);
    j["m2"] = vec_json(t.m2);
    j["l1"] = vec_json(t.l1);
    j["l2"] = vec_json(t.l2);
    j["e1"] = vec_json(t.e1);
    j["e2"] = vec_json(t.e2);
    j["y"] = t.y;
    j["v_hat"] = vec_json(t.v_hat);
    j["relay_broadcast"] = vec_json(t.relay_broadcast);
    j["recovered_m2_at_node1"] = vec_json(t.recovered_m2_at_node1);
    j["recovered_m1_at_node2"] = vec_json(t.recovered_m1_at_node2);
    j["sum_decode_ok"] = t.sum_decode_ok;
    j["recovery_ok"] = t.recovery_ok;
    return j.dump();
}

}  // namespace scf::protocol
