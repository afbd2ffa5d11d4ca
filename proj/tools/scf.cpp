// Command-line front end: rate curves, finite-length leakage bounds, code
// analysis, protocol simulation, leakage oracles, and the verification grid.
//
// Exit codes: 0 success, 2 usage/configuration error, 3 numeric failure
// (quadrature non-convergence), 4 verification failure.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scf/bounds.hpp"
#include "scf/codes.hpp"
#include "scf/protocol.hpp"

namespace {

using scf::num::format10;

constexpr double kLn2 = 0.6931471805599453;

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(hi >= lo)) throw scf::Error("grid: h-max must be at least h-min");
    if (lo == hi) return {lo};
    if (!(step > 0.0)) throw scf::Error("grid: h-step must be positive");
    std::vector<double> g;
    for (double h = lo; h <= hi + 0.5 * step; h += step) g.push_back(std::min(h, hi));
    if (g.back() < hi - 1e-12) g.push_back(hi);
    return g;
}

// ---- flat key=value config files ----

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scf::Error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

std::string get_or(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

scf::galois::FieldVector parse_field_vector(const std::string& text, std::uint32_t q,
                                            std::size_t len, const std::string& what) {
    std::istringstream is(text);
    std::vector<std::uint32_t> vals;
    std::uint32_t v;
    while (is >> v) vals.push_back(v);
    if (vals.size() != len)
        throw scf::Error(what + ": expected " + std::to_string(len) + " entries");
    return scf::galois::FieldVector(q, std::move(vals));
}

scf::protocol::ProtocolConfig build_protocol_config(
    const std::map<std::string, std::string>& kv) {
    using namespace scf;

    std::uint32_t q = static_cast<std::uint32_t>(std::stoul(get_or(kv, "q", "2")));
    std::size_t n = std::stoul(get_or(kv, "n", "0"));
    std::size_t k = std::stoul(get_or(kv, "k", "0"));
    std::size_t kbar = std::stoul(get_or(kv, "kbar", "0"));

    protocol::ProtocolConfig cfg;
    std::string constellation = get_or(kv, "constellation", "bpsk");
    if (constellation != "bpsk")
        throw Error("config: unsupported constellation: " + constellation);
    cfg.channel.constellation = channel::Constellation::bpsk();
    cfg.channel.h1 = std::stod(get_or(kv, "h1", get_or(kv, "h", "1")));
    cfg.channel.h2 = std::stod(get_or(kv, "h2", get_or(kv, "h", "1")));
    cfg.channel.n0 = std::stod(get_or(kv, "n0", "1"));

    std::string code_kind = get_or(kv, "code", "toeplitz");
    if (code_kind == "file") {
        cfg.code = codes::GeneratorCode::create(
            galois::load_matrix_file(get_or(kv, "code_file", "")));
    } else if (code_kind == "parity") {
        cfg.code = codes::generator_from_parity(
            codes::load_alist_file(get_or(kv, "parity_file", "")));
    } else {
        codes::EnsembleSpec spec;
        spec.kind = code_kind == "uniform" ? codes::EnsembleKind::uniform
                                           : codes::EnsembleKind::toeplitz;
        if (code_kind != "uniform" && code_kind != "toeplitz")
            throw Error("config: unknown code kind: " + code_kind);
        spec.n = n;
        spec.k = k;
        spec.q = q;
        spec.seed = std::stoull(get_or(kv, "code_seed", "1"));
        cfg.code = codes::sample_code(spec);
    }
    cfg.split = codes::make_hash_split(cfg.code.k, kbar, cfg.code.q);

    std::string decoder = get_or(kv, "decoder", "ml");
    if (decoder == "ml")
        cfg.decoder = protocol::DecoderKind::ml;
    else if (decoder == "bp")
        cfg.decoder = protocol::DecoderKind::bp;
    else
        throw Error("config: unknown decoder: " + decoder);
    cfg.bp_iterations = static_cast<int>(std::stol(get_or(kv, "bp_iters", "50")));
    if (kv.count("parity_file"))
        cfg.parity_check = codes::load_alist_file(kv.at("parity_file"));

    std::string shift_mode = get_or(kv, "shift_mode", "random");
    if (shift_mode == "random")
        cfg.shift_mode = protocol::ShiftMode::random_per_trial;
    else if (shift_mode == "fixed")
        cfg.shift_mode = protocol::ShiftMode::fixed;
    else
        throw Error("config: unknown shift mode: " + shift_mode);
    if (cfg.shift_mode == protocol::ShiftMode::fixed) {
        cfg.e1 = kv.count("e1")
                     ? parse_field_vector(kv.at("e1"), cfg.code.q, cfg.code.n, "e1")
                     : galois::FieldVector(cfg.code.q, cfg.code.n);
        cfg.e2 = kv.count("e2")
                     ? parse_field_vector(kv.at("e2"), cfg.code.q, cfg.code.n, "e2")
                     : galois::FieldVector(cfg.code.q, cfg.code.n);
    }

    std::string broadcast = get_or(kv, "broadcast", "hashed");
    if (broadcast == "hashed")
        cfg.broadcast = protocol::BroadcastMode::hashed;
    else if (broadcast == "raw")
        cfg.broadcast = protocol::BroadcastMode::raw;
    else
        throw Error("config: unknown broadcast mode: " + broadcast);

    auto violations = cfg.violations();
    if (!violations.empty()) {
        std::string msg = "config violates protocol invariants:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw Error(msg);
    }
    return cfg;
}

// ---- subcommands ----

struct RatesArgs {
    double n0 = 1.0;
    double h_min = 0.0, h_max = 4.0, h_step = 0.01;
    std::string delta_i_path;
    std::string out_path;
    bool bits = false;
};

int cmd_rates(const RatesArgs& a) {
    using namespace scf;
    if (!(a.n0 > 0.0)) throw Error("rates: --n0 must be positive");
    infoq::QuadratureSpec spec;
    std::vector<double> grid = make_grid(a.h_min, a.h_max, a.h_step);
    auto rows = bounds::bpsk_rate_curves(grid, a.n0, spec);

    std::optional<bounds::DeltaITable> delta;
    std::vector<bounds::AdjustedRateRow> adjusted;
    if (!a.delta_i_path.empty()) {
        delta = bounds::DeltaITable::load_file(a.delta_i_path);
        adjusted = bounds::ldpc_adjusted_rates(*delta, grid, a.n0, spec);
    }

    const double unit = a.bits ? kLn2 : 1.0;
    const char* suffix = a.bits ? "bits" : "nats";
    std::ostringstream csv;
    csv << "h,rate_h13_" << suffix << ",rate_h17_" << suffix << ",i_h_" << suffix;
    if (delta) csv << ",rate_h14_" << suffix << ",rate_h18_" << suffix;
    csv << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv << format10(rows[i].h) << ',' << format10(rows[i].rate_h13 / unit) << ','
            << format10(rows[i].rate_h17 / unit) << ',' << format10(rows[i].i_h / unit);
        if (delta)
            csv << ',' << format10(adjusted[i].rate_h14 / unit) << ','
                << format10(adjusted[i].rate_h18 / unit);
        csv << '\n';
    }
    if (a.out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(a.out_path);
        if (!out) throw Error("cannot open output file: " + a.out_path);
        out << csv.str();
    }

    // Zero crossings (positive-rate thresholds) go to stderr so the CSV
    // stays machine-readable.
    if (a.h_max > a.h_min) {
        auto report = [&](const char* name, const std::function<double(double)>& f) {
            auto zeros = bounds::find_zero_crossings(f, a.h_min, a.h_max,
                                                     std::min(a.h_step, 0.05));
            for (double z : zeros)
                std::cerr << "zero of " << name << " at h = " << format10(z) << '\n';
            if (!zeros.empty() && f(0.5 * (a.h_min + zeros.back())) < 0.0)
                std::cerr << name << " < 0 below h = " << format10(zeros.back())
                          << ": secure transmission of the message sum is impossible there\n";
        };
        report("rate_h13", [&](double h) { return bounds::rate_h13(h, a.n0, spec); });
        report("rate_h17", [&](double h) { return bounds::rate_h17(h, a.n0, spec); });
    }
    return 0;
}

struct BoundArgs {
    std::size_t n = 0, k = 0, kbar = 0;
    std::uint32_t q = 2;
    double h = 1.0, n0 = 1.0;
    std::optional<double> A;
    std::string code_path;
};

int cmd_bound(const BoundArgs& a) {
    using namespace scf;
    bounds::CodeRateParams params{a.n, a.k, a.kbar, a.q};
    params.validate();
    channel::MacChannelParams ch{a.h, a.h, a.n0, channel::Constellation::bpsk()};
    if (ch.constellation.q != a.q)
        throw Error("bound: only q = 2 has a built-in constellation");

    std::optional<double> A = a.A;
    if (!a.code_path.empty()) {
        auto code = codes::GeneratorCode::create(galois::load_matrix_file(a.code_path));
        if (code.n != a.n || code.k != a.k || code.q != a.q)
            throw Error("bound: code file dimensions disagree with --n/--k/--q");
        double bits = static_cast<double>(code.k) * std::log2(static_cast<double>(code.q));
        if (bits > 20.0)
            throw Error("bound: deviation of this code is infeasible to enumerate "
                        "(q^k too large); pass --A instead");
        A = codes::deviation_A(code).a;
    }

    infoq::QuadratureSpec spec;
    auto rep = bounds::optimize_bound(A ? bounds::BoundKind::b2 : bounds::BoundKind::b1,
                                      params, A, ch, spec);

    std::cout << "{\"n\": " << a.n << ", \"k\": " << a.k << ", \"kbar\": " << a.kbar
              << ", \"q\": " << a.q << ", \"s_star\": " << format10(rep.s_star)
              << ", \"b1\": " << format10(rep.b1)
              << ", \"log2_b1\": " << format10(rep.log_b1 / kLn2);
    if (rep.b2)
        std::cout << ", \"b2\": " << format10(*rep.b2)
                  << ", \"log2_b2\": " << format10(*rep.log_b2 / kLn2)
                  << ", \"A\": " << format10(*rep.a_used);
    std::cout << "}\n";
    return 0;
}

struct SimulateArgs {
    std::string config_path;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    std::string jsonl_path;
    std::vector<std::string> overrides;
};

int cmd_simulate(const SimulateArgs& a) {
    using namespace scf;
    auto kv = parse_config_file(a.config_path);
    for (const auto& ov : a.overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw Error("--set expects key=value");
        kv[ov.substr(0, eq)] = ov.substr(eq + 1);
    }
    auto cfg = build_protocol_config(kv);

    if (!a.jsonl_path.empty()) {
        std::ofstream out(a.jsonl_path);
        if (!out) throw Error("cannot open trial log: " + a.jsonl_path);
        for (std::uint64_t i = 0; i < a.trials; ++i)
            out << protocol::trial_to_json(
                       protocol::run_trial(cfg, rng::derive_seed(a.seed, i)))
                << '\n';
    }
    auto rep = protocol::error_rate(cfg, a.trials, a.seed);
    std::cout << "{\"trials\": " << rep.trials << ", \"seed\": " << a.seed
              << ", \"p_sum_err\": " << format10(rep.p_sum_err)
              << ", \"p_recovery_err\": " << format10(rep.p_recovery_err)
              << ", \"wilson_halfwidth\": " << format10(rep.wilson_halfwidth) << "}\n";
    return 0;
}

struct LeakageArgs {
    std::string config_path;
    int node = 1;
    std::string method = "exact";
    std::uint64_t samples = 20000;
    std::uint64_t seed = 1;
    bool shift_average = false;
    std::vector<std::string> overrides;
};

int cmd_leakage(const LeakageArgs& a) {
    using namespace scf;
    auto kv = parse_config_file(a.config_path);
    for (const auto& ov : a.overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw Error("--set expects key=value");
        kv[ov.substr(0, eq)] = ov.substr(eq + 1);
    }
    auto cfg = build_protocol_config(kv);

    protocol::LeakageEstimate est;
    if (a.method == "exact") {
        est = a.shift_average ? protocol::leakage_exact_shift_averaged(cfg, a.node)
                              : protocol::leakage_exact(cfg, a.node);
    } else if (a.method == "mc") {
        if (a.shift_average) throw Error("leakage: --shift-average is exact-only");
        est = protocol::leakage_mc(cfg, a.node, a.samples, a.seed);
    } else {
        throw Error("leakage: --method must be exact or mc");
    }
    std::cout << "{\"node\": " << est.node << ", \"method\": \""
              << (est.method == protocol::LeakageMethod::exact_quadrature
                      ? "exact-quadrature"
                      : "monte-carlo")
              << "\", \"value\": " << format10(est.value);
    if (est.std_error) std::cout << ", \"std_error\": " << format10(*est.std_error);
    if (a.method == "mc") std::cout << ", \"samples\": " << a.samples;
    std::cout << "}\n";
    return 0;
}

struct VerifyArgs {
    std::string grid = "full";
    bool inject_fault = false;
};

int cmd_verify(const VerifyArgs& a) {
    using namespace scf;
    bounds::VerifyGrid grid;
    if (a.grid == "full")
        grid = bounds::VerifyGrid::full();
    else if (a.grid == "small")
        grid = bounds::VerifyGrid::small();
    else
        throw Error("verify: --grid must be full or small");

    auto rep = bounds::verify_inequalities(grid, a.inject_fault);
    for (const auto& c : rep.checks) {
        std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name
                  << "  worst_margin = " << format10(c.margin);
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ')';
        std::cout << '\n';
    }
    if (!rep.all_pass()) {
        std::cout << "verification FAILED\n";
        return 4;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure computation-and-forward over the two-user Gaussian MAC: "
                 "rate curves, finite-length leakage bounds, code analysis, protocol "
                 "simulation, and leakage oracles"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    RatesArgs rates;
    auto* c_rates = app.add_subcommand(
        "rates", "emit the achievable-rate curves over an h grid as CSV");
    c_rates->add_option("--n0", rates.n0, "noise variance")->capture_default_str();
    c_rates->add_option("--h-min", rates.h_min, "grid start")->capture_default_str();
    c_rates->add_option("--h-max", rates.h_max, "grid end")->capture_default_str();
    c_rates->add_option("--h-step", rates.h_step, "grid step")->capture_default_str();
    c_rates->add_option("--delta-i", rates.delta_i_path,
                        "rate-penalty CSV for a practical code family");
    c_rates->add_option("--out", rates.out_path, "write CSV here instead of stdout");
    c_rates->add_flag("--bits", rates.bits, "display rates in bits instead of nats");

    BoundArgs bound;
    auto* c_bound = app.add_subcommand(
        "bound", "optimise the finite-length leakage bounds for one configuration");
    c_bound->add_option("--n", bound.n, "block length")->required();
    c_bound->add_option("--k", bound.k, "code dimension")->required();
    c_bound->add_option("--kbar", bound.kbar, "sacrificed dimensions")->required();
    c_bound->add_option("--q", bound.q, "field size")->capture_default_str();
    c_bound->add_option("--h", bound.h, "channel gain (h1 = h2 = h)")->capture_default_str();
    c_bound->add_option("--n0", bound.n0, "noise variance")->capture_default_str();
    auto* opt_a = c_bound->add_option("--A", bound.A, "code deviation value");
    c_bound
        ->add_option("--code", bound.code_path,
                     "generator matrix file; its deviation is computed")
        ->excludes(opt_a);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo protocol simulation");
    c_sim->add_option("--config", sim.config_path, "key=value config file")->required();
    c_sim->add_option("--trials", sim.trials, "number of trials")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "master seed")->capture_default_str();
    c_sim->add_option("--jsonl", sim.jsonl_path, "write one trial record per line here");
    c_sim->add_option("--set", sim.overrides, "override a config key (key=value)");

    LeakageArgs leak;
    auto* c_leak = app.add_subcommand("leakage", "leakage oracles at small block lengths");
    c_leak->add_option("--config", leak.config_path, "key=value config file")->required();
    c_leak->add_option("--node", leak.node, "message under test (1 or 2)")
        ->capture_default_str();
    c_leak->add_option("--method", leak.method, "exact or mc")->capture_default_str();
    c_leak->add_option("--samples", leak.samples, "Monte Carlo sample count")
        ->capture_default_str();
    c_leak->add_option("--seed", leak.seed, "master seed")->capture_default_str();
    c_leak->add_flag("--shift-average", leak.shift_average,
                     "average the exact oracle over all shift pairs");
    c_leak->add_option("--set", leak.overrides, "override a config key (key=value)");

    VerifyArgs verify;
    auto* c_verify = app.add_subcommand("verify", "run the inequality verification grid");
    c_verify->add_option("--grid", verify.grid, "full or small")->capture_default_str();
    c_verify->add_flag("--inject-fault", verify.inject_fault, "harness self-test")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_rates->parsed()) return cmd_rates(rates);
        if (c_bound->parsed()) return cmd_bound(bound);
        if (c_sim->parsed()) return cmd_simulate(sim);
        if (c_leak->parsed()) return cmd_leakage(leak);
        if (c_verify->parsed()) return cmd_verify(verify);
    } catch (const scf::QuadratureError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
