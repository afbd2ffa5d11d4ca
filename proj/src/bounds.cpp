#include "scf/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace scf::bounds {

namespace {

constexpr double kOverflowLog = 700.0;

double safe_exp(double logv, bool* overflowed) {
    if (logv > kOverflowLog) {
        if (overflowed) *overflowed = true;
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(logv);
}

void require_s(double s) {
    if (!(s >= 0.0 && s <= 0.5)) throw Error("bound: s must lie in [0, 1/2]");
}

}  // namespace

void CodeRateParams::validate() const {
    if (!galois::is_prime(q)) throw Error("rate params: q must be prime");
    if (kbar > k || k > n || n == 0) throw Error("rate params: need kbar <= k <= n, n > 0");
}

double CodeRateParams::r0() const {
    return static_cast<double>(k) / static_cast<double>(n) * std::log(static_cast<double>(q));
}

double CodeRateParams::r1() const {
    return static_cast<double>(kbar) / static_cast<double>(n) *
           std::log(static_cast<double>(q));
}

double log_bound_b1(const CodeRateParams& p, double s, double renyi_x1) {
    p.validate();
    require_s(s);
    double logq = std::log(static_cast<double>(p.q));
    double exponent = static_cast<double>(p.n) - static_cast<double>(p.k) -
                      static_cast<double>(p.kbar);
    return std::log(3.0) + s * exponent * logq + s * static_cast<double>(p.n) * renyi_x1;
}

double bound_b1(const CodeRateParams& p, double s, double renyi_x1) {
    double logv = log_bound_b1(p, s, renyi_x1);
    if (logv > kOverflowLog) return std::numeric_limits<double>::infinity();
    return 3.0 * std::exp(logv - std::log(3.0));  // exact 3 at s = 0
}

double log_bound_b2_logA(const CodeRateParams& p, double s, double log_A, double renyi_x1,
                         double renyi_x1x2) {
    p.validate();
    require_s(s);
    if (s == 0.0) return std::log(6.0);  // s * log A is 0 even for A = 0
    double logq = std::log(static_cast<double>(p.q));
    double n = static_cast<double>(p.n);
    double term_pair = std::log(3.0) -
                       s * (static_cast<double>(p.k) + static_cast<double>(p.kbar)) * logq +
                       s * n * renyi_x1x2;
    double term_single = std::log(3.0) + s * log_A -
                         s * static_cast<double>(p.kbar) * logq + s * n * renyi_x1;
    return num::log_sum_exp(term_pair, term_single);
}

double bound_b2(const CodeRateParams& p, double s, double A, double renyi_x1,
                double renyi_x1x2) {
    p.validate();
    require_s(s);
    if (A < 0.0) throw Error("bound: deviation A must be nonnegative");
    if (s == 0.0) return 6.0;
    double logq = std::log(static_cast<double>(p.q));
    double n = static_cast<double>(p.n);
    double e_pair = -s * (static_cast<double>(p.k) + static_cast<double>(p.kbar)) * logq +
                    s * n * renyi_x1x2;
    double e_single = s * (A == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(A)) -
                      s * static_cast<double>(p.kbar) * logq + s * n * renyi_x1;
    if (e_pair > kOverflowLog || e_single > kOverflowLog)
        return std::numeric_limits<double>::infinity();
    return 3.0 * std::exp(e_pair) + 3.0 * std::exp(e_single);  // exact 6 at s = 0
}

namespace {

// Renyi values memoised per exact s so the optimiser's repeated visits are
// bit-stable.
class RenyiCache {
  public:
    RenyiCache(const channel::MacChannelParams& ch, const infoq::QuadratureSpec& spec)
        : ch_(ch), spec_(spec) {}

    double x1(double s) { return get(s).first; }
    double x1x2(double s) { return get(s).second; }

  private:
    const std::pair<double, double>& get(double s) {
        auto it = memo_.find(s);
        if (it == memo_.end())
            it = memo_
                     .emplace(s, std::pair<double, double>{
                                     infoq::renyi_down(ch_, s, infoq::Marginal::X1, spec_),
                                     infoq::renyi_down(ch_, s, infoq::Marginal::X1X2, spec_)})
                     .first;
        return it->second;
    }

    channel::MacChannelParams ch_;
    infoq::QuadratureSpec spec_;
    std::map<double, std::pair<double, double>> memo_;
};

// Grid scan + golden-section refinement of a smooth objective on [0, 1/2].
template <typename F>
std::pair<double, double> minimize_on_s(F&& objective) {
    constexpr int kGrid = 64;
    double best_s = 0.0, best_v = std::numeric_limits<double>::infinity();
    int best_i = 0;
    std::vector<double> grid(kGrid), vals(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        grid[i] = 0.5 * static_cast<double>(i) / (kGrid - 1);
        vals[i] = objective(grid[i]);
        if (vals[i] < best_v) {
            best_v = vals[i];
            best_s = grid[i];
            best_i = i;
        }
    }
    double lo = grid[std::max(0, best_i - 1)];
    double hi = grid[std::min(kGrid - 1, best_i + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-4) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = objective(d);
        }
    }
    double mid = 0.5 * (a + b);
    double fm = objective(mid);
    if (fm < best_v) {
        best_v = fm;
        best_s = mid;
    }
    return {best_s, best_v};
}

}  // namespace

LeakageBoundReport optimize_bound(BoundKind kind, const CodeRateParams& p,
                                  std::optional<double> A,
                                  const channel::MacChannelParams& channel,
                                  const infoq::QuadratureSpec& spec) {
    p.validate();
    channel.validate();
    if (kind == BoundKind::b2 && !A)
        throw Error("bound: the second bound needs a deviation value A");

    RenyiCache cache(channel, spec);
    auto log_b1_at = [&](double s) {
        return s == 0.0 ? std::log(3.0) : log_bound_b1(p, s, cache.x1(s));
    };

    LeakageBoundReport rep;
    auto [s1, v1] = minimize_on_s(log_b1_at);
    rep.s_star = s1;
    rep.log_b1 = v1;
    rep.b1 = safe_exp(v1, &rep.b1_overflowed);

    if (kind == BoundKind::b2 || A) {
        double a_val = *A;
        if (a_val < 0.0) throw Error("bound: deviation A must be nonnegative");
        double log_A = a_val == 0.0 ? -std::numeric_limits<double>::infinity()
                                    : std::log(a_val);
        auto log_b2_at = [&](double s) {
            return s == 0.0 ? std::log(6.0)
                            : log_bound_b2_logA(p, s, log_A, cache.x1(s), cache.x1x2(s));
        };
        auto [s2, v2] = minimize_on_s(log_b2_at);
        rep.log_b2 = v2;
        rep.b2 = safe_exp(v2, &rep.b2_overflowed);
        rep.a_used = a_val;
        if (kind == BoundKind::b2) rep.s_star = s2;
    }
    return rep;
}

ExponentReport exponents(const CodeRateParams& p, const channel::MacChannelParams& channel,
                         double r2, const infoq::QuadratureSpec& spec) {
    p.validate();
    channel.validate();
    RenyiCache cache(channel, spec);
    double logq = std::log(static_cast<double>(p.q));
    double r0 = p.r0(), r1 = p.r1();

    auto neg_obj1 = [&](double s) {
        if (s == 0.0) return 0.0;
        return -(s * (r1 + r0 - logq - cache.x1(s)));
    };
    auto neg_obj2 = [&](double s) {
        if (s == 0.0) return 0.0;
        return -std::min(s * (r0 + r1 - cache.x1x2(s)), s * (r1 - r2 - cache.x1(s)));
    };
    ExponentReport rep;
    rep.e1 = -minimize_on_s(neg_obj1).second;
    rep.e2 = -minimize_on_s(neg_obj2).second;
    return rep;
}

RateReport rate_report(const channel::MacChannelParams& channel, double r0, double r2,
                       const infoq::QuadratureSpec& spec) {
    if (r0 < 0.0) throw Error("rate: r0 must be nonnegative");
    infoq::InfoReport info = infoq::mutual_infos(channel, spec);
    double logq = std::log(static_cast<double>(channel.constellation.q));
    RateReport r;
    r.r0 = r0;
    r.r2_used = r2;
    r.rate1 = 2.0 * r0 - logq - info.i_y_x1;
    r.rate2 = std::min(2.0 * r0 - info.i_y_x1x2, r0 - r2 - info.i_y_x1);
    r.rate3 = std::min(2.0 * r0 - info.i_y_x1x2, r0 - info.i_y_x1);
    return r;
}

namespace {

// Mean-centred mixtures for the closed-form curves: the three-level sum law
// {0, h, 2h} with weights 1/4, 1/2, 1/4, its aligned two-level part, and the
// plain noise entropy.
double entropy4(double h, double n0, const infoq::QuadratureSpec& spec) {
    return infoq::mixture_entropy(
        infoq::merge_components({0.25, 0.5, 0.25}, {-h, 0.0, h}, n0), spec);
}

double entropy2(double h, double n0, const infoq::QuadratureSpec& spec) {
    return infoq::mixture_entropy(infoq::merge_components({0.5, 0.5}, {-h, h}, n0), spec);
}

double entropy_noise(double n0) {
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * n0);
}

}  // namespace

double rate_h13(double h, double n0, const infoq::QuadratureSpec& spec) {
    return entropy4(h, n0, spec) - entropy2(h, n0, spec);
}

double rate_h17(double h, double n0, const infoq::QuadratureSpec& spec) {
    return entropy4(h, n0, spec) - entropy_noise(n0) - std::numbers::ln2;
}

double i_of_h(double h, double n0, const infoq::QuadratureSpec& spec) {
    return entropy4(h, n0, spec) - 0.5 * entropy2(h, n0, spec) - 0.5 * entropy_noise(n0);
}

std::vector<RateCurveRow> bpsk_rate_curves(std::span<const double> h_grid, double n0,
                                           const infoq::QuadratureSpec& spec) {
    if (!(n0 > 0.0)) throw Error("rate curves: N0 must be positive");
    std::vector<RateCurveRow> rows;
    rows.reserve(h_grid.size());
    for (double h : h_grid) {
        RateCurveRow r;
        r.h = h;
        double h4 = entropy4(h, n0, spec);
        double h2 = entropy2(h, n0, spec);
        double hn = entropy_noise(n0);
        r.rate_h13 = h4 - h2;
        r.rate_h17 = h4 - hn - std::numbers::ln2;
        r.i_h = h4 - 0.5 * h2 - 0.5 * hn;
        rows.push_back(r);
    }
    return rows;
}

std::vector<double> find_zero_crossings(const std::function<double(double)>& f, double lo,
                                        double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw Error("zero scan: bad grid");
    std::vector<double> zeros;
    double prev_x = lo, prev_v = f(lo);
    for (double x = lo + step; x <= hi + 0.5 * step; x += step) {
        double cx = std::min(x, hi);
        double v = f(cx);
        if (prev_v == 0.0) zeros.push_back(prev_x);
        if (prev_v * v < 0.0) {
            double a = prev_x, b = cx, fa = prev_v;
            while (b - a > 1e-6) {
                double m = 0.5 * (a + b);
                double fm = f(m);
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            zeros.push_back(0.5 * (a + b));
        }
        prev_x = cx;
        prev_v = v;
        if (cx >= hi) break;
    }
    return zeros;
}

DeltaITable DeltaITable::parse(std::istream& in) {
    DeltaITable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("family:");
            if (pos != std::string::npos) {
                std::string fam = line.substr(pos + 7);
                std::size_t b = fam.find_first_not_of(" \t");
                t.family = b == std::string::npos ? "" : fam.substr(b);
            }
            continue;
        }
        if (!header_seen) {
            std::string squashed;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) squashed += c;
            if (squashed != "h,delta_i_nats")
                throw Error("delta-i table: expected header `h,delta_i_nats`");
            header_seen = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        Row r;
        if (!(ls >> r.h >> r.delta_i)) throw Error("delta-i table: bad row: " + line);
        if (r.delta_i < 0.0) throw Error("delta-i table: negative entry");
        if (!t.rows.empty() && r.h <= t.rows.back().h)
            throw Error("delta-i table: h must be strictly increasing");
        t.rows.push_back(r);
    }
    if (t.rows.empty()) throw Error("delta-i table: no data rows");
    return t;
}

DeltaITable DeltaITable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open delta-i file: " + path);
    return parse(in);
}

double DeltaITable::interpolate(double h) const {
    if (rows.empty()) throw Error("delta-i table: empty");
    if (h < rows.front().h || h > rows.back().h)
        throw Error("delta-i table: h outside the tabulated range");
    auto it = std::lower_bound(rows.begin(), rows.end(), h,
                               [](const Row& r, double v) { return r.h < v; });
    if (it->h == h) return it->delta_i;
    const Row& hi = *it;
    const Row& lo = *(it - 1);
    double w = (h - lo.h) / (hi.h - lo.h);
    return lo.delta_i + w * (hi.delta_i - lo.delta_i);
}

std::vector<AdjustedRateRow> ldpc_adjusted_rates(const DeltaITable& table,
                                                 std::span<const double> h_grid, double n0,
                                                 const infoq::QuadratureSpec& spec) {
    std::vector<AdjustedRateRow> rows;
    rows.reserve(h_grid.size());
    for (double h : h_grid) {
        double di = table.interpolate(h);
        AdjustedRateRow r;
        r.h = h;
        r.rate_h14 = rate_h13(h, n0, spec) - 2.0 * di;
        r.rate_h18 = rate_h17(h, n0, spec) - 2.0 * di;
        rows.push_back(r);
    }
    return rows;
}

VerifyGrid VerifyGrid::full() { return VerifyGrid{}; }

VerifyGrid VerifyGrid::small() {
    VerifyGrid g;
    g.ns = {8, 16};
    g.k_fractions = {0.5};
    g.ss = {0.1, 0.5};
    g.hs = {1.0, 4.0};
    return g;
}

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.pass; });
}

VerificationReport verify_inequalities(const VerifyGrid& grid, bool inject_fault) {
    infoq::QuadratureSpec spec;
    const double logq = std::log(static_cast<double>(grid.q));
    const double rel_tol = 1e-9;

    // Renyi values per (h, s), shared by the first two checks.
    std::map<std::pair<double, double>, std::pair<double, double>> renyi;
    for (double h : grid.hs)
        for (double s : grid.ss) {
            channel::MacChannelParams ch{h, h, grid.n0, channel::Constellation::bpsk()};
            renyi[{h, s}] = {infoq::renyi_down(ch, s, infoq::Marginal::X1, spec),
                             infoq::renyi_down(ch, s, infoq::Marginal::X1X2, spec)};
        }

    VerificationReport rep;

    {  // Bound comparison: B2 at the extreme deviation never exceeds 2 B1.
        VerificationReport::Check c;
        c.name = "b2_le_twice_b1";
        c.pass = true;
        c.margin = std::numeric_limits<double>::infinity();
        for (std::size_t n : grid.ns)
            for (double kf : grid.k_fractions) {
                std::size_t k = static_cast<std::size_t>(
                    std::llround(kf * static_cast<double>(n)));
                for (std::size_t kbar : {std::size_t{0}, k / 2, k})
                    for (double s : grid.ss)
                        for (double h : grid.hs) {
                            CodeRateParams p{n, k, kbar, grid.q};
                            auto [rx1, rx12] = renyi[{h, s}];
                            double log_A = static_cast<double>(n - k) * logq;
                            if (inject_fault) log_A *= 2.0;
                            double lb1 = log_bound_b1(p, s, rx1);
                            double lb2 = log_bound_b2_logA(p, s, log_A, rx1, rx12);
                            double slack = std::numbers::ln2 + lb1 - lb2;
                            c.margin = std::min(c.margin, slack);
                            if (slack < -rel_tol * std::max(1.0, std::abs(lb2))) {
                                c.pass = false;
                                c.detail = "violated at n=" + std::to_string(n) +
                                           " k=" + std::to_string(k) +
                                           " kbar=" + std::to_string(kbar) +
                                           " s=" + num::format10(s) +
                                           " h=" + num::format10(h);
                            }
                        }
            }
        rep.checks.push_back(std::move(c));
    }

    {  // Pair-versus-single marginal Renyi inequality, per letter.
        VerificationReport::Check c;
        c.name = "renyi_pair_le_q_single";
        c.pass = true;
        c.margin = std::numeric_limits<double>::infinity();
        for (double h : grid.hs)
            for (double s : grid.ss) {
                auto [rx1, rx12] = renyi[{h, s}];
                double slack = s * logq + s * rx1 - s * rx12;
                c.margin = std::min(c.margin, slack);
                if (slack < -rel_tol * std::max(1.0, s * rx12)) {
                    c.pass = false;
                    c.detail = "violated at h=" + num::format10(h) +
                               " s=" + num::format10(s);
                }
            }
        rep.checks.push_back(std::move(c));
    }

    {  // Rate identity: at r0 = I(Y;X1+X2) the binding branch is the pair term.
        VerificationReport::Check c;
        c.name = "sum_rate_identity";
        c.pass = true;
        c.margin = std::numeric_limits<double>::infinity();
        const double abs_tol = 1e-6;
        for (double h : grid.hs) {
            channel::MacChannelParams ch{h, h, grid.n0, channel::Constellation::bpsk()};
            infoq::InfoReport info = infoq::mutual_infos(ch, spec);
            double lhs = std::min(2.0 * info.i_y_sum - info.i_y_x1x2,
                                  info.i_y_sum - info.i_y_x1);
            double rhs = 2.0 * info.i_y_sum - info.i_y_x1x2;
            double slack = abs_tol - std::abs(lhs - rhs);
            c.margin = std::min(c.margin, slack);
            if (slack < 0.0) {
                c.pass = false;
                c.detail = "violated at h=" + num::format10(h);
            }
        }
        rep.checks.push_back(std::move(c));
    }

    return rep;
}

}  // namespace scf::bounds
