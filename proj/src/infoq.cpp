#include "scf/infoq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace scf::infoq {

void GaussianMixture::validate() const {
    if (weights.size() != means.size() || weights.empty())
        throw Error("mixture: weights and means must align and be nonempty");
    if (!(n0 > 0.0)) throw Error("mixture: variance must be positive");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw Error("mixture: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("mixture: weights must sum to 1");
}

double GaussianMixture::log_pdf(double y) const {
    double m = -std::numeric_limits<double>::infinity();
    thread_local std::vector<double> logs;
    logs.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        logs[i] = weights[i] > 0.0
                      ? std::log(weights[i]) + channel::log_gaussian_density(y, means[i], n0)
                      : -std::numeric_limits<double>::infinity();
        m = std::max(m, logs[i]);
    }
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - m);
    return m + std::log(acc);
}

double GaussianMixture::pdf(double y) const { return std::exp(log_pdf(y)); }

GaussianMixture merge_components(std::vector<double> weights, std::vector<double> means,
                                 double n0) {
    std::map<double, double> acc;
    for (std::size_t i = 0; i < weights.size(); ++i) acc[means[i]] += weights[i];
    GaussianMixture m;
    m.n0 = n0;
    for (const auto& [mean, w] : acc) {
        m.means.push_back(mean);
        m.weights.push_back(w);
    }
    m.validate();
    return m;
}

void QuadratureSpec::validate() const {
    if (truncation_sigmas < 6.0) throw Error("quadrature: truncation below 6 sigma");
    if (!(abs_tol > 0.0)) throw Error("quadrature: tolerance must be positive");
    if (max_subdivisions < 4) throw Error("quadrature: subdivision budget too small");
}

namespace {

struct Simpson {
    const std::function<double(double)>& f;
    int max_depth;

    double run(double a, double fa, double b, double fb, double tol, int depth,
               double whole, double fm) const {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = f(lm), frm = f(rm);
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        if (depth >= max_depth) {
            if (std::abs(delta) > 15.0 * tol)
                throw QuadratureError("adaptive quadrature failed to converge");
            return left + right + delta / 15.0;
        }
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        return run(a, fa, m, fm, 0.5 * tol, depth + 1, left, flm) +
               run(m, fm, b, fb, 0.5 * tol, depth + 1, right, frm);
    }

    double interval(double a, double b, double tol) const {
        double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
        double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return run(a, fa, b, fb, tol, 0, whole, fm);
    }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, std::span<const double> breakpoints) {
    spec.validate();
    if (!(a < b)) throw Error("quadrature: empty interval");

    std::vector<double> cuts{a, b};
    for (double c : breakpoints)
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Simpson s{f, spec.max_subdivisions};
    double tol_per = spec.abs_tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += s.interval(cuts[i], cuts[i + 1], tol_per);
    return total;
}

namespace {

// Window and per-mean split points for mixture integrands.
struct Window {
    double lo, hi;
    std::vector<double> cuts;
};

Window window_for(std::span<const double> means, double n0, const QuadratureSpec& spec) {
    double sd = std::sqrt(n0);
    double lo = *std::min_element(means.begin(), means.end()) - spec.truncation_sigmas * sd;
    double hi = *std::max_element(means.begin(), means.end()) + spec.truncation_sigmas * sd;
    Window w{lo, hi, {}};
    for (double m : means) {
        w.cuts.push_back(m);
        w.cuts.push_back(m - 3.0 * sd);
        w.cuts.push_back(m + 3.0 * sd);
    }
    return w;
}

double entropy_integrand(const GaussianMixture& m, double y) {
    double lp = m.log_pdf(y);
    if (lp < -700.0) return 0.0;
    double p = std::exp(lp);
    return -p * lp;
}

}  // namespace

double mixture_entropy(const GaussianMixture& m, const QuadratureSpec& spec) {
    m.validate();
    Window w = window_for(m.means, m.n0, spec);
    return integrate([&m](double y) { return entropy_integrand(m, y); }, w.lo, w.hi, spec,
                     w.cuts);
}

InfoReport mutual_infos(const channel::MacChannelParams& params, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    const std::uint32_t q = params.constellation.q;
    const double qd = static_cast<double>(q);
    const double h_noise = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * params.n0);

    std::vector<double> all_means, all_weights;
    for (std::uint32_t a = 0; a < q; ++a)
        for (std::uint32_t b = 0; b < q; ++b) {
            all_means.push_back(params.mean(a, b));
            all_weights.push_back(1.0 / (qd * qd));
        }
    GaussianMixture marginal = merge_components(all_weights, all_means, params.n0);
    double h_y = mixture_entropy(marginal, spec);

    // H(Y | X1): average over x1 of the entropy of the x2-mixture.
    double h_y_x1 = 0.0;
    for (std::uint32_t a = 0; a < q; ++a) {
        std::vector<double> means, weights;
        for (std::uint32_t b = 0; b < q; ++b) {
            means.push_back(params.mean(a, b));
            weights.push_back(1.0 / qd);
        }
        h_y_x1 += mixture_entropy(merge_components(weights, means, params.n0), spec) / qd;
    }

    // H(Y | X1 + X2): uniform over the pair within each sum class.
    double h_y_sum = 0.0;
    for (std::uint32_t c = 0; c < q; ++c) {
        std::vector<double> means, weights;
        for (std::uint32_t a = 0; a < q; ++a) {
            means.push_back(params.mean(a, galois::mod_sub(c, a, q)));
            weights.push_back(1.0 / qd);
        }
        h_y_sum += mixture_entropy(merge_components(weights, means, params.n0), spec) / qd;
    }

    InfoReport r;
    r.i_y_x1x2 = h_y - h_noise;
    r.i_y_x1 = h_y - h_y_x1;
    r.i_y_sum = h_y - h_y_sum;
    r.params = params;
    r.spec = spec;
    return r;
}

double renyi_down(const channel::MacChannelParams& params, double s, Marginal which,
                  const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    if (s < 0.0 || s > 0.5) throw Error("renyi: s must lie in [0, 1/2]");

    if (s == 0.0) {
        InfoReport r = mutual_infos(params, spec);
        return which == Marginal::X1 ? r.i_y_x1 : r.i_y_x1x2;
    }

    const std::uint32_t q = params.constellation.q;
    const double qd = static_cast<double>(q);
    const double alpha = 1.0 / (1.0 - s);

    // Conditional laws p(y|z) with uniform z, one mixture per value of z.
    std::vector<GaussianMixture> cond;
    std::vector<double> log_pz;
    if (which == Marginal::X1) {
        for (std::uint32_t a = 0; a < q; ++a) {
            std::vector<double> means, weights;
            for (std::uint32_t b = 0; b < q; ++b) {
                means.push_back(params.mean(a, b));
                weights.push_back(1.0 / qd);
            }
            cond.push_back(merge_components(weights, means, params.n0));
            log_pz.push_back(-std::log(qd));
        }
    } else {
        for (std::uint32_t a = 0; a < q; ++a)
            for (std::uint32_t b = 0; b < q; ++b) {
                cond.push_back(GaussianMixture{{1.0}, {params.mean(a, b)}, params.n0});
                log_pz.push_back(-2.0 * std::log(qd));
            }
    }

    std::vector<double> all_means;
    for (const auto& m : cond)
        all_means.insert(all_means.end(), m.means.begin(), m.means.end());
    Window w = window_for(all_means, params.n0, spec);

    auto integrand = [&](double y) {
        thread_local std::vector<double> logs;
        logs.resize(cond.size());
        for (std::size_t z = 0; z < cond.size(); ++z)
            logs[z] = log_pz[z] + alpha * cond[z].log_pdf(y);
        return std::exp((1.0 - s) * num::log_sum_exp(logs));
    };
    double integral = integrate(integrand, w.lo, w.hi, spec, w.cuts);
    return std::log(integral) / s;
}

}  // namespace scf::infoq
