#ifndef SCF_INFOQ_HPP
#define SCF_INFOQ_HPP

#include <functional>
#include <span>
#include <vector>

#include "scf/channel.hpp"
#include "scf/common.hpp"

namespace scf::infoq {

// Equal-variance Gaussian mixture on R.
struct GaussianMixture {
    std::vector<double> weights;
    std::vector<double> means;
    double n0 = 1.0;

    void validate() const;  // weights nonnegative, sum to 1 within 1e-12, n0 > 0
    double log_pdf(double y) const;
    double pdf(double y) const;
};

// Collapses duplicate means; weights are accumulated.
GaussianMixture merge_components(std::vector<double> weights, std::vector<double> means,
                                 double n0);

struct QuadratureSpec {
    double truncation_sigmas = 12.0;  // integration window beyond extreme means
    int max_subdivisions = 60;        // adaptive bisection depth
    double abs_tol = 1e-10;

    void validate() const;  // truncation >= 6, tol > 0
};

// Adaptive Simpson on [a, b]. `breakpoints` pre-splits the interval so
// narrow, well-separated bumps cannot hide from the refinement estimate.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, std::span<const double> breakpoints = {});

// Differential entropy -int p log p in nats.
double mixture_entropy(const GaussianMixture& m, const QuadratureSpec& spec);

// Mutual informations of the single-letter channel with uniform independent
// inputs: I(Y;X1), I(Y;X1,X2), I(Y;X1+X2). Nats.
struct InfoReport {
    double i_y_x1 = 0.0;
    double i_y_x1x2 = 0.0;
    double i_y_sum = 0.0;
    channel::MacChannelParams params;
    QuadratureSpec spec;
};

InfoReport mutual_infos(const channel::MacChannelParams& params, const QuadratureSpec& spec);

enum class Marginal { X1, X1X2 };

// Order-1/(1-s) downward Renyi mutual information of Y against X1 (with X2
// marginalised out) or against the pair, for s in [0, 1/2]:
//   s I = log int ( sum_z P(z) p(y|z)^(1/(1-s)) )^(1-s) dy.
// s = 0 returns the ordinary mutual information (the s -> 0 limit).
double renyi_down(const channel::MacChannelParams& params, double s, Marginal which,
                  const QuadratureSpec& spec);

}  // namespace scf::infoq

#endif
