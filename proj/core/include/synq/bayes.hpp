#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "synq/rng.hpp"

namespace synq::bayes {

// Joint distribution over a small discrete sample space X x Y, stored
// row-major (|X| rows, |Y| columns). Tiny by construction so every check
// can enumerate exactly.
struct DiscreteJoint {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> probs;  // nx * ny

    double p(std::size_t x, std::size_t y) const { return probs[x * ny + y]; }
    std::vector<double> x_marginal() const;
    std::vector<double> y_marginal() const;
    // p(y | x); undefined rows (p(x) = 0) return all-zero
    std::vector<double> y_given_x(std::size_t x) const;
    // p(x | y); undefined columns (p(y) = 0) return all-zero
    std::vector<double> x_given_y(std::size_t y) const;

    void validate() const;

    // symmetric Dirichlet(1) over the whole table
    static DiscreteJoint random(std::size_t nx, std::size_t ny, Rng& rng);
    // Dirichlet(1) conditionals x|y under the label prior of `reference`
    static DiscreteJoint random_matched_prior(const DiscreteJoint& reference, Rng& rng);
};

inline constexpr std::size_t kMaxX = 16;
inline constexpr std::size_t kMaxY = 8;

// h(x) = E_{p(y|x)}[L(y, yhat | X=x)] with values in [0, 1]
struct BoundedLossFunction {
    std::vector<double> h;
    double sup_norm() const;
    void validate() const;
};

using Classifier = std::vector<int>;  // x -> predicted y
using LossFn = std::function<double(int y, int yhat)>;

inline double zero_one_loss(int y, int yhat) { return y == yhat ? 0.0 : 1.0; }

// 0.5 * sum |p - q| over a shared support
double total_variation(std::span<const double> p, std::span<const double> q);

// E_{p_theta(x)}[ E_{p(y|x)}[L(y, f(x))] ]; x with p(x)=0 contribute 0
double trts_expected_loss(const DiscreteJoint& p, const DiscreteJoint& p_theta,
                          const Classifier& classifier, const LossFn& loss);

// E_{p(x)}[ E_{p_theta(y|x)}[L(y, f(x))] ]; x with p_theta(x)=0 contribute 0
double tstr_expected_loss(const DiscreteJoint& p, const DiscreteJoint& p_theta,
                          const Classifier& classifier, const LossFn& loss);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool vacuous = false;  // undefined conditional encountered, excluded from assertions
};

// |E_{p_theta(x)}[h] - E_{p(x)}[h]|  <=  2 * TV(marginals) * sup|h|
BoundCheck tv_bound_check(const DiscreteJoint& p, const DiscreteJoint& p_theta,
                          const BoundedLossFunction& h);

// TV(p_theta(x), p(x))  <=  E_{p(y)}[ TV(p_theta(x|y), p(x|y)) ]
BoundCheck conditional_tv_bound_check(const DiscreteJoint& p, const DiscreteJoint& p_theta);

// pointwise argmax of p(y|x) (0-1 loss Bayes rule); ties -> lowest y;
// x with p(x)=0 predicts 0
Classifier bayes_classifier(const DiscreteJoint& joint);
double bayes_risk(const DiscreteJoint& joint);

// exhaustive search over all |Y|^|X| classifiers
double min_loss_exhaustive(std::size_t nx, std::size_t ny,
                           const std::function<double(const Classifier&)>& eval);

// Aggregate verification used by the CLI `verify` verb.
struct VerifySummary {
    std::size_t tv_bound_instances = 0;
    std::size_t tv_bound_violations = 0;
    double tv_bound_worst_slack = 0.0;  // min(rhs - lhs) over instances
    std::size_t cond_tv_instances = 0;
    std::size_t cond_tv_violations = 0;
    std::size_t cond_tv_vacuous = 0;
    double cond_tv_worst_slack = 0.0;
    std::size_t lemma_instances = 0;
    std::size_t lemma_violations = 0;
    std::size_t tstr_opt_instances = 0;
    std::size_t tstr_opt_violations = 0;
    bool all_hold() const {
        return tv_bound_violations == 0 && cond_tv_violations == 0 && lemma_violations == 0 &&
               tstr_opt_violations == 0;
    }
};

VerifySummary run_verification(std::size_t instances, std::uint64_t seed);

}  // namespace synq::bayes
