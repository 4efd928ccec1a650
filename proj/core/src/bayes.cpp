#include "synq/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace synq::bayes {

namespace {
constexpr double kTol = 1e-12;

double dirichlet1_draw(Rng& rng) {
    // Exp(1), the Dirichlet(1) building block
    double u;
    do {
        u = rng.uniform();
    } while (u == 0.0);
    return -std::log(u);
}
}  // namespace

std::vector<double> DiscreteJoint::x_marginal() const {
    std::vector<double> m(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) m[x] += p(x, y);
    return m;
}

std::vector<double> DiscreteJoint::y_marginal() const {
    std::vector<double> m(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) m[y] += p(x, y);
    return m;
}

std::vector<double> DiscreteJoint::y_given_x(std::size_t x) const {
    std::vector<double> cond(ny, 0.0);
    double px = 0.0;
    for (std::size_t y = 0; y < ny; ++y) px += p(x, y);
    if (px <= 0.0) return cond;
    for (std::size_t y = 0; y < ny; ++y) cond[y] = p(x, y) / px;
    return cond;
}

std::vector<double> DiscreteJoint::x_given_y(std::size_t y) const {
    std::vector<double> cond(nx, 0.0);
    double py = 0.0;
    for (std::size_t x = 0; x < nx; ++x) py += p(x, y);
    if (py <= 0.0) return cond;
    for (std::size_t x = 0; x < nx; ++x) cond[x] = p(x, y) / py;
    return cond;
}

void DiscreteJoint::validate() const {
    if (nx == 0 || ny == 0 || nx > kMaxX || ny > kMaxY)
        throw std::invalid_argument("DiscreteJoint: space size out of range");
    if (probs.size() != nx * ny)
        throw std::invalid_argument("DiscreteJoint: table size mismatch");
    double sum = 0.0;
    for (double v : probs) {
        if (v < 0.0) throw std::invalid_argument("DiscreteJoint: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kTol)
        throw std::invalid_argument("DiscreteJoint: table must sum to 1");
}

DiscreteJoint DiscreteJoint::random(std::size_t nx, std::size_t ny, Rng& rng) {
    DiscreteJoint j;
    j.nx = nx;
    j.ny = ny;
    j.probs.resize(nx * ny);
    double sum = 0.0;
    for (auto& v : j.probs) {
        v = dirichlet1_draw(rng);
        sum += v;
    }
    for (auto& v : j.probs) v /= sum;
    return j;
}

DiscreteJoint DiscreteJoint::random_matched_prior(const DiscreteJoint& reference, Rng& rng) {
    DiscreteJoint j;
    j.nx = reference.nx;
    j.ny = reference.ny;
    j.probs.assign(j.nx * j.ny, 0.0);
    const auto prior = reference.y_marginal();
    std::vector<double> cond(j.nx);
    for (std::size_t y = 0; y < j.ny; ++y) {
        double sum = 0.0;
        for (auto& v : cond) {
            v = dirichlet1_draw(rng);
            sum += v;
        }
        for (std::size_t x = 0; x < j.nx; ++x) j.probs[x * j.ny + y] = prior[y] * cond[x] / sum;
    }
    return j;
}

double BoundedLossFunction::sup_norm() const {
    double m = 0.0;
    for (double v : h) m = std::max(m, std::abs(v));
    return m;
}

void BoundedLossFunction::validate() const {
    for (double v : h)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("BoundedLossFunction: values must be in [0, 1]");
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return 0.5 * acc;
}

double trts_expected_loss(const DiscreteJoint& p, const DiscreteJoint& p_theta,
                          const Classifier& classifier, const LossFn& loss) {
    if (classifier.size() != p.nx)
        throw std::invalid_argument("trts_expected_loss: classifier size mismatch");
    const auto outer = p_theta.x_marginal();
    double acc = 0.0;
    for (std::size_t x = 0; x < p.nx; ++x) {
        if (outer[x] <= 0.0) continue;
        const auto cond = p.y_given_x(x);  // all-zero when p(x) = 0: term skipped
        double inner = 0.0;
        for (std::size_t y = 0; y < p.ny; ++y)
            inner += cond[y] * loss(static_cast<int>(y), classifier[x]);
        acc += outer[x] * inner;
    }
    return acc;
}

double tstr_expected_loss(const DiscreteJoint& p, const DiscreteJoint& p_theta,
                          const Classifier& classifier, const LossFn& loss) {
    if (classifier.size() != p.nx)
        throw std::invalid_argument("tstr_expected_loss: classifier size mismatch");
    const auto outer = p.x_marginal();
    double acc = 0.0;
    for (std::size_t x = 0; x < p.nx; ++x) {
        if (outer[x] <= 0.0) continue;
        const auto cond = p_theta.y_given_x(x);
        double inner = 0.0;
        for (std::size_t y = 0; y < p.ny; ++y)
            inner += cond[y] * loss(static_cast<int>(y), classifier[x]);
        acc += outer[x] * inner;
    }
    return acc;
}

BoundCheck tv_bound_check(const DiscreteJoint& p, const DiscreteJoint& p_theta,
                          const BoundedLossFunction& h) {
    if (h.h.size() != p.nx || p.nx != p_theta.nx)
        throw std::invalid_argument("tv_bound_check: size mismatch");
    const auto mp = p.x_marginal();
    const auto mq = p_theta.x_marginal();
    double ep = 0.0, eq = 0.0;
    for (std::size_t x = 0; x < p.nx; ++x) {
        ep += mp[x] * h.h[x];
        eq += mq[x] * h.h[x];
    }
    BoundCheck check;
    check.lhs = std::abs(eq - ep);
    check.rhs = 2.0 * total_variation(mq, mp) * h.sup_norm();
    check.holds = check.lhs <= check.rhs + kTol;
    return check;
}

BoundCheck conditional_tv_bound_check(const DiscreteJoint& p, const DiscreteJoint& p_theta) {
    if (p.nx != p_theta.nx || p.ny != p_theta.ny)
        throw std::invalid_argument("conditional_tv_bound_check: shape mismatch");
    const auto prior = p.y_marginal();
    const auto prior_theta = p_theta.y_marginal();
    BoundCheck check;
    double rhs = 0.0;
    for (std::size_t y = 0; y < p.ny; ++y) {
        if (prior[y] <= 0.0) continue;
        if (prior_theta[y] <= 0.0) {
            // p(y) > 0 but p_theta(y) = 0: conditional undefined, case vacuous
            check.vacuous = true;
            continue;
        }
        rhs += prior[y] * total_variation(p_theta.x_given_y(y), p.x_given_y(y));
    }
    check.lhs = total_variation(p_theta.x_marginal(), p.x_marginal());
    check.rhs = rhs;
    check.holds = check.vacuous || check.lhs <= check.rhs + kTol;
    return check;
}

Classifier bayes_classifier(const DiscreteJoint& joint) {
    Classifier f(joint.nx, 0);
    for (std::size_t x = 0; x < joint.nx; ++x) {
        const auto cond = joint.y_given_x(x);
        int best = 0;
        for (std::size_t y = 1; y < joint.ny; ++y)
            if (cond[y] > cond[best]) best = static_cast<int>(y);
        f[x] = best;
    }
    return f;
}

double bayes_risk(const DiscreteJoint& joint) {
    const auto mx = joint.x_marginal();
    double risk = 0.0;
    for (std::size_t x = 0; x < joint.nx; ++x) {
        if (mx[x] <= 0.0) continue;
        const auto cond = joint.y_given_x(x);
        double best = 0.0;
        for (double c : cond) best = std::max(best, c);
        risk += mx[x] * (1.0 - best);
    }
    return risk;
}

double min_loss_exhaustive(std::size_t nx, std::size_t ny,
                           const std::function<double(const Classifier&)>& eval) {
    Classifier f(nx, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        best = std::min(best, eval(f));
        std::size_t pos = 0;
        while (pos < nx) {
            if (++f[pos] < static_cast<int>(ny)) break;
            f[pos] = 0;
            ++pos;
        }
        if (pos == nx) break;
    }
    return best;
}

VerifySummary run_verification(std::size_t instances, std::uint64_t seed) {
    VerifySummary summary;
    summary.tv_bound_worst_slack = std::numeric_limits<double>::infinity();
    summary.cond_tv_worst_slack = std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(seed, 0x766572696679));

    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t nx = 2 + rng.index(kMaxX - 1);
        const std::size_t ny = 2 + rng.index(kMaxY - 1);
        const auto p = DiscreteJoint::random(nx, ny, rng);
        const auto q = DiscreteJoint::random(nx, ny, rng);
        BoundedLossFunction h;
        h.h.resize(nx);
        for (auto& v : h.h) v = rng.uniform();
        const auto check = tv_bound_check(p, q, h);
        ++summary.tv_bound_instances;
        if (!check.holds) ++summary.tv_bound_violations;
        summary.tv_bound_worst_slack =
            std::min(summary.tv_bound_worst_slack, check.rhs - check.lhs);
    }

    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t nx = 2 + rng.index(kMaxX - 1);
        const std::size_t ny = 2 + rng.index(kMaxY - 1);
        const auto p = DiscreteJoint::random(nx, ny, rng);
        const auto q = DiscreteJoint::random_matched_prior(p, rng);
        const auto check = conditional_tv_bound_check(p, q);
        ++summary.cond_tv_instances;
        if (check.vacuous)
            ++summary.cond_tv_vacuous;
        else if (!check.holds)
            ++summary.cond_tv_violations;
        if (!check.vacuous)
            summary.cond_tv_worst_slack =
                std::min(summary.cond_tv_worst_slack, check.rhs - check.lhs);
    }

    // Lemma: the pointwise-argmax rule attains the exhaustive optimum
    const std::size_t lemma_instances = std::max<std::size_t>(100, instances / 10);
    for (std::size_t i = 0; i < lemma_instances; ++i) {
        const std::size_t nx = 2 + rng.index(3);  // up to 4
        const std::size_t ny = 2 + rng.index(2);  // up to 3
        const auto p = DiscreteJoint::random(nx, ny, rng);
        const auto bayes = bayes_classifier(p);
        const double bayes_loss =
            trts_expected_loss(p, p, bayes, zero_one_loss);  // p_theta = p: plain risk
        const double best = min_loss_exhaustive(
            nx, ny, [&](const Classifier& f) { return trts_expected_loss(p, p, f, zero_one_loss); });
        ++summary.lemma_instances;
        if (bayes_loss > best + kTol) ++summary.lemma_violations;
    }

    // TSTR optimality: with matching conditionals, the Bayes rule of p_theta
    // minimizes the TSTR loss over all classifiers
    for (std::size_t i = 0; i < lemma_instances; ++i) {
        const std::size_t nx = 2 + rng.index(3);
        const std::size_t ny = 2 + rng.index(2);
        const auto p = DiscreteJoint::random(nx, ny, rng);
        const auto bayes = bayes_classifier(p);
        const double opt = tstr_expected_loss(p, p, bayes, zero_one_loss);
        const double best = min_loss_exhaustive(
            nx, ny, [&](const Classifier& f) { return tstr_expected_loss(p, p, f, zero_one_loss); });
        ++summary.tstr_opt_instances;
        if (opt > best + kTol) ++summary.tstr_opt_violations;
    }

    return summary;
}

}  // namespace synq::bayes
