#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "confsense/errors.hpp"

namespace confsense::bias {

/// Mass below this counts as zero for positivity checks.
inline constexpr double kZeroTol = 1e-15;

/// Finite joint over (X, U, A) with conditional outcome means E[Y | a, x, u].
/// A is binary with levels a0/a1; X and U may take any finite number of
/// labelled values (binary being the usual case).
class DiscreteJoint {
public:
    DiscreteJoint(std::vector<std::string> x_labels, std::vector<std::string> u_labels)
        : x_labels_(std::move(x_labels)),
          u_labels_(std::move(u_labels)),
          p_(x_labels_.size() * u_labels_.size() * 2, 0.0),
          ey_(x_labels_.size() * u_labels_.size() * 2, 0.0) {
        if (x_labels_.empty() || u_labels_.empty()) {
            throw ValidationError("DiscreteJoint: empty support");
        }
    }

    std::size_t nx() const { return x_labels_.size(); }
    std::size_t nu() const { return u_labels_.size(); }
    const std::vector<std::string>& x_labels() const { return x_labels_; }
    const std::vector<std::string>& u_labels() const { return u_labels_; }

    double& p(std::size_t ix, std::size_t iu, int a) { return p_[at(ix, iu, a)]; }
    double p(std::size_t ix, std::size_t iu, int a) const { return p_[at(ix, iu, a)]; }
    double& ey(std::size_t ix, std::size_t iu, int a) { return ey_[at(ix, iu, a)]; }
    double ey(std::size_t ix, std::size_t iu, int a) const { return ey_[at(ix, iu, a)]; }

    void validate() const {
        double total = 0.0;
        for (double v : p_) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ValidationError("DiscreteJoint: probabilities must be finite and >= 0");
            }
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw ValidationError("DiscreteJoint: probabilities sum to " + std::to_string(total) +
                                  ", expected 1");
        }
        for (double v : ey_) {
            if (!std::isfinite(v)) {
                throw ValidationError("DiscreteJoint: non-finite outcome mean");
            }
        }
    }

    double p_xu(std::size_t ix, std::size_t iu) const { return p(ix, iu, 0) + p(ix, iu, 1); }
    double p_x(std::size_t ix) const {
        double s = 0.0;
        for (std::size_t iu = 0; iu < nu(); ++iu) s += p_xu(ix, iu);
        return s;
    }
    double p_xa(std::size_t ix, int a) const {
        double s = 0.0;
        for (std::size_t iu = 0; iu < nu(); ++iu) s += p(ix, iu, a);
        return s;
    }

private:
    std::size_t at(std::size_t ix, std::size_t iu, int a) const {
        if (ix >= nx() || iu >= nu() || (a != 0 && a != 1)) {
            throw ValidationError("DiscreteJoint: index out of range");
        }
        return (ix * nu() + iu) * 2 + static_cast<std::size_t>(a);
    }

    std::vector<std::string> x_labels_, u_labels_;
    std::vector<double> p_, ey_;
};

/// Fully adjusted contrast:
///   tau = sum_x sum_u {E[Y|a1,x,u] - E[Y|a0,x,u]} P(u|x) P(x).
/// Requires positivity within every (x,u) stratum that carries mass.
inline double tau_adjusted(const DiscreteJoint& joint) {
    joint.validate();
    double tau = 0.0;
    for (std::size_t ix = 0; ix < joint.nx(); ++ix) {
        const double px = joint.p_x(ix);
        if (px <= kZeroTol) continue;
        for (std::size_t iu = 0; iu < joint.nu(); ++iu) {
            const double pxu = joint.p_xu(ix, iu);
            if (pxu <= kZeroTol) continue;
            if (joint.p(ix, iu, 0) <= kZeroTol || joint.p(ix, iu, 1) <= kZeroTol) {
                throw ValidationError("positivity violated in stratum (x=" +
                                      joint.x_labels()[ix] + ", u=" + joint.u_labels()[iu] +
                                      "): both treatment levels need mass");
            }
            const double contrast = joint.ey(ix, iu, 1) - joint.ey(ix, iu, 0);
            // P(u|x) P(x) = p(x,u).
            tau += contrast * pxu;
        }
    }
    return tau;
}

/// Observational contrast ignoring U:
///   tau* = sum_x {E[Y|a1,x] - E[Y|a0,x]} P(x),
/// with E[Y|a,x] = sum_u E[Y|a,x,u] P(u|x,a).
inline double tau_star(const DiscreteJoint& joint) {
    joint.validate();
    double tau = 0.0;
    for (std::size_t ix = 0; ix < joint.nx(); ++ix) {
        const double px = joint.p_x(ix);
        if (px <= kZeroTol) continue;
        const double pxa1 = joint.p_xa(ix, 1);
        const double pxa0 = joint.p_xa(ix, 0);
        if (pxa1 <= kZeroTol || pxa0 <= kZeroTol) {
            throw ValidationError("positivity violated at x=" + joint.x_labels()[ix] +
                                  ": both treatment levels need mass");
        }
        double e1 = 0.0, e0 = 0.0;
        for (std::size_t iu = 0; iu < joint.nu(); ++iu) {
            e1 += joint.ey(ix, iu, 1) * (joint.p(ix, iu, 1) / pxa1);
            e0 += joint.ey(ix, iu, 0) * (joint.p(ix, iu, 0) / pxa0);
        }
        tau += (e1 - e0) * px;
    }
    return tau;
}

/// Confounding bias left by adjusting for X only: tau* - tau.
inline double confounding_bias(const DiscreteJoint& joint) {
    return tau_star(joint) - tau_adjusted(joint);
}

/// One cell of a full discrete joint over (x, u, a, y).
struct FullJointCell {
    std::size_t ix, iu;
    int a;
    double y;
    double prob;
};

/// Collapses a full discrete joint to the (mass, conditional mean) form the
/// contrast formulas consume.
inline DiscreteJoint from_full_joint(std::vector<std::string> x_labels,
                                     std::vector<std::string> u_labels,
                                     const std::vector<FullJointCell>& cells) {
    DiscreteJoint joint(std::move(x_labels), std::move(u_labels));
    std::vector<double> wy(joint.nx() * joint.nu() * 2, 0.0);
    for (const auto& c : cells) {
        if (!(c.prob >= 0.0) || !std::isfinite(c.prob) || !std::isfinite(c.y)) {
            throw ValidationError("full joint: invalid cell");
        }
        joint.p(c.ix, c.iu, c.a) += c.prob;
        wy[(c.ix * joint.nu() + c.iu) * 2 + static_cast<std::size_t>(c.a)] += c.prob * c.y;
    }
    for (std::size_t ix = 0; ix < joint.nx(); ++ix) {
        for (std::size_t iu = 0; iu < joint.nu(); ++iu) {
            for (int a = 0; a < 2; ++a) {
                const double mass = joint.p(ix, iu, a);
                if (mass > kZeroTol) {
                    joint.ey(ix, iu, a) =
                        wy[(ix * joint.nu() + iu) * 2 + static_cast<std::size_t>(a)] / mass;
                }
            }
        }
    }
    return joint;
}

} // namespace confsense::bias
