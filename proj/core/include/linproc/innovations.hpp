#ifndef LINPROC_INNOVATIONS_HPP
#define LINPROC_INNOVATIONS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "linproc/rng.hpp"

namespace linproc {

enum class Family {
    StandardNormal,
    CenteredGamma,   // Gamma(shape,1) shifted by -shape, shape > 2
    CenteredLaplace, // scale b
    CenteredUniform, // half-width w
    TwoPoint,        // P(X = hi) = p, lo chosen so the mean is 0
};

// An innovation distribution P: mean-zero sampler with exact moments,
// and (where the density allows it) the location score l = f'/f and
// Fisher information I(P).
class InnovationSpec {
public:
    static InnovationSpec standard_normal();
    static InnovationSpec centered_gamma(double shape);
    static InnovationSpec centered_laplace(double scale);
    static InnovationSpec centered_uniform(double half_width);
    // hi > 0 gets probability p; lo = -p*hi/(1-p) so that mu_1 = 0
    static InnovationSpec two_point(double p, double hi);

    Family family() const { return family_; }
    const std::string& name() const { return name_; }

    // raw moment E[X^k] of the centered variable, k = 1..4
    double moment(int k) const;

    bool has_score() const;
    double score(double x) const; // l(x) = f'(x)/f(x)
    double fisher_info() const;   // I(P) = int l^2 dP

    double sample(rng::Stream& stream) const;
    std::vector<double> sample(std::size_t n, rng::Stream& stream) const;

private:
    InnovationSpec(Family f, std::string name) : family_(f), name_(std::move(name)) {}

    Family family_;
    std::string name_;
    double shape_ = 0.0;      // gamma
    double scale_ = 0.0;      // laplace
    double half_width_ = 0.0; // uniform
    double p_ = 0.0, hi_ = 0.0, lo_ = 0.0; // two-point
};

} // namespace linproc

#endif
