#include "linproc/innovations.hpp"

#include <cmath>
#include <stdexcept>

namespace linproc {

InnovationSpec InnovationSpec::standard_normal() {
    return InnovationSpec(Family::StandardNormal, "standard-normal");
}

InnovationSpec InnovationSpec::centered_gamma(double shape) {
    if (!(shape > 2.0))
        throw std::invalid_argument("centered_gamma: shape must exceed 2 for finite Fisher information");
    InnovationSpec spec(Family::CenteredGamma, "centered-gamma");
    spec.shape_ = shape;
    return spec;
}

InnovationSpec InnovationSpec::centered_laplace(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("centered_laplace: scale must be positive");
    InnovationSpec spec(Family::CenteredLaplace, "centered-laplace");
    spec.scale_ = scale;
    return spec;
}

InnovationSpec InnovationSpec::centered_uniform(double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("centered_uniform: half-width must be positive");
    InnovationSpec spec(Family::CenteredUniform, "centered-uniform");
    spec.half_width_ = half_width;
    return spec;
}

InnovationSpec InnovationSpec::two_point(double p, double hi) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("two_point: p must be in (0,1)");
    if (!(hi > 0.0)) throw std::invalid_argument("two_point: hi must be positive");
    InnovationSpec spec(Family::TwoPoint, "two-point");
    spec.p_ = p;
    spec.hi_ = hi;
    spec.lo_ = -p * hi / (1.0 - p);
    return spec;
}

double InnovationSpec::moment(int k) const {
    if (k < 1 || k > 4) throw std::invalid_argument("moment: k must be 1..4");
    if (k == 1) return 0.0;
    switch (family_) {
    case Family::StandardNormal:
        return k == 2 ? 1.0 : (k == 3 ? 0.0 : 3.0);
    case Family::CenteredGamma:
        // central moments of Gamma(shape, 1)
        if (k == 2) return shape_;
        if (k == 3) return 2.0 * shape_;
        return 3.0 * shape_ * shape_ + 6.0 * shape_;
    case Family::CenteredLaplace: {
        const double b2 = scale_ * scale_;
        if (k == 2) return 2.0 * b2;
        if (k == 3) return 0.0;
        return 24.0 * b2 * b2;
    }
    case Family::CenteredUniform: {
        const double w2 = half_width_ * half_width_;
        if (k == 2) return w2 / 3.0;
        if (k == 3) return 0.0;
        return w2 * w2 / 5.0;
    }
    case Family::TwoPoint: {
        const double q = 1.0 - p_;
        if (k == 2) return p_ * hi_ * hi_ + q * lo_ * lo_;
        if (k == 3) return p_ * hi_ * hi_ * hi_ + q * lo_ * lo_ * lo_;
        return p_ * hi_ * hi_ * hi_ * hi_ + q * lo_ * lo_ * lo_ * lo_;
    }
    }
    throw std::logic_error("moment: unknown family");
}

bool InnovationSpec::has_score() const {
    switch (family_) {
    case Family::StandardNormal:
    case Family::CenteredGamma:
    case Family::CenteredLaplace:
        return true;
    default:
        return false;
    }
}

double InnovationSpec::score(double x) const {
    switch (family_) {
    case Family::StandardNormal:
        return -x;
    case Family::CenteredGamma: {
        // density f(x) = (x+k)^{k-1} e^{-(x+k)} / Gamma(k) on x > -k
        double u = x + shape_;
        if (u < 1e-12) u = 1e-12; // keep the score finite on the boundary
        return (shape_ - 1.0) / u - 1.0;
    }
    case Family::CenteredLaplace:
        if (x == 0.0) return 0.0;
        return x > 0.0 ? -1.0 / scale_ : 1.0 / scale_;
    default:
        throw std::domain_error("score: unavailable for " + name_);
    }
}

double InnovationSpec::fisher_info() const {
    switch (family_) {
    case Family::StandardNormal:
        return 1.0;
    case Family::CenteredGamma:
        return 1.0 / (shape_ - 2.0);
    case Family::CenteredLaplace:
        return 1.0 / (scale_ * scale_);
    default:
        throw std::domain_error("fisher_info: unavailable for " + name_);
    }
}

double InnovationSpec::sample(rng::Stream& stream) const {
    switch (family_) {
    case Family::StandardNormal:
        return stream.normal();
    case Family::CenteredGamma:
        return stream.gamma(shape_) - shape_;
    case Family::CenteredLaplace: {
        const double u = stream.uniform_pos() - 0.5;
        const double sign = u >= 0.0 ? 1.0 : -1.0;
        return -sign * scale_ * std::log(1.0 - 2.0 * std::abs(u));
    }
    case Family::CenteredUniform:
        return half_width_ * (2.0 * stream.uniform() - 1.0);
    case Family::TwoPoint:
        return stream.uniform() < p_ ? hi_ : lo_;
    }
    throw std::logic_error("sample: unknown family");
}

std::vector<double> InnovationSpec::sample(std::size_t n, rng::Stream& stream) const {
    if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
    std::vector<double> out(n);
    for (auto& x : out) x = sample(stream);
    return out;
}

} // namespace linproc
