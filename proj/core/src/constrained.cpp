#include "linproc/constrained.hpp"

#include <stdexcept>

#include "linproc/accumulate.hpp"

namespace linproc {

AStarHat a_star_hat(std::span<const double> X, const UStatResult& result,
                    const ConstraintSpec& psi) {
    if (X.size() != result.n) throw std::invalid_argument("a_star_hat: X does not match result");
    if (result.bucket_mean.empty()) throw std::invalid_argument("a_star_hat: H table missing");

    KahanSum num, den;
    for (std::size_t j = 1; j <= result.n; ++j) {
        const double pj = psi.psi(X[j - 1]);
        num.add(pj * result.slot_sum(j));
        den.add(pj * pj);
    }
    if (den.value() <= 0.0) throw std::domain_error("a_star_hat: sum psi(X_j)^2 is zero");

    AStarHat out;
    out.value = num.value() / den.value();
    out.empty_bucket_fraction = result.empty_bucket_fraction();
    out.reliable = out.empty_bucket_fraction <= 0.01;
    return out;
}

double constrained_estimate(const UStatResult& result, double a, std::span<const double> X,
                            const ConstraintSpec& psi) {
    KahanSum psi_sum;
    for (double x : X) psi_sum.add(psi.psi(x));
    return result.kappa_tilde - a * psi_sum.value() / static_cast<double>(X.size());
}

double a_star_closed_form(const InnovationSpec& spec, const CoefSeq& beta,
                          const SmoothFunction& h) {
    if (!h.is_polynomial() || h.poly_coeffs().size() > 3)
        throw std::invalid_argument("a_star_closed_form: supported only for polynomial h of degree <= 2");
    const auto& c = h.poly_coeffs();
    const double lin = c.size() > 1 ? c[1] : 0.0;
    const double quad = c.size() > 2 ? c[2] : 0.0;
    // h_*(x) = quad * sum(beta^2) * (x^2 - mu2) + lin * sum(beta) * x,
    // so a* = E[X h_*(X)] / mu2 = quad * sum(beta^2) * mu3 / mu2 + lin * sum(beta).
    return quad * beta.sum_sq() * spec.moment(3) / spec.moment(2) + lin * beta.sum();
}

} // namespace linproc
