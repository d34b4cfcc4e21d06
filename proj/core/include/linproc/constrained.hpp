#ifndef LINPROC_CONSTRAINED_HPP
#define LINPROC_CONSTRAINED_HPP

#include <functional>
#include <span>

#include "linproc/innovations.hpp"
#include "linproc/smooth_function.hpp"
#include "linproc/ustat.hpp"

namespace linproc {

// A constraint function psi with int psi dP = 0 under the declared P.
// The default, psi(x) = x, encodes the mean-zero innovations.
struct ConstraintSpec {
    std::function<double(double)> psi;
    std::function<double(double)> psi_prime;
    double lipschitz_const = 1.0;

    static ConstraintSpec identity() {
        return ConstraintSpec{[](double x) { return x; }, [](double) { return 1.0; }, 1.0};
    }
};

struct AStarHat {
    double value = 0.0;
    double empty_bucket_fraction = 0.0;
    bool reliable = true; // false when more than 1% of buckets were empty
};

// Projection-coefficient estimate
//   a*_hat = sum_j psi(X_j) sum_r H_{r,j} / sum_j psi(X_j)^2.
// Empty buckets contribute zero and are counted in the diagnostics.
AStarHat a_star_hat(std::span<const double> X, const UStatResult& result,
                    const ConstraintSpec& psi);

// Corrected point estimate kappa_tilde - a * (1/n) sum_j psi(X_j).
double constrained_estimate(const UStatResult& result, double a, std::span<const double> X,
                            const ConstraintSpec& psi);

// Analytic a* = int h_* psi dP / int psi^2 dP for psi = identity and
// polynomial h of degree at most 2; used as a test oracle.
double a_star_closed_form(const InnovationSpec& spec, const CoefSeq& beta,
                          const SmoothFunction& h);

} // namespace linproc

#endif
