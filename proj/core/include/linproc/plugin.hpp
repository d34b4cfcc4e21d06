#ifndef LINPROC_PLUGIN_HPP
#define LINPROC_PLUGIN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linproc/constrained.hpp"
#include "linproc/process.hpp"
#include "linproc/smooth_function.hpp"
#include "linproc/ustat.hpp"

namespace linproc {

enum class ThetaMethod { None, LeastSquares, MomentMatch, OneStep };

struct EstimateReport {
    double kappa_hat = 0.0;
    double kappa_tilde = 0.0; // uncorrected U-statistic value
    Theta theta_hat;
    double a_star = 0.0;
    double se_plugin = 0.0;
    int m = 0;
    int r = 0;
    std::uint64_t B = 0;
    struct Diagnostics {
        double innovation_ss_resid = -1.0; // -1 when true innovations unknown
        double empty_bucket_fraction = 0.0;
        double truncation_bound = 0.0;
        std::vector<std::string> rate_warnings;
    } diagnostics;

    std::string to_json() const;
    std::string csv_row() const; // kappa_hat,a_star,se_plugin,m,r,B
};

// Least squares for AR(1): sum Y_{j-1} Y_j / sum Y_{j-1}^2 over j = 1..n.
double least_squares_ar1(const ProcessPath& path);

// Root-n consistent point estimate for the named models: least squares
// for AR1, lag-1 autocorrelation inversion for MA1, lag-1/lag-2
// autocovariance matching for ARMA11.  Clipped into the domain interior
// (with a warning) when the raw estimate falls outside.
Theta estimate_theta(const ProcessPath& path, const CoefficientModel& model,
                     ThetaMethod method = ThetaMethod::LeastSquares,
                     std::vector<std::string>* warnings = nullptr);

// One Newton step in the location-score direction from a root-n
// consistent start; oracle nuisance values (mu2, I) come from the
// innovation spec unless plug-in estimation is requested.
double one_step_efficient_ar1(const ProcessPath& path, double theta_init,
                              const InnovationSpec& spec, bool oracle_nuisance = true);

struct SubstitutionOptions {
    UStatConfig ustat;                     // m = 0 and B = 0 resolve automatically
    ThetaMethod theta_method = ThetaMethod::None; // declares w for the se estimate
    const InnovationSpec* spec = nullptr;  // oracle nuisance / score source
    double choose_m_c = 1.0;
    double choose_m_eps = 0.1;
};

// The full substitution pipeline: recover innovations at theta_hat, run
// the (incomplete) U-statistic with weights alpha_r = delta_{r-1}(theta_hat),
// apply the zero-mean correction, and estimate the plug-in standard error.
EstimateReport substitution_estimate(const ProcessPath& path, const CoefficientModel& model,
                                     const Theta& theta_hat, const SmoothFunction& h,
                                     const ConstraintSpec& psi, const SubstitutionOptions& opts);

} // namespace linproc

#endif
