#ifndef LINPROC_STUDY_HPP
#define LINPROC_STUDY_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "linproc/plugin.hpp"
#include "linproc/process.hpp"
#include "linproc/ustat.hpp"

namespace linproc {

// Plain empirical estimate (1/n) sum h(Y_j).
double empirical_estimator(const ProcessPath& path, const SmoothFunction& h);

// Innovation moment estimate mu_hat_k = (1/n) sum X_{n,j}(theta)^k for AR(1) residuals.
double mu_hat(const ProcessPath& path, double theta, int k);

// Improved empirical estimate of sigma^2 = E Y^2 for AR(1):
// (1/n) sum (Y_j^2 - c Y_j) with c = mu3_hat / ((1 + theta_hat) mu2_hat)
// and theta_hat the LS slope.
double improved_empirical_sigma2(const ProcessPath& path);

// mu2*_hat / (1 - theta^2) with mu2*_hat = mu2_hat - (mu3_hat/mu2_hat) mu1_hat,
// the one-line corrected moment estimate.
double simple_efficient_sigma2(const ProcessPath& path, double theta);

enum class VarianceKind { Empirical, Improved, UstatLs, Efficient };

// Closed-form n * asymptotic variance of the named sigma^2 estimator for
// the AR(1) model at theta with innovation moments mu2..mu4 (and Fisher
// information for the efficient bound).
double asymptotic_variance(VarianceKind kind, double theta, double mu2, double mu3, double mu4,
                           std::optional<double> fisher_info = std::nullopt);

// (V_kind - V_efficient) / V_efficient for kind = Empirical or Improved.
double relative_variance_increase(VarianceKind kind, double theta, double mu2, double mu3,
                                  double mu4, double fisher_info);

enum class EstimatorId { Empirical, ImprovedEmpirical, UstatLs, UstatOneStep, SimpleEfficient };

std::string estimator_name(EstimatorId id);

struct StudyConfig {
    Theta theta0;
    std::size_t n = 500;
    std::size_t replications = 200;
    std::vector<EstimatorId> estimators{EstimatorId::Empirical, EstimatorId::ImprovedEmpirical,
                                        EstimatorId::UstatLs, EstimatorId::UstatOneStep,
                                        EstimatorId::SimpleEfficient};
    std::uint64_t seed = 1;
    UStatConfig ustat; // per-replication seeds are derived from `seed`
    int r = -1;        // prehistory; -1 = default_prehistory(n)
    bool oracle_nuisance = true;
};

struct StudyRow {
    std::string estimator;
    double mean = 0.0;
    double bias = 0.0;
    double n_var = 0.0;  // n * sample variance across replications
    double target = 0.0; // asymptotic n * variance (NaN when unknown)
    double rel_dev = 0.0;
};

struct StudyRatioRow {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
};

struct StudyResult {
    std::size_t n = 0;
    std::size_t replications = 0;
    std::size_t failed = 0; // replications dropped by estimator failures
    double kappa_true = 0.0;
    std::vector<StudyRow> rows;
    std::vector<StudyRatioRow> ratios;

    void to_csv(std::ostream& os) const;
    std::string to_json() const;
};

// Monte Carlo comparison of sigma^2 estimators for the AR(1) model with
// target h(x) = x^2.  All estimators see the same simulated paths
// (common random numbers); every replication draws its seeds by keyed
// derivation from config.seed, so the result is byte-stable.
StudyResult monte_carlo_study(const CoefficientModel& model, const InnovationSpec& spec,
                              const StudyConfig& config);

struct GradientCheck {
    double slope = 0.0;      // d/d eps kappa(P_eps) at 0, fitted
    double target = 0.0;     // int h_* g dP
    double rel_error = 0.0;  // |slope - target| / max(1, |target|)
    std::vector<double> eps; // grid used (0 included)
    std::vector<double> kappa_eps;
};

// Differentiability check: kappa under the tilted law dP_eps = (1 + eps g) dP
// by importance reweighting with common random numbers, quadratic fit in eps,
// slope compared against the influence-function pairing int h_* g dP.
GradientCheck gradient_check(const InnovationSpec& spec, const CoefSeq& beta,
                             const SmoothFunction& h, const std::function<double(double)>& g,
                             std::vector<double> eps_grid, std::size_t mc, rng::Stream& stream,
                             std::size_t hstar_mc = 200000);

} // namespace linproc

#endif
