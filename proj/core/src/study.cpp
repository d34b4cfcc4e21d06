#include "linproc/study.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "linproc/accumulate.hpp"
#include "linproc/constrained.hpp"

namespace linproc {

double empirical_estimator(const ProcessPath& path, const SmoothFunction& h) {
    const auto n = static_cast<long>(path.n());
    KahanSum s;
    for (long j = 1; j <= n; ++j) s.add(h(path.y(j)));
    return s.value() / static_cast<double>(n);
}

double mu_hat(const ProcessPath& path, double theta, int k) {
    const auto n = static_cast<long>(path.n());
    KahanSum s;
    for (long j = 1; j <= n; ++j) {
        const double x = path.y(j) - theta * path.y(j - 1);
        s.add(std::pow(x, k));
    }
    return s.value() / static_cast<double>(n);
}

double improved_empirical_sigma2(const ProcessPath& path) {
    const double theta = least_squares_ar1(path);
    const double m2 = mu_hat(path, theta, 2);
    const double den = (1.0 + theta) * m2;
    if (std::abs(den) < 1e-12)
        throw std::domain_error("improved_empirical_sigma2: (1 + theta) mu2 vanishes");
    const double c = mu_hat(path, theta, 3) / den;
    const auto n = static_cast<long>(path.n());
    KahanSum s;
    for (long j = 1; j <= n; ++j) s.add(path.y(j) * (path.y(j) - c));
    return s.value() / static_cast<double>(n);
}

double simple_efficient_sigma2(const ProcessPath& path, double theta) {
    const double m1 = mu_hat(path, theta, 1);
    const double m2 = mu_hat(path, theta, 2);
    const double m3 = mu_hat(path, theta, 3);
    if (m2 == 0.0) return 0.0; // exact-fit path: all residuals vanish
    return (m2 - m3 / m2 * m1) / (1.0 - theta * theta);
}

double asymptotic_variance(VarianceKind kind, double theta, double mu2, double mu3, double mu4,
                           std::optional<double> fisher_info) {
    const double one = 1.0 - theta * theta;
    const double base = mu4 - mu2 * mu2;
    const double corr = mu3 * mu3 / mu2;
    switch (kind) {
    case VarianceKind::Empirical:
        return (base + 4.0 * mu2 * mu2 * theta * theta / one) / (one * one);
    case VarianceKind::Improved:
    case VarianceKind::UstatLs:
        return (base - corr + 4.0 * mu2 * mu2 * theta * theta / one) / (one * one);
    case VarianceKind::Efficient:
        if (!fisher_info)
            throw std::invalid_argument("asymptotic_variance: efficient bound needs Fisher information");
        return (base - corr + 4.0 * mu2 * theta * theta / (*fisher_info * one)) / (one * one);
    }
    throw std::invalid_argument("asymptotic_variance: unknown kind");
}

double relative_variance_increase(VarianceKind kind, double theta, double mu2, double mu3,
                                  double mu4, double fisher_info) {
    if (kind != VarianceKind::Empirical && kind != VarianceKind::Improved)
        throw std::invalid_argument("relative_variance_increase: compare empirical or improved");
    const double v = asymptotic_variance(kind, theta, mu2, mu3, mu4, fisher_info);
    const double eff = asymptotic_variance(VarianceKind::Efficient, theta, mu2, mu3, mu4, fisher_info);
    return (v - eff) / eff;
}

std::string estimator_name(EstimatorId id) {
    switch (id) {
    case EstimatorId::Empirical: return "empirical";
    case EstimatorId::ImprovedEmpirical: return "improved-empirical";
    case EstimatorId::UstatLs: return "ustat-ls";
    case EstimatorId::UstatOneStep: return "ustat-onestep";
    case EstimatorId::SimpleEfficient: return "simple-efficient";
    }
    return "unknown";
}

StudyResult monte_carlo_study(const CoefficientModel& model, const InnovationSpec& spec,
                              const StudyConfig& config) {
    if (model.name() != "ar1")
        throw std::invalid_argument("monte_carlo_study: the comparison set is defined for ar1");
    if (config.theta0.size() != 1) throw std::invalid_argument("monte_carlo_study: theta0 must be scalar");
    const double theta0 = config.theta0[0];
    model.require_domain(config.theta0);

    const bool needs_score =
        std::any_of(config.estimators.begin(), config.estimators.end(), [](EstimatorId e) {
            return e == EstimatorId::UstatOneStep || e == EstimatorId::SimpleEfficient;
        });
    if (needs_score && !spec.has_score())
        throw std::invalid_argument("monte_carlo_study: one-step estimators need an innovation score");

    const SmoothFunction h = SmoothFunction::square();
    const ConstraintSpec psi = ConstraintSpec::identity();
    const int r = config.r >= 0 ? config.r : default_prehistory(config.n);

    const double mu2 = spec.moment(2);
    const double mu3 = spec.moment(3);
    const double mu4 = spec.moment(4);
    const std::optional<double> info =
        spec.has_score() ? std::optional<double>(spec.fisher_info()) : std::nullopt;

    StudyResult out;
    out.n = config.n;
    out.replications = config.replications;
    out.kappa_true = mu2 / (1.0 - theta0 * theta0);

    std::vector<MeanVar> acc(config.estimators.size());
    for (std::size_t rep = 0; rep < config.replications; ++rep) {
        rng::Stream path_stream = rng::derive(config.seed, "path", rep);
        const ProcessPath path = simulate(model, config.theta0, spec, config.n, r, path_stream);

        std::vector<double> values(config.estimators.size());
        bool ok = true;
        try {
            std::optional<double> theta_ls;
            std::optional<double> theta_os;
            auto ls = [&] {
                if (!theta_ls) theta_ls = least_squares_ar1(path);
                return *theta_ls;
            };
            auto os = [&] {
                if (!theta_os)
                    theta_os = one_step_efficient_ar1(path, ls(), spec, config.oracle_nuisance);
                return *theta_os;
            };
            for (std::size_t e = 0; e < config.estimators.size(); ++e) {
                switch (config.estimators[e]) {
                case EstimatorId::Empirical:
                    values[e] = empirical_estimator(path, h);
                    break;
                case EstimatorId::ImprovedEmpirical:
                    values[e] = improved_empirical_sigma2(path);
                    break;
                case EstimatorId::UstatLs:
                case EstimatorId::UstatOneStep: {
                    const bool onestep = config.estimators[e] == EstimatorId::UstatOneStep;
                    SubstitutionOptions opts;
                    opts.ustat = config.ustat;
                    opts.ustat.seed = rng::derive_seed(config.seed, onestep ? "tuples-os" : "tuples-ls", rep);
                    opts.theta_method = onestep ? ThetaMethod::OneStep : ThetaMethod::LeastSquares;
                    opts.spec = &spec;
                    const Theta th{onestep ? os() : ls()};
                    values[e] = substitution_estimate(path, model, th, h, psi, opts).kappa_hat;
                    break;
                }
                case EstimatorId::SimpleEfficient:
                    values[e] = simple_efficient_sigma2(path, os());
                    break;
                }
            }
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok) {
            ++out.failed;
            continue;
        }
        for (std::size_t e = 0; e < config.estimators.size(); ++e) acc[e].add(values[e]);
    }

    const auto target_of = [&](EstimatorId id) -> double {
        switch (id) {
        case EstimatorId::Empirical:
            return asymptotic_variance(VarianceKind::Empirical, theta0, mu2, mu3, mu4);
        case EstimatorId::ImprovedEmpirical:
            return asymptotic_variance(VarianceKind::Improved, theta0, mu2, mu3, mu4);
        case EstimatorId::UstatLs:
            return asymptotic_variance(VarianceKind::UstatLs, theta0, mu2, mu3, mu4);
        case EstimatorId::UstatOneStep:
        case EstimatorId::SimpleEfficient:
            if (!info) return std::nan("");
            return asymptotic_variance(VarianceKind::Efficient, theta0, mu2, mu3, mu4, info);
        }
        return std::nan("");
    };

    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        StudyRow row;
        row.estimator = estimator_name(config.estimators[e]);
        row.mean = acc[e].mean();
        row.bias = row.mean - out.kappa_true;
        row.n_var = static_cast<double>(config.n) * acc[e].variance();
        row.target = target_of(config.estimators[e]);
        row.rel_dev = std::isnan(row.target) ? std::nan("") : (row.n_var - row.target) / row.target;
        out.rows.push_back(std::move(row));
    }

    // Measured efficiency-loss ratios against the simple efficient
    // estimator (falling back to the one-step U-statistic) when available.
    const auto find_nvar = [&](EstimatorId id) -> std::optional<double> {
        for (std::size_t e = 0; e < config.estimators.size(); ++e)
            if (config.estimators[e] == id)
                return static_cast<double>(config.n) * acc[e].variance();
        return std::nullopt;
    };
    std::optional<double> eff = find_nvar(EstimatorId::SimpleEfficient);
    if (!eff) eff = find_nvar(EstimatorId::UstatOneStep);
    if (eff && info) {
        if (auto emp = find_nvar(EstimatorId::Empirical)) {
            out.ratios.push_back(
                {"ratio-empirical-vs-efficient", (*emp - *eff) / *eff,
                 relative_variance_increase(VarianceKind::Empirical, theta0, mu2, mu3, mu4, *info)});
        }
        if (auto imp = find_nvar(EstimatorId::ImprovedEmpirical)) {
            out.ratios.push_back(
                {"ratio-improved-vs-efficient", (*imp - *eff) / *eff,
                 relative_variance_increase(VarianceKind::Improved, theta0, mu2, mu3, mu4, *info)});
        }
    }
    return out;
}

void StudyResult::to_csv(std::ostream& os) const {
    os.precision(17);
    os << "estimator,mean,bias,n_var,target,rel_dev\n";
    for (const auto& row : rows)
        os << row.estimator << ',' << row.mean << ',' << row.bias << ',' << row.n_var << ','
           << row.target << ',' << row.rel_dev << '\n';
    for (const auto& ratio : ratios)
        os << ratio.name << ',' << ratio.measured << ",,," << ratio.target << ','
           << ratio.measured - ratio.target << '\n';
}

std::string StudyResult::to_json() const {
    nlohmann::json rows_j = nlohmann::json::array();
    for (const auto& row : rows)
        rows_j.push_back({{"estimator", row.estimator},
                          {"mean", row.mean},
                          {"bias", row.bias},
                          {"n_var", row.n_var},
                          {"target", row.target},
                          {"rel_dev", row.rel_dev}});
    nlohmann::json ratios_j = nlohmann::json::array();
    for (const auto& ratio : ratios)
        ratios_j.push_back(
            {{"name", ratio.name}, {"measured", ratio.measured}, {"target", ratio.target}});
    nlohmann::json j{{"n", n},
                     {"replications", replications},
                     {"failed", failed},
                     {"kappa_true", kappa_true},
                     {"rows", rows_j},
                     {"ratios", ratios_j}};
    return j.dump(2);
}

GradientCheck gradient_check(const InnovationSpec& spec, const CoefSeq& beta,
                             const SmoothFunction& h, const std::function<double(double)>& g,
                             std::vector<double> eps_grid, std::size_t mc, rng::Stream& stream,
                             std::size_t hstar_mc) {
    if (mc == 0) throw std::invalid_argument("gradient_check: mc must be positive");
    if (std::find(eps_grid.begin(), eps_grid.end(), 0.0) == eps_grid.end())
        eps_grid.push_back(0.0);
    std::sort(eps_grid.begin(), eps_grid.end());
    if (eps_grid.size() < 3)
        throw std::invalid_argument("gradient_check: need at least three eps values");

    int horizon = 1;
    while (horizon < 400 && beta.abs_tail_sum(horizon) > 1e-8) ++horizon;
    if (beta.finite_support()) horizon = beta.support();

    // kappa(P_eps) = E[h(S) prod_r (1 + eps g(X_r))] by reweighting with
    // common random numbers across the eps grid.
    std::vector<KahanSum> sums(eps_grid.size());
    std::vector<double> x(static_cast<std::size_t>(horizon));
    for (std::size_t draw = 0; draw < mc; ++draw) {
        KahanSum s;
        for (int r = 1; r <= horizon; ++r) {
            x[static_cast<std::size_t>(r - 1)] = spec.sample(stream);
            s.add(beta.value(r) * x[static_cast<std::size_t>(r - 1)]);
        }
        const double hs = h(s.value());
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            double w = 1.0;
            for (int r = 0; r < horizon; ++r) {
                const double f = 1.0 + eps_grid[e] * g(x[static_cast<std::size_t>(r)]);
                if (f <= 0.0)
                    throw std::domain_error("gradient_check: tilt weight nonpositive; shrink eps or bound g");
                w *= f;
            }
            sums[e].add(hs * w);
        }
    }

    GradientCheck out;
    out.eps = eps_grid;
    out.kappa_eps.resize(eps_grid.size());
    for (std::size_t e = 0; e < eps_grid.size(); ++e)
        out.kappa_eps[e] = sums[e].value() / static_cast<double>(mc);

    // least-squares quadratic fit kappa_eps ~ a + b eps + c eps^2
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        const double u = eps_grid[e];
        const double y = out.kappa_eps[e];
        s0 += 1;
        s1 += u;
        s2 += u * u;
        s3 += u * u * u;
        s4 += u * u * u * u;
        t0 += y;
        t1 += u * y;
        t2 += u * u * y;
    }
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) + s2 * (s1 * s3 - s2 * s2);
    if (std::abs(det) < 1e-30) throw std::domain_error("gradient_check: singular eps design");
    out.slope = (s0 * (t1 * s4 - t2 * s3) - t0 * (s1 * s4 - s2 * s3) + s2 * (s1 * t2 - t1 * s2)) / det;

    // Pairing target int h_* g dP: closed form h_* for quadratic h,
    // otherwise a Monte Carlo estimate of h_* pointwise.
    if (h.is_polynomial() && h.poly_coeffs().size() <= 3) {
        const auto& c = h.poly_coeffs();
        const double lin = c.size() > 1 ? c[1] : 0.0;
        const double quad = c.size() > 2 ? c[2] : 0.0;
        const double mu2 = spec.moment(2);
        KahanSum acc;
        const std::size_t tm = std::max<std::size_t>(mc, 1000000);
        for (std::size_t i = 0; i < tm; ++i) {
            const double xv = spec.sample(stream);
            acc.add((quad * beta.sum_sq() * (xv * xv - mu2) + lin * beta.sum() * xv) * g(xv));
        }
        out.target = acc.value() / static_cast<double>(tm);
    } else {
        const std::size_t outer = 400;
        KahanSum acc;
        for (std::size_t i = 0; i < outer; ++i) {
            const double xv = spec.sample(stream);
            acc.add(influence_h_star(spec, beta, h, xv, hstar_mc, stream) * g(xv));
        }
        out.target = acc.value() / static_cast<double>(outer);
    }
    out.rel_error = std::abs(out.slope - out.target) / std::max(1.0, std::abs(out.target));
    return out;
}

} // namespace linproc
