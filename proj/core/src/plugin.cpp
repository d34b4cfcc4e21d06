#include "linproc/plugin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "linproc/accumulate.hpp"

namespace linproc {

namespace {

double autocov(const ProcessPath& path, int lag) {
    const auto n = static_cast<long>(path.n());
    KahanSum s;
    for (long j = lag + 1; j <= n; ++j) s.add(path.y(j - lag) * path.y(j));
    return s.value() / static_cast<double>(n);
}

double clip_scalar(double v, double lim, const char* what, std::vector<std::string>* warnings) {
    if (std::abs(v) < lim) return v;
    if (warnings)
        warnings->push_back(std::string(what) + " estimate " + std::to_string(v) +
                            " clipped into the domain interior");
    return std::copysign(lim, v);
}

Theta clip_to_domain(const CoefficientModel& model, const Theta& theta,
                     std::vector<std::string>* warnings) {
    if (model.in_domain(theta)) return theta;
    Theta out = theta;
    if (model.name() == "ar1" || model.name() == "ma1") {
        out[0] = clip_scalar(out[0], 1.0 - 1e-3, model.name().c_str(), warnings);
    } else if (model.name() == "arma11") {
        out[0] = clip_scalar(out[0], 1.0 - 1e-3, "arma11 ar part", warnings);
        out[1] = clip_scalar(out[1], 1.0 - 1e-3, "arma11 ma part", warnings);
        if (std::abs(out[0] - out[1]) < 1e-6) {
            out[1] = out[0] - 1e-5;
            if (std::abs(out[1]) >= 1.0 - 1e-3) out[1] = out[0] + 1e-5;
            if (warnings) warnings->push_back("arma11 parts nearly cancel; ma part nudged");
        }
    } else {
        throw std::invalid_argument("clip_to_domain: estimate outside the domain of custom model " +
                                    model.name());
    }
    model.require_domain(out);
    return out;
}

} // namespace

double least_squares_ar1(const ProcessPath& path) {
    const auto n = static_cast<long>(path.n());
    KahanSum num, den;
    for (long j = 1; j <= n; ++j) {
        num.add(path.y(j - 1) * path.y(j));
        den.add(path.y(j - 1) * path.y(j - 1));
    }
    if (den.value() <= 0.0) throw std::domain_error("least_squares_ar1: degenerate path");
    return num.value() / den.value();
}

Theta estimate_theta(const ProcessPath& path, const CoefficientModel& model, ThetaMethod method,
                     std::vector<std::string>* warnings) {
    if (method == ThetaMethod::OneStep)
        throw std::invalid_argument("estimate_theta: use one_step_efficient_ar1 for the one-step update");
    if (method == ThetaMethod::None)
        throw std::invalid_argument("estimate_theta: no method requested");

    if (model.name() == "ar1")
        return clip_to_domain(model, {least_squares_ar1(path)}, warnings);

    if (model.name() == "ma1") {
        const double c0 = autocov(path, 0);
        if (c0 <= 0.0) throw std::domain_error("estimate_theta: degenerate path");
        const double rho = autocov(path, 1) / c0;
        if (std::abs(rho) > 0.5)
            throw std::domain_error("estimate_theta: ma1 lag-1 autocorrelation " +
                                    std::to_string(rho) + " has no real root");
        // rho = theta / (1 + theta^2), invertible branch |theta| <= 1
        const double theta =
            rho == 0.0 ? 0.0 : (1.0 - std::sqrt(1.0 - 4.0 * rho * rho)) / (2.0 * rho);
        return clip_to_domain(model, {theta}, warnings);
    }

    if (model.name() == "arma11") {
        const double c0 = autocov(path, 0);
        const double c1 = autocov(path, 1);
        const double c2 = autocov(path, 2);
        if (c0 <= 0.0 || std::abs(c1) < 1e-12 * c0)
            throw std::domain_error("estimate_theta: arma11 lag-1 autocovariance too small");
        // c_k = theta1 * c_{k-1} for k >= 2
        const double t1 = clip_scalar(c2 / c1, 1.0 - 1e-3, "arma11 ar part", warnings);
        // With b = theta1 - theta2 and k = 1/(1 - theta1^2):
        //   c1/c0 = (b + theta1 k b^2) / (1 + k b^2),
        // a quadratic k (g - theta1) b^2 - b + g = 0 in b.
        const double g = c1 / c0;
        const double k = 1.0 / (1.0 - t1 * t1);
        const double q = k * (g - t1);
        double b;
        if (std::abs(q) < 1e-10) {
            b = g;
        } else {
            const double disc = 1.0 - 4.0 * q * g;
            if (disc < 0.0)
                throw std::domain_error("estimate_theta: arma11 moment equations have no real root");
            b = (1.0 - std::sqrt(disc)) / (2.0 * q); // branch continuous at q -> 0
        }
        Theta theta{t1, t1 - b};
        if (!model.in_domain(theta)) return clip_to_domain(model, theta, warnings);
        return theta;
    }

    throw std::invalid_argument("estimate_theta: no built-in method for model " + model.name());
}

double one_step_efficient_ar1(const ProcessPath& path, double theta_init,
                              const InnovationSpec& spec, bool oracle_nuisance) {
    if (!spec.has_score())
        throw std::invalid_argument("one_step_efficient_ar1: innovation law has no smooth score");
    const auto n = static_cast<long>(path.n());
    std::vector<double> resid(static_cast<std::size_t>(n));
    for (long j = 1; j <= n; ++j)
        resid[static_cast<std::size_t>(j - 1)] = path.y(j) - theta_init * path.y(j - 1);

    double mu2, info;
    if (oracle_nuisance) {
        mu2 = spec.moment(2);
        info = spec.fisher_info();
    } else {
        KahanSum s2, si;
        for (double e : resid) {
            s2.add(e * e);
            const double l = spec.score(e);
            si.add(l * l);
        }
        mu2 = s2.value() / static_cast<double>(n);
        info = si.value() / static_cast<double>(n);
    }
    if (mu2 <= 0.0 || info <= 0.0)
        throw std::domain_error("one_step_efficient_ar1: degenerate nuisance estimates");

    // The score of a law with bounded support (e.g. centered gamma) diverges
    // at the boundary, and residuals at an estimated theta can cross it.
    // Clipping at +-sqrt(n) leaves the update asymptotically unchanged while
    // keeping a single crossed residual from dominating the sum.
    const double lmax = std::sqrt(static_cast<double>(n));
    KahanSum s;
    for (long j = 1; j <= n; ++j) {
        const double l = spec.score(resid[static_cast<std::size_t>(j - 1)]);
        s.add(path.y(j - 1) * std::clamp(l, -lmax, lmax));
    }
    const double theta = theta_init -
                         (1.0 - theta_init * theta_init) / (static_cast<double>(n) * mu2 * info) *
                             s.value();
    return std::clamp(theta, -1.0 + 1e-6, 1.0 - 1e-6);
}

namespace {

// Series weights alpha_r = delta_{r-1}(theta) as a CoefSeq.
CoefSeq alpha_weights(const CoefficientModel& model, const Theta& theta, int head_len) {
    if (model.name() == "ar1") return CoefSeq::ar1_powers(theta[0], head_len);
    if (model.name() == "ma1") return CoefSeq::finite({1.0, theta[0]});
    std::vector<double> head(static_cast<std::size_t>(head_len));
    head[0] = 1.0;
    for (int s = 1; s < head_len; ++s)
        head[static_cast<std::size_t>(s)] = model.delta(theta, s);
    const Tail tail = model.tail_at(theta);
    // |alpha_r| = |delta_{r-1}| <= tail.c * tail.a^{r-1} = (tail.c / tail.a) * tail.a^r
    return CoefSeq::with_tail(std::move(head), tail.c / tail.a, tail.a);
}

// Gradient of kappa(theta) = E h(Y_0): mean of h'(Y_j) * Ydot_j with
// Ydot_j = sum_s delta_dot_s(theta) X_{j-s} built from recovered innovations.
Theta kappa_gradient(const ProcessPath& path, const CoefficientModel& model, const Theta& theta,
                     const SmoothFunction& h, const std::vector<double>& X) {
    const auto n = static_cast<long>(path.n());
    const Tail tail = model.tail_at(theta);
    int L = 1;
    while (L < 200 && tail.c * std::pow(tail.a, L + 1) / (1.0 - tail.a) > 1e-8) ++L;
    L = std::min<long>(L, n - 2) > 0 ? static_cast<int>(std::min<long>(L, n - 2)) : 1;

    const auto grads = model.coefficient_grads(theta, CoefKind::DeltaDot, L);
    Theta grad(static_cast<std::size_t>(model.dim()), 0.0);
    long count = 0;
    for (long j = L + 1; j <= n; ++j) {
        const double hp = h.deriv(path.y(j));
        for (int s = 1; s <= L; ++s) {
            const double x = X[static_cast<std::size_t>(j - s - 1)];
            const Theta& ds = grads[static_cast<std::size_t>(s - 1)];
            for (int d = 0; d < model.dim(); ++d)
                grad[static_cast<std::size_t>(d)] += hp * ds[static_cast<std::size_t>(d)] * x;
        }
        ++count;
    }
    if (count > 0)
        for (double& g : grad) g /= static_cast<double>(count);
    return grad;
}

} // namespace

EstimateReport substitution_estimate(const ProcessPath& path, const CoefficientModel& model,
                                     const Theta& theta_hat, const SmoothFunction& h,
                                     const ConstraintSpec& psi, const SubstitutionOptions& opts) {
    const std::size_t n = path.n();
    if (n < 8) throw std::invalid_argument("substitution_estimate: path too short");
    if (static_cast<int>(theta_hat.size()) != model.dim())
        throw std::invalid_argument("substitution_estimate: theta dimension mismatch");

    EstimateReport rep;
    rep.r = path.r;

    const Theta theta = clip_to_domain(model, theta_hat, &rep.diagnostics.rate_warnings);
    rep.theta_hat = theta;

    const std::vector<double> X = recover_innovations(path, model, theta);

    const int head_len = std::max(64, opts.ustat.m + 1);
    const CoefSeq alpha = alpha_weights(model, theta, head_len);
    const int m = opts.ustat.m > 0
                      ? opts.ustat.m
                      : choose_m(n, alpha, opts.choose_m_c, opts.choose_m_eps,
                                 &rep.diagnostics.rate_warnings);
    rep.m = m;

    const auto beta = alpha.first(m);
    UStatResult result;
    if (opts.ustat.mode == UStatMode::Exact) {
        result = ustat_exact(X, beta, h, opts.ustat.enumeration_cap);
        rep.B = result.tuples_used;
    } else {
        const std::uint64_t B =
            opts.ustat.B > 0 ? opts.ustat.B : 200 * static_cast<std::uint64_t>(n) * m;
        result = ustat_incomplete(X, beta, h, B, opts.ustat.seed, opts.ustat.partitions);
        rep.B = B;
    }
    rep.kappa_tilde = result.kappa_tilde;

    const AStarHat a = a_star_hat(X, result, psi);
    rep.a_star = a.value;
    rep.diagnostics.empty_bucket_fraction = a.empty_bucket_fraction;
    if (!a.reliable)
        rep.diagnostics.rate_warnings.push_back(
            "more than 1% of the H buckets are empty; increase B");
    rep.kappa_hat = constrained_estimate(result, a.value, X, psi);

    if (opts.spec) rep.diagnostics.truncation_bound = truncation_bound(alpha, h, *opts.spec, m);
    if (path.true_innovations) {
        KahanSum ss;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = X[j] - (*path.true_innovations)[j];
            ss.add(d * d);
        }
        rep.diagnostics.innovation_ss_resid = ss.value();
    }

    // Plug-in standard error from the estimated influence values
    //   inf_j = sum_r (H_{r,j} - kappa_tilde) - a* psi(X_j) + grad . w_j,
    // where w_j is the influence of theta_hat for the declared method.
    double mu2_hat, info_hat = 0.0;
    {
        KahanSum s2;
        for (double x : X) s2.add(x * x);
        mu2_hat = s2.value() / static_cast<double>(n);
    }
    const bool ar1_w = model.name() == "ar1" && (opts.theta_method == ThetaMethod::LeastSquares ||
                                                 opts.theta_method == ThetaMethod::OneStep);
    Theta grad;
    if (ar1_w) {
        grad = kappa_gradient(path, model, theta, h, X);
        if (opts.theta_method == ThetaMethod::OneStep) {
            if (!opts.spec || !opts.spec->has_score())
                throw std::invalid_argument(
                    "substitution_estimate: one-step w needs an innovation spec with a score");
            info_hat = opts.spec->fisher_info();
            if (opts.spec) mu2_hat = opts.spec->moment(2);
        }
    } else if (opts.theta_method != ThetaMethod::None) {
        rep.diagnostics.rate_warnings.push_back(
            "se_plugin omits the parameter-estimation term for model " + model.name());
    }

    MeanVar inf;
    const double mkappa = static_cast<double>(m) * result.kappa_tilde;
    for (std::size_t j = 1; j <= n; ++j) {
        double v = result.slot_sum(j) - mkappa - a.value * psi.psi(X[j - 1]);
        if (ar1_w) {
            const double yprev = path.y(static_cast<long>(j) - 1);
            const double scale = 1.0 - theta[0] * theta[0];
            double w;
            if (opts.theta_method == ThetaMethod::LeastSquares)
                w = scale / mu2_hat * yprev * X[j - 1];
            else {
                const double lmax = std::sqrt(static_cast<double>(n));
                const double l = std::clamp(opts.spec->score(X[j - 1]), -lmax, lmax);
                w = -scale / (mu2_hat * info_hat) * yprev * l;
            }
            v += grad[0] * w;
        }
        inf.add(v);
    }
    rep.se_plugin = inf.sd() / std::sqrt(static_cast<double>(n));
    return rep;
}

std::string EstimateReport::to_json() const {
    nlohmann::json j{
        {"kappa_hat", kappa_hat},
        {"kappa_tilde", kappa_tilde},
        {"theta_hat", theta_hat},
        {"a_star", a_star},
        {"se_plugin", se_plugin},
        {"m", m},
        {"r", r},
        {"B", B},
        {"diagnostics",
         {{"innovation_ss_resid", diagnostics.innovation_ss_resid},
          {"empty_bucket_fraction", diagnostics.empty_bucket_fraction},
          {"truncation_bound", diagnostics.truncation_bound},
          {"rate_warnings", diagnostics.rate_warnings}}},
    };
    return j.dump(2);
}

std::string EstimateReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << kappa_hat << ',' << a_star << ',' << se_plugin << ',' << m << ',' << r << ',' << B;
    return os.str();
}

} // namespace linproc
