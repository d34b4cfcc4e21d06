// Acceptance suite: one criterion per invocation (argv[1] = 1..12),
// printing a single PASS/FAIL line with the measured numbers.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "linproc/accumulate.hpp"
#include "linproc/constrained.hpp"
#include "linproc/innovations.hpp"
#include "linproc/plugin.hpp"
#include "linproc/process.hpp"
#include "linproc/rng.hpp"
#include "linproc/smooth_function.hpp"
#include "linproc/study.hpp"
#include "linproc/ustat.hpp"

using namespace linproc;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// ---------------------------------------------------------------- helpers

double rel_dev(double measured, double target) {
    return std::abs(measured - target) / std::abs(target);
}

StudyResult headline_study(const InnovationSpec& spec, std::uint64_t seed) {
    StudyConfig config;
    config.theta0 = {0.5};
    config.n = 2000;
    config.replications = 1000;
    config.seed = seed;
    return monte_carlo_study(CoefficientModel::ar1(), spec, config);
}

const StudyRow& row(const StudyResult& result, const std::string& name) {
    for (const auto& r : result.rows)
        if (r.estimator == name) return r;
    throw std::runtime_error("missing study row: " + name);
}

// -------------------------------------------------------------- criteria

// 1: incomplete mode agrees with exact enumeration on random tiny instances
Outcome criterion1() {
    Outcome out;
    rng::Stream stream = rng::derive(101, "instances");
    const SmoothFunction h = SmoothFunction::square();
    double worst_z = 0.0, worst_forced = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + stream.bounded(5); // 4..8
        const std::size_t m = 2 + stream.bounded(2); // 2..3
        std::vector<double> X(n), beta(m);
        for (auto& v : X) v = stream.normal();
        beta[0] = 1.0;
        for (std::size_t r = 1; r < m; ++r) beta[r] = stream.uniform() * 2.0 - 1.0;

        const auto exact = ustat_exact(X, beta, h);
        const auto inc = ustat_incomplete(X, beta, h, 100000, 1000 + std::uint64_t(trial));
        const double tol = 4.0 * inc.sampling_se + 1e-12;
        worst_z = std::max(worst_z, std::abs(inc.kappa_tilde - exact.kappa_tilde) /
                                        std::max(inc.sampling_se, 1e-300));
        out.require(std::abs(inc.kappa_tilde - exact.kappa_tilde) <= tol,
                    "sampled vs exact at trial " + std::to_string(trial));

        const auto forced = ustat_incomplete(X, beta, h, 0, 1, 1, true);
        worst_forced = std::max(worst_forced, std::abs(forced.kappa_tilde - exact.kappa_tilde));
        out.require(std::abs(forced.kappa_tilde - exact.kappa_tilde) <=
                        1e-12 * std::max(1.0, std::abs(exact.kappa_tilde)),
                    "forced enumeration at trial " + std::to_string(trial));
    }
    out.detail << "worst |z| = " << worst_z << ", worst forced dev = " << worst_forced;
    return out;
}

// 2: E kappa_tilde = E h(S^(m)) (unbiasedness of the truncated U-statistic)
Outcome criterion2() {
    Outcome out;
    const SmoothFunction h = SmoothFunction::square();
    const std::vector<double> beta{1.0, 0.5, 0.25};
    const auto spec = InnovationSpec::standard_normal();

    MeanVar reps;
    for (std::uint64_t rep = 0; rep < 10000; ++rep) {
        rng::Stream stream = rng::derive(202, "rep", rep);
        const auto X = spec.sample(30, stream);
        reps.add(ustat_exact(X, beta, h).kappa_tilde);
    }
    MeanVar mc;
    rng::Stream stream = rng::derive(202, "mc");
    for (std::size_t i = 0; i < 1000000; ++i) {
        const double s = spec.sample(stream) + 0.5 * spec.sample(stream) +
                         0.25 * spec.sample(stream);
        mc.add(h(s));
    }
    const double se = std::sqrt(reps.variance() / 10000.0 + mc.variance() / 1000000.0);
    const double diff = std::abs(reps.mean() - mc.mean());
    out.detail << "mean kappa = " << reps.mean() << ", MC E[h(S)] = " << mc.mean()
               << ", |diff|/se = " << diff / se;
    out.require(diff <= 4.0 * se, "4 combined SE");
    return out;
}

// 3: influence function closed form (x^2 - 1)/(1 - theta^2)
Outcome criterion3() {
    Outcome out;
    const auto spec = InnovationSpec::standard_normal();
    const auto beta = CoefSeq::ar1_powers(0.5);
    const SmoothFunction h = SmoothFunction::square();
    for (double x : {-2.0, 0.0, 1.0, 3.0}) {
        rng::Stream stream = rng::derive(303, "influence", std::uint64_t(int(x) + 10));
        const double got = influence_h_star(spec, beta, h, x, 1000000, stream);
        const double want = (x * x - 1.0) / 0.75;
        // 2% relative, with an absolute floor matching the grid's scale
        const double tol = 0.02 * std::max(std::abs(want), 1.0);
        out.detail << "x=" << x << ": " << got << " vs " << want << "; ";
        out.require(std::abs(got - want) <= tol, "x = " + std::to_string(x));
    }
    return out;
}

// 4: a*-hat consistency on known innovations.  A single draw of a*-hat
// carries sixth-moment noise (relative sd ~ 20% at n = 8000), so the 5%
// comparison targets the replication mean.
Outcome criterion4() {
    Outcome out;
    const auto spec = InnovationSpec::centered_gamma(3.0);
    const std::size_t n = 8000;
    const auto seq = CoefSeq::ar1_powers(0.5);
    const int m = choose_m(n, seq);
    const std::uint64_t B = 200 * std::uint64_t(n) * std::uint64_t(m);

    MeanVar acc;
    bool reliable = true;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        rng::Stream stream = rng::derive(404, "x", rep);
        const auto X = spec.sample(n, stream);
        const auto result = ustat_incomplete(X, seq.first(m), SmoothFunction::square(), B,
                                             rng::derive_seed(404, "tuples", rep));
        const auto a = a_star_hat(X, result, ConstraintSpec::identity());
        acc.add(a.value);
        reliable = reliable && a.reliable;
    }
    out.detail << "m=" << m << ", B=" << B << ", mean a*-hat over 50 reps = " << acc.mean()
               << " +- " << acc.sd() / std::sqrt(50.0) << " vs 8/3, rel dev = "
               << rel_dev(acc.mean(), 8.0 / 3.0);
    out.require(rel_dev(acc.mean(), 8.0 / 3.0) <= 0.05, "within 5% of 8/3");
    out.require(reliable, "bucket coverage");
    return out;
}

// 5: headline variance table and measured ordering
Outcome criterion5() {
    Outcome out;
    const auto result = headline_study(InnovationSpec::centered_gamma(3.0), 11);
    const double emp = row(result, "empirical").n_var;
    const double imp = row(result, "improved-empirical").n_var;
    const double uls = row(result, "ustat-ls").n_var;
    const double eff = row(result, "simple-efficient").n_var;
    out.detail << "n_var = " << emp << "/" << imp << "/" << uls << "/" << eff
               << " vs 85.33/64/64/49.78, failed reps = " << result.failed;

    out.require(rel_dev(emp, 256.0 / 3.0) <= 0.15, "empirical within 15%");
    out.require(rel_dev(imp, 64.0) <= 0.15, "improved within 15%");
    out.require(rel_dev(uls, 64.0) <= 0.15, "ustat-ls within 15%");
    out.require(rel_dev(eff, 448.0 / 9.0) <= 0.15, "simple-efficient within 15%");

    // ordering with gaps beyond MC noise where the closed-form gaps differ;
    // improved and ustat-ls share a target, so only closeness is required
    out.require(emp - imp > 0.3 * (256.0 / 3.0 - 64.0), "empirical > improved gap");
    out.require(imp - eff > 0.3 * (64.0 - 448.0 / 9.0), "improved > efficient gap");
    out.require(std::abs(imp - uls) <= 0.15 * 64.0, "improved vs ustat-ls closeness");
    out.require(result.failed <= 5, "failed replications");
    return out;
}

// 6: measured relative variance increases
Outcome criterion6() {
    Outcome out;
    const auto result = headline_study(InnovationSpec::centered_gamma(3.0), 11);
    double emp_ratio = 0.0, imp_ratio = 0.0;
    for (const auto& r : result.ratios) {
        if (r.name == "ratio-empirical-vs-efficient") emp_ratio = r.measured;
        if (r.name == "ratio-improved-vs-efficient") imp_ratio = r.measured;
    }
    out.detail << "ratios = " << emp_ratio << "/" << imp_ratio << " vs 0.714/0.286";
    out.require(std::abs(emp_ratio - 15.0 / 21.0) <= 0.10, "empirical ratio within 0.10");
    out.require(std::abs(imp_ratio - 6.0 / 21.0) <= 0.10, "improved ratio within 0.10");
    return out;
}

// 7: normal innovations collapse all variances to one value
Outcome criterion7() {
    Outcome out;
    const auto result = headline_study(InnovationSpec::standard_normal(), 707);
    const double target = (3.0 - 1.0 + 4.0 * 0.25 / 0.75) / (0.75 * 0.75); // 5.926
    const std::vector<std::string> names{"empirical", "improved-empirical", "ustat-ls",
                                         "simple-efficient"};
    std::vector<double> v;
    for (const auto& name : names) {
        v.push_back(row(result, name).n_var);
        out.detail << name << "=" << v.back() << " ";
        out.require(rel_dev(v.back(), target) <= 0.15, name + " within 15% of 5.926");
    }
    // the three corrected estimators agree among themselves
    for (std::size_t i = 1; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            out.require(std::abs(v[i] - v[j]) <= 0.10 * target,
                        names[i] + " vs " + names[j] + " within MC noise");
    return out;
}

// 8: stochastic equivalence of the substitution and simple efficient estimators
Outcome criterion8() {
    Outcome out;
    const auto model = CoefficientModel::ar1();
    const auto spec = InnovationSpec::centered_gamma(3.0);
    const SmoothFunction h = SmoothFunction::square();
    const auto psi = ConstraintSpec::identity();

    const auto median_diff = [&](std::size_t n, std::uint64_t tag) {
        std::vector<double> d;
        const int r = default_prehistory(n);
        for (std::uint64_t rep = 0; rep < 100; ++rep) {
            rng::Stream stream = rng::derive(808 + tag, "path", rep);
            const auto path = simulate(model, {0.5}, spec, n, r, stream);
            const double ls = least_squares_ar1(path);
            SubstitutionOptions opts;
            opts.ustat.B = 2000 * std::uint64_t(n); // noise floor scales as 1/sqrt(B/n)
            opts.ustat.seed = rng::derive_seed(808 + tag, "tuples", rep);
            opts.theta_method = ThetaMethod::LeastSquares;
            opts.spec = &spec;
            const auto rep_out = substitution_estimate(path, model, {ls}, h, psi, opts);
            const double simple = simple_efficient_sigma2(path, ls);
            d.push_back(std::sqrt(double(n)) * std::abs(rep_out.kappa_hat - simple));
        }
        std::nth_element(d.begin(), d.begin() + 50, d.end());
        return d[50];
    };

    const double med_small = median_diff(500, 0);
    const double med_large = median_diff(8000, 1);
    out.detail << "median sqrt(n)|diff|: n=500 -> " << med_small << ", n=8000 -> " << med_large;
    out.require(med_large < med_small, "median decreases from n=500 to n=8000");
    return out;
}

// 9: truncated innovation recovery error, decreasing in r, below thresholds
Outcome criterion9() {
    Outcome out;
    struct Case {
        CoefficientModel model;
        Theta theta;
        double thresh_small, thresh_large;
    };
    const std::vector<Case> cases{
        {CoefficientModel::ar1(), {0.5}, 1e-16, 1e-16},
        {CoefficientModel::ma1(), {0.5}, 5.0, 1e-8},
        {CoefficientModel::arma11(), {0.6, 0.3}, 5.0, 1e-6},
    };
    const std::size_t n = 2000;
    for (const auto& c : cases) {
        rng::Stream stream = rng::derive(909, c.model.name());
        const auto path = simulate(c.model, c.theta, InnovationSpec::standard_normal(), n, 25, stream);
        const auto sse_at = [&](int r) {
            ProcessPath sub;
            sub.r = r;
            sub.values.assign(path.values.begin() + (25 - r), path.values.end());
            const auto rec = recover_innovations(sub, c.model, c.theta);
            KahanSum ss;
            for (std::size_t j = 0; j < rec.size(); ++j) {
                const double d = rec[j] - (*path.true_innovations)[j];
                ss.add(d * d);
            }
            return ss.value();
        };
        const double s2 = sse_at(2), s8 = sse_at(8), s25 = sse_at(25);
        out.detail << c.model.name() << ": SSE(r=2,8,25) = " << s2 << "/" << s8 << "/" << s25
                   << "; ";
        out.require(s8 <= s2 + 1e-12, c.model.name() + " SSE decreasing r=2->8");
        out.require(s25 <= s8 + 1e-12, c.model.name() + " SSE decreasing r=8->25");
        out.require(s2 <= c.thresh_small, c.model.name() + " SSE(r=2) threshold");
        out.require(s25 <= c.thresh_large, c.model.name() + " SSE(r=25) threshold");
    }
    return out;
}

// 10: slot-sum identity against full conditional enumeration of the
//     symmetrized kernel with one argument pinned
Outcome criterion10() {
    Outcome out;
    rng::Stream stream = rng::derive(1010, "instances");
    const SmoothFunction h = SmoothFunction::square();
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + stream.bounded(4); // 4..7
        const std::size_t m = 2 + stream.bounded(2); // 2..3
        std::vector<double> X(n), beta(m);
        for (auto& v : X) v = stream.normal();
        beta[0] = 1.0;
        for (std::size_t r = 1; r < m; ++r) beta[r] = stream.uniform() * 2.0 - 1.0;

        const auto exact = ustat_exact(X, beta, h);
        for (std::size_t j = 1; j <= n; ++j) {
            // average of the symmetrized kernel over all injective
            // (m-1)-tuples from the remaining points, argument 1 = X_j
            std::vector<double> args(m);
            args[0] = X[j - 1];
            std::vector<std::size_t> pick(m - 1);
            double sum = 0.0;
            std::size_t count = 0;
            const std::function<void(std::size_t)> rec = [&](std::size_t depth) {
                if (depth == m - 1) {
                    for (std::size_t r = 0; r + 1 < m; ++r) args[r + 1] = X[pick[r]];
                    sum += kernel(args, beta, h);
                    ++count;
                    return;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == j - 1) continue;
                    bool taken = false;
                    for (std::size_t q = 0; q < depth; ++q)
                        if (pick[q] == i) taken = true;
                    if (taken) continue;
                    pick[depth] = i;
                    rec(depth + 1);
                }
            };
            rec(0);
            const double rhs = double(m) * sum / double(count);
            const double dev = std::abs(exact.slot_sum(j) - rhs) /
                               std::max(1.0, std::abs(rhs));
            worst = std::max(worst, dev);
            out.require(dev <= 1e-10, "identity at trial " + std::to_string(trial) + ", j = " +
                                          std::to_string(j));
        }
    }
    out.detail << "worst relative deviation = " << worst;
    return out;
}

// 11: gradient of the functional along two bounded directions
Outcome criterion11() {
    Outcome out;
    const auto spec = InnovationSpec::standard_normal();
    const auto beta = CoefSeq::ar1_powers(0.5);
    const SmoothFunction h = SmoothFunction::square();

    const auto run = [&](const char* name, const std::function<double(double)>& raw,
                         std::uint64_t tag) {
        rng::Stream cstream = rng::derive(1111, "center", tag);
        double center = 0.0;
        for (std::size_t i = 0; i < 2000000; ++i) center += raw(spec.sample(cstream));
        center /= 2000000.0;
        const auto g = [&raw, center](double x) { return raw(x) - center; };
        rng::Stream stream = rng::derive(1111, "gradient", tag);
        const auto check =
            gradient_check(spec, beta, h, g, {0.02, 0.04, 0.06, 0.08, 0.10}, 400000, stream);
        out.detail << name << ": slope " << check.slope << " vs " << check.target
                   << " (rel err " << check.rel_error << "); ";
        out.require(check.rel_error <= 0.10, std::string(name) + " within 10%");
    };
    run("square-clipped", [](double x) { return std::min(x * x, 4.0); }, 0);
    run("abs-clipped", [](double x) { return std::min(std::abs(x), 3.0); }, 1);
    return out;
}

// 12: byte-identical study CSV under a repeated run
Outcome criterion12() {
    Outcome out;
    StudyConfig config;
    config.theta0 = {0.5};
    config.n = 200;
    config.replications = 20;
    config.seed = 1212;
    config.ustat.partitions = 2;
    const auto model = CoefficientModel::ar1();
    const auto spec = InnovationSpec::centered_gamma(3.0);

    std::ostringstream a, b;
    monte_carlo_study(model, spec, config).to_csv(a);
    monte_carlo_study(model, spec, config).to_csv(b);
    out.detail << "csv bytes = " << a.str().size();
    out.require(!a.str().empty(), "nonempty CSV");
    out.require(a.str() == b.str(), "byte-identical CSV");
    return out;
}

const char* label(int criterion) {
    switch (criterion) {
    case 1: return "exact-oracle equivalence of incomplete sampling";
    case 2: return "unbiasedness of the truncated U-statistic";
    case 3: return "influence function closed form";
    case 4: return "a*-hat consistency";
    case 5: return "headline variance table and ordering";
    case 6: return "relative variance increase ratios";
    case 7: return "normal-case efficiency boundary";
    case 8: return "stochastic equivalence to the simple efficient estimator";
    case 9: return "truncated innovation recovery";
    case 10: return "slot-sum identity by conditional enumeration";
    case 11: return "functional gradient along bounded directions";
    case 12: return "deterministic study artifacts";
    }
    return "unknown";
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1..12>\n";
        return 2;
    }
    const int criterion = std::atoi(argv[1]);
    Outcome out;
    switch (criterion) {
    case 1: out = criterion1(); break;
    case 2: out = criterion2(); break;
    case 3: out = criterion3(); break;
    case 4: out = criterion4(); break;
    case 5: out = criterion5(); break;
    case 6: out = criterion6(); break;
    case 7: out = criterion7(); break;
    case 8: out = criterion8(); break;
    case 9: out = criterion9(); break;
    case 10: out = criterion10(); break;
    case 11: out = criterion11(); break;
    case 12: out = criterion12(); break;
    default:
        std::cerr << "usage: acceptance <criterion 1..12>\n";
        return 2;
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << criterion << ": "
              << label(criterion) << " — " << out.detail.str() << '\n';
    return out.pass ? 0 : 1;
}
