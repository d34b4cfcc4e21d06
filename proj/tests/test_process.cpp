#include <cmath>
#include <sstream>

#include "doctest.h"
#include "linproc/accumulate.hpp"
#include "linproc/process.hpp"

using namespace linproc;

TEST_CASE("named model coefficients match their closed forms") {
    const auto ar1 = CoefficientModel::ar1();
    const Theta t{0.5};
    CHECK(ar1.delta(t, 3) == doctest::Approx(0.125));
    CHECK(ar1.gamma_coef(t, 1) == doctest::Approx(-0.5));
    CHECK(ar1.gamma_coef(t, 2) == doctest::Approx(0.0));

    const auto ma1 = CoefficientModel::ma1();
    CHECK(ma1.delta(t, 1) == doctest::Approx(0.5));
    CHECK(ma1.delta(t, 2) == doctest::Approx(0.0));
    CHECK(ma1.gamma_coef(t, 3) == doctest::Approx(-0.125));

    const auto arma = CoefficientModel::arma11();
    const Theta u{0.6, 0.3};
    CHECK(arma.delta(u, 1) == doctest::Approx(0.3));
    CHECK(arma.delta(u, 3) == doctest::Approx(0.3 * 0.36));
    CHECK(arma.gamma_coef(u, 1) == doctest::Approx(-0.3));
    CHECK(arma.gamma_coef(u, 3) == doctest::Approx(-0.3 * 0.09));
}

TEST_CASE("coefficient gradients match finite differences") {
    const double step = 1e-5;
    for (int s : {1, 2, 5}) {
        for (const auto& [model, theta] :
             {std::pair{CoefficientModel::ar1(), Theta{0.5}},
              std::pair{CoefficientModel::ma1(), Theta{-0.4}},
              std::pair{CoefficientModel::arma11(), Theta{0.6, 0.3}}}) {
            CAPTURE(model.name());
            CAPTURE(s);
            for (int d = 0; d < model.dim(); ++d) {
                Theta up = theta, down = theta;
                up[d] += step;
                down[d] -= step;
                const double fd_delta = (model.delta(up, s) - model.delta(down, s)) / (2 * step);
                const double fd_gamma =
                    (model.gamma_coef(up, s) - model.gamma_coef(down, s)) / (2 * step);
                CHECK(model.delta_dot(theta, s)[d] == doctest::Approx(fd_delta).epsilon(1e-6));
                CHECK(model.gamma_dot(theta, s)[d] == doctest::Approx(fd_gamma).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("domain checks reject boundary parameters") {
    const auto ar1 = CoefficientModel::ar1();
    CHECK(ar1.in_domain({0.99}));
    CHECK_FALSE(ar1.in_domain({1.0}));
    CHECK_THROWS(ar1.require_domain({-1.2}));
    const auto arma = CoefficientModel::arma11();
    CHECK_FALSE(arma.in_domain({0.5, 0.5})); // parts cancel
}

TEST_CASE("AR(1) innovation recovery is exact for any prehistory") {
    const auto model = CoefficientModel::ar1();
    rng::Stream stream = rng::derive(5, "path");
    const auto path = simulate(model, {0.5}, InnovationSpec::centered_gamma(3.0), 300, 6, stream);
    REQUIRE(path.true_innovations.has_value());
    const auto rec = recover_innovations(path, model, {0.5});
    double ss = 0.0;
    for (std::size_t j = 0; j < rec.size(); ++j) {
        const double d = rec[j] - (*path.true_innovations)[j];
        ss += d * d;
    }
    CHECK(ss < 1e-20);
}

TEST_CASE("MA(1) recovery error decays with the prehistory length") {
    const auto model = CoefficientModel::ma1();
    rng::Stream stream = rng::derive(6, "path");
    const auto path = simulate(model, {0.5}, InnovationSpec::standard_normal(), 500, 30, stream);
    const auto sse = [&](int r) {
        ProcessPath sub;
        sub.r = r;
        sub.values.assign(path.values.begin() + (path.r - r), path.values.end());
        sub.true_innovations = path.true_innovations;
        double ss = 0.0;
        const auto rec = recover_innovations(sub, model, {0.5});
        for (std::size_t j = 0; j < rec.size(); ++j) {
            const double d = rec[j] - (*path.true_innovations)[j];
            ss += d * d;
        }
        return ss;
    };
    const double s2 = sse(2), s10 = sse(10), s25 = sse(25);
    CHECK(s10 < s2);
    CHECK(s25 < s10);
    CHECK(s25 < 1e-10);
}

TEST_CASE("simulated stationary second moment matches the closed form") {
    const auto model = CoefficientModel::ar1();
    rng::Stream stream = rng::derive(11, "path");
    const std::size_t n = 40000;
    const auto path = simulate(model, {0.5}, InnovationSpec::standard_normal(), n, 8, stream);
    MeanVar m;
    for (std::size_t j = 1; j <= n; ++j) m.add(path.y(long(j)) * path.y(long(j)));
    // E Y^2 = mu2 / (1 - theta^2) = 4/3; wide tolerance for serial dependence
    CHECK(std::abs(m.mean() - 4.0 / 3.0) < 8.0 * m.sd() / std::sqrt(double(n)));
}

TEST_CASE("prehistory default grows like (log n)^{1.1}") {
    CHECK(default_prehistory(2000) == int(std::ceil(std::pow(std::log(2000.0), 1.1))));
    CHECK(default_prehistory(100) >= 1);
}

TEST_CASE("path CSV round trip preserves values and indices") {
    const auto model = CoefficientModel::ma1();
    rng::Stream stream = rng::derive(3, "path");
    const auto path = simulate(model, {-0.3}, InnovationSpec::centered_uniform(1.0), 25, 4, stream);
    std::stringstream buf;
    buf << "# run.seed = 3\n"; // metadata comments must be tolerated
    path.to_csv(buf);
    const auto back = ProcessPath::from_csv(buf);
    REQUIRE(back.values.size() == path.values.size());
    CHECK(back.r == path.r);
    for (std::size_t i = 0; i < path.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(path.values[i]).epsilon(1e-15));
    REQUIRE(back.true_innovations.has_value());
    CHECK(back.true_innovations->size() == path.true_innovations->size());
}

TEST_CASE("xi vectors vanish at truncation zero and match a hand case") {
    const auto model = CoefficientModel::ar1();
    ProcessPath path;
    path.r = 2;
    path.values = {1.0, 2.0, 3.0, 4.0, 5.0}; // Y_-2..Y_2
    const auto xi0 = xi_vectors(path, model, {0.5}, 0);
    for (const auto& v : xi0) CHECK(v[0] == doctest::Approx(0.0));
    // AR1: gamma_dot_1 = -1, gamma_dot_s = 0 for s >= 2, so xi_j = -Y_{j-1}
    const auto xi1 = xi_vectors(path, model, {0.5}, 1);
    CHECK(xi1[0][0] == doctest::Approx(-3.0));
    CHECK(xi1[1][0] == doctest::Approx(-4.0));
}
