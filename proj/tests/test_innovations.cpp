#include <cmath>

#include "doctest.h"
#include "linproc/accumulate.hpp"
#include "linproc/innovations.hpp"

using namespace linproc;

TEST_CASE("exact moments match hand-computed values") {
    // centered Gamma(k): mu2 = k, mu3 = 2k, mu4 = 3k^2 + 6k
    const auto gamma = InnovationSpec::centered_gamma(3.0);
    CHECK(gamma.moment(1) == doctest::Approx(0.0));
    CHECK(gamma.moment(2) == doctest::Approx(3.0));
    CHECK(gamma.moment(3) == doctest::Approx(6.0));
    CHECK(gamma.moment(4) == doctest::Approx(45.0));

    const auto normal = InnovationSpec::standard_normal();
    CHECK(normal.moment(2) == doctest::Approx(1.0));
    CHECK(normal.moment(3) == doctest::Approx(0.0));
    CHECK(normal.moment(4) == doctest::Approx(3.0));

    // Laplace(b): 2b^2, 0, 24b^4
    const auto laplace = InnovationSpec::centered_laplace(0.5);
    CHECK(laplace.moment(2) == doctest::Approx(0.5));
    CHECK(laplace.moment(3) == doctest::Approx(0.0));
    CHECK(laplace.moment(4) == doctest::Approx(1.5));

    // Uniform(-w, w): w^2/3, 0, w^4/5
    const auto uniform = InnovationSpec::centered_uniform(2.0);
    CHECK(uniform.moment(2) == doctest::Approx(4.0 / 3.0));
    CHECK(uniform.moment(4) == doctest::Approx(16.0 / 5.0));

    // two-point p=0.25, hi=3 -> lo=-1: mu2=3, mu3=6, mu4=21
    const auto two = InnovationSpec::two_point(0.25, 3.0);
    CHECK(two.moment(1) == doctest::Approx(0.0));
    CHECK(two.moment(2) == doctest::Approx(3.0));
    CHECK(two.moment(3) == doctest::Approx(6.0));
    CHECK(two.moment(4) == doctest::Approx(21.0));
}

TEST_CASE("sampling matches declared moments within 4 SE") {
    const std::size_t n = 400000;
    for (const auto& spec :
         {InnovationSpec::standard_normal(), InnovationSpec::centered_gamma(3.0),
          InnovationSpec::centered_laplace(1.0), InnovationSpec::centered_uniform(1.5),
          InnovationSpec::two_point(0.3, 2.0)}) {
        CAPTURE(spec.name());
        rng::Stream stream = rng::derive(2024, "moments");
        MeanVar m1, m2;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = spec.sample(stream);
            m1.add(x);
            m2.add(x * x);
        }
        CHECK(std::abs(m1.mean()) < 4.0 * m1.sd() / std::sqrt(double(n)));
        CHECK(std::abs(m2.mean() - spec.moment(2)) < 4.0 * m2.sd() / std::sqrt(double(n)));
    }
}

TEST_CASE("score integrates to zero and squares to the Fisher information") {
    const std::size_t n = 400000;
    for (const auto& spec : {InnovationSpec::standard_normal(), InnovationSpec::centered_gamma(3.0),
                             InnovationSpec::centered_laplace(1.0)}) {
        CAPTURE(spec.name());
        REQUIRE(spec.has_score());
        rng::Stream stream = rng::derive(99, "score");
        MeanVar ml, ml2;
        for (std::size_t i = 0; i < n; ++i) {
            const double l = spec.score(spec.sample(stream));
            ml.add(l);
            ml2.add(l * l);
        }
        CHECK(std::abs(ml.mean()) < 4.0 * ml.sd() / std::sqrt(double(n)));
        // Laplace has |l| constant, so the SE of l^2 is exactly zero
        CHECK(std::abs(ml2.mean() - spec.fisher_info()) <=
              4.0 * ml2.sd() / std::sqrt(double(n)) + 1e-12);
    }
}

TEST_CASE("Fisher information closed forms") {
    CHECK(InnovationSpec::standard_normal().fisher_info() == doctest::Approx(1.0));
    CHECK(InnovationSpec::centered_gamma(3.0).fisher_info() == doctest::Approx(1.0));
    CHECK(InnovationSpec::centered_gamma(4.0).fisher_info() == doctest::Approx(0.5));
    CHECK(InnovationSpec::centered_laplace(0.5).fisher_info() == doctest::Approx(4.0));
    CHECK(InnovationSpec::standard_normal().score(1.7) == doctest::Approx(-1.7));
}

TEST_CASE("invalid parameters and unavailable scores throw") {
    CHECK_THROWS(InnovationSpec::centered_gamma(2.0));
    CHECK_THROWS(InnovationSpec::centered_gamma(1.5));
    CHECK_FALSE(InnovationSpec::centered_uniform(1.0).has_score());
    CHECK_THROWS(InnovationSpec::centered_uniform(1.0).score(0.0));
    CHECK_FALSE(InnovationSpec::two_point(0.5, 1.0).has_score());
    CHECK_THROWS(InnovationSpec::two_point(0.5, 1.0).fisher_info());
}

TEST_CASE("derived streams are reproducible and tag-separated") {
    rng::Stream a = rng::derive(7, "path", 3);
    rng::Stream b = rng::derive(7, "path", 3);
    rng::Stream c = rng::derive(7, "tuples", 3);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
}
