#include "linproc/smooth_function.hpp"

#include <cmath>
#include <stdexcept>

namespace linproc {

SmoothFunction SmoothFunction::square() {
    SmoothFunction f;
    f.name_ = "square";
    f.h_ = [](double x) { return x * x; };
    f.h_prime_ = [](double x) { return 2.0 * x; };
    f.p_ = 2.0;
    f.q_ = 1.0;
    f.c1_ = 1.0;
    f.c2_ = 2.0;
    f.c3_ = 2.0;
    f.poly_coeffs_ = {0.0, 0.0, 1.0};
    return f;
}

SmoothFunction SmoothFunction::identity() {
    SmoothFunction f;
    f.name_ = "identity";
    f.h_ = [](double x) { return x; };
    f.h_prime_ = [](double) { return 1.0; };
    f.p_ = 1.0;
    f.q_ = 0.0;
    f.c1_ = 1.0;
    f.c2_ = 1.0;
    f.c3_ = 1.0;
    f.poly_coeffs_ = {0.0, 1.0};
    return f;
}

SmoothFunction SmoothFunction::abs_value() {
    SmoothFunction f;
    f.name_ = "abs";
    f.h_ = [](double x) { return std::abs(x); };
    f.h_prime_ = [](double x) { return x >= 0.0 ? 1.0 : -1.0; };
    f.p_ = 1.0;
    f.q_ = 0.0;
    f.c1_ = 1.0;
    f.c2_ = 1.0;
    f.c3_ = 1.0;
    return f;
}

SmoothFunction SmoothFunction::cos_t(double t) {
    SmoothFunction f;
    f.name_ = "cos_" + std::to_string(t);
    f.h_ = [t](double x) { return std::cos(t * x); };
    f.h_prime_ = [t](double x) { return -t * std::sin(t * x); };
    f.p_ = 1.0;
    f.q_ = 0.0;
    f.c1_ = 1.0;
    f.c2_ = std::abs(t);
    f.c3_ = std::abs(t);
    return f;
}

SmoothFunction SmoothFunction::constant(double c) {
    SmoothFunction f;
    f.name_ = "constant";
    f.h_ = [c](double) { return c; };
    f.h_prime_ = [](double) { return 0.0; };
    f.p_ = 1.0;
    f.q_ = 0.0;
    f.c1_ = std::abs(c);
    f.c2_ = 0.0;
    f.c3_ = 0.0;
    f.poly_coeffs_ = {c};
    return f;
}

SmoothFunction SmoothFunction::poly(std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("poly: no coefficients");
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    const int degree = static_cast<int>(coeffs.size()) - 1;

    SmoothFunction f;
    f.name_ = "poly_deg" + std::to_string(degree);
    f.h_ = [coeffs](double x) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
    };
    f.h_prime_ = [coeffs](double x) {
        double acc = 0.0;
        for (std::size_t i = coeffs.size() - 1; i >= 1; --i) acc = acc * x + coeffs[i] * static_cast<double>(i);
        return acc;
    };
    f.p_ = std::max(1, degree);
    f.q_ = std::max(0, degree - 1);
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double ci = std::abs(coeffs[i]);
        c1 += ci;
        if (i >= 1) {
            c2 += ci * static_cast<double>(i) * std::pow(2.0, static_cast<double>(i));
            c3 += ci * static_cast<double>(i);
        }
    }
    f.c1_ = c1;
    f.c2_ = c2;
    f.c3_ = c3;
    f.poly_coeffs_ = std::move(coeffs);
    return f;
}

SmoothFunction SmoothFunction::custom(std::string name, std::function<double(double)> h,
                                      std::function<double(double)> h_prime, double p, double q,
                                      double c1, double c2, double c3) {
    SmoothFunction f;
    f.name_ = std::move(name);
    f.h_ = std::move(h);
    f.h_prime_ = std::move(h_prime);
    f.p_ = p;
    f.q_ = q;
    f.c1_ = c1;
    f.c2_ = c2;
    f.c3_ = c3;
    return f;
}

} // namespace linproc
