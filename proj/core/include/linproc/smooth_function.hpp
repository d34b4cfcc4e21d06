#ifndef LINPROC_SMOOTH_FUNCTION_HPP
#define LINPROC_SMOOTH_FUNCTION_HPP

#include <functional>
#include <string>
#include <vector>

namespace linproc {

// Target function h with derivative and growth data:
//   |h(x)|  <= c1 * (1 + |x|^p)
//   |h(x+y) - h(x)| <= c2 * (1 + |x|^p)(|y| + |y|^p)
//   |h'(x)| <= c3 * (1 + |x|)^q
class SmoothFunction {
public:
    static SmoothFunction square();
    static SmoothFunction identity();
    static SmoothFunction abs_value();
    static SmoothFunction cos_t(double t);
    static SmoothFunction constant(double c);
    // c[0] + c[1] x + ... + c[k] x^k; degree at most 2 keeps moments analytic
    static SmoothFunction poly(std::vector<double> coeffs);
    static SmoothFunction custom(std::string name, std::function<double(double)> h,
                                 std::function<double(double)> h_prime, double p, double q,
                                 double c1, double c2, double c3);

    double operator()(double x) const { return h_(x); }
    double deriv(double x) const { return h_prime_(x); }

    const std::string& name() const { return name_; }
    double p() const { return p_; }
    double q() const { return q_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double c3() const { return c3_; }

    bool is_polynomial() const { return !poly_coeffs_.empty(); }
    const std::vector<double>& poly_coeffs() const { return poly_coeffs_; }

private:
    SmoothFunction() = default;

    std::string name_;
    std::function<double(double)> h_;
    std::function<double(double)> h_prime_;
    double p_ = 1.0, q_ = 0.0;
    double c1_ = 1.0, c2_ = 1.0, c3_ = 1.0;
    std::vector<double> poly_coeffs_;
};

} // namespace linproc

#endif
