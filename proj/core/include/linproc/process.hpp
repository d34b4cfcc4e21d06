#ifndef LINPROC_PROCESS_HPP
#define LINPROC_PROCESS_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "linproc/innovations.hpp"
#include "linproc/rng.hpp"

namespace linproc {

using Theta = std::vector<double>;

// Geometric envelope for coefficient families and their gradients:
// |delta_s| + |delta_dot_s| <= c * a^s (same for gamma) for all theta
// within distance eta of the anchor point.
struct Tail {
    double c;
    double a;
    double eta;
};

enum class CoefKind { Delta, Gamma, DeltaDot, GammaDot };

// A parameterized linear-process family: moving-average coefficients
// delta_s(theta), autoregressive coefficients gamma_s(theta), their
// gradients, and the geometric tail envelope.  Convention: delta_0 = 1,
// so the series weights are alpha_r(theta) = delta_{r-1}(theta).
class CoefficientModel {
public:
    static CoefficientModel ar1();
    static CoefficientModel ma1();
    static CoefficientModel arma11();

    using ScalarFn = std::function<double(const Theta&, int)>;
    using GradFn = std::function<Theta(const Theta&, int)>;
    using DomainFn = std::function<bool(const Theta&)>;
    static CoefficientModel custom(std::string name, int dim, ScalarFn delta, ScalarFn gamma,
                                   GradFn delta_dot, GradFn gamma_dot, DomainFn domain, Tail tail);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    bool in_domain(const Theta& theta) const;
    void require_domain(const Theta& theta) const;

    double delta(const Theta& theta, int s) const;      // s >= 1
    double gamma_coef(const Theta& theta, int s) const; // s >= 1
    Theta delta_dot(const Theta& theta, int s) const;
    Theta gamma_dot(const Theta& theta, int s) const;

    // tail envelope valid on the eta-ball around theta
    Tail tail_at(const Theta& theta) const;

    // first `count` scalar coefficients of the requested family
    std::vector<double> coefficients(const Theta& theta, CoefKind kind, int count) const;
    // gradient families (CoefKind::DeltaDot / GammaDot)
    std::vector<Theta> coefficient_grads(const Theta& theta, CoefKind kind, int count) const;

private:
    CoefficientModel() = default;

    std::string name_;
    int dim_ = 1;
    ScalarFn delta_, gamma_;
    GradFn delta_dot_, gamma_dot_;
    DomainFn domain_;
    std::optional<Tail> fixed_tail_;
};

// Observations Y_{-r},...,Y_n; true innovations retained when simulated.
struct ProcessPath {
    std::vector<double> values; // Y_{-r}..Y_n, size r + 1 + n
    int r = 0;
    std::optional<Theta> true_theta;
    std::optional<std::vector<double>> true_innovations; // X_1..X_n

    std::size_t n() const { return values.size() - static_cast<std::size_t>(r) - 1; }
    // t in [-r, n]
    double y(long t) const { return values[static_cast<std::size_t>(t + r)]; }

    void to_csv(std::ostream& os) const;
    static ProcessPath from_csv(std::istream& is);
};

// Default prehistory length r(n) = ceil(c * (log n)^{1+eps}).
int default_prehistory(std::size_t n, double eps = 0.1, double c = 1.0);

// Stationary path of length r+1+n.  Named models use their exact
// recursion after a burn-in sized from the tail envelope; custom models
// use the MA(infinity) representation truncated at tail_tol.
ProcessPath simulate(const CoefficientModel& model, const Theta& theta0, const InnovationSpec& spec,
                     std::size_t n, int r, rng::Stream& stream, double tail_tol = 1e-12);

// Truncated innovation recovery X_{n,j}(theta) = Y_j + sum_{s<=r+j} gamma_s(theta) Y_{j-s}.
std::vector<double> recover_innovations(const ProcessPath& path, const CoefficientModel& model,
                                        const Theta& theta);

// Truncated xi_j = sum_{s<=truncation} gamma_dot_s(theta) Y_{j-s}, j = 1..n.
std::vector<Theta> xi_vectors(const ProcessPath& path, const CoefficientModel& model,
                              const Theta& theta, int truncation);

} // namespace linproc

#endif
