#include "linproc/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace linproc {

namespace {

double pow_int(double base, int e) {
    if (e < 0) return 0.0;
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= base;
    return out;
}

// Tail envelope for a one- or two-parameter geometric family whose
// coefficient bounds look like b_s = k0*amax^{s-1} + k1*(s-1)*amax^{s-2}.
Tail geometric_tail(double amax, double k0, double k1) {
    const double eta = std::min(0.02, (1.0 - amax) / 4.0);
    amax += eta;
    const double a = 0.5 * (amax + 1.0);
    double c = 0.0;
    for (int s = 1; s <= 400; ++s) {
        const double bound = k0 * pow_int(amax, s - 1) + k1 * (s - 1) * pow_int(amax, s - 2);
        c = std::max(c, bound / pow_int(a, s));
    }
    return Tail{c, a, eta};
}

} // namespace

CoefficientModel CoefficientModel::ar1() {
    CoefficientModel model;
    model.name_ = "ar1";
    model.dim_ = 1;
    model.domain_ = [](const Theta& t) { return t.size() == 1 && std::abs(t[0]) < 1.0; };
    model.delta_ = [](const Theta& t, int s) { return pow_int(t[0], s); };
    model.gamma_ = [](const Theta& t, int s) { return s == 1 ? -t[0] : 0.0; };
    model.delta_dot_ = [](const Theta& t, int s) { return Theta{s * pow_int(t[0], s - 1)}; };
    model.gamma_dot_ = [](const Theta&, int s) { return Theta{s == 1 ? -1.0 : 0.0}; };
    return model;
}

CoefficientModel CoefficientModel::ma1() {
    CoefficientModel model;
    model.name_ = "ma1";
    model.dim_ = 1;
    model.domain_ = [](const Theta& t) { return t.size() == 1 && std::abs(t[0]) < 1.0; };
    model.delta_ = [](const Theta& t, int s) { return s == 1 ? t[0] : 0.0; };
    model.gamma_ = [](const Theta& t, int s) { return pow_int(-t[0], s); };
    model.delta_dot_ = [](const Theta&, int s) { return Theta{s == 1 ? 1.0 : 0.0}; };
    model.gamma_dot_ = [](const Theta& t, int s) {
        // d/dtheta (-theta)^s
        return Theta{(s % 2 == 0 ? 1.0 : -1.0) * s * pow_int(t[0], s - 1)};
    };
    return model;
}

CoefficientModel CoefficientModel::arma11() {
    CoefficientModel model;
    model.name_ = "arma11";
    model.dim_ = 2;
    // theta1 != theta2 restriction, with a numerical margin against
    // near-cancellation of the two representations
    model.domain_ = [](const Theta& t) {
        return t.size() == 2 && std::abs(t[0]) < 1.0 && std::abs(t[1]) < 1.0 &&
               std::abs(t[0] - t[1]) >= 1e-6;
    };
    model.delta_ = [](const Theta& t, int s) { return (t[0] - t[1]) * pow_int(t[0], s - 1); };
    model.gamma_ = [](const Theta& t, int s) { return (t[1] - t[0]) * pow_int(t[1], s - 1); };
    model.delta_dot_ = [](const Theta& t, int s) {
        return Theta{pow_int(t[0], s - 1) + (t[0] - t[1]) * (s - 1) * pow_int(t[0], s - 2),
                     -pow_int(t[0], s - 1)};
    };
    model.gamma_dot_ = [](const Theta& t, int s) {
        return Theta{-pow_int(t[1], s - 1),
                     pow_int(t[1], s - 1) + (t[1] - t[0]) * (s - 1) * pow_int(t[1], s - 2)};
    };
    return model;
}

CoefficientModel CoefficientModel::custom(std::string name, int dim, ScalarFn delta, ScalarFn gamma,
                                          GradFn delta_dot, GradFn gamma_dot, DomainFn domain,
                                          Tail tail) {
    CoefficientModel model;
    model.name_ = std::move(name);
    model.dim_ = dim;
    model.delta_ = std::move(delta);
    model.gamma_ = std::move(gamma);
    model.delta_dot_ = std::move(delta_dot);
    model.gamma_dot_ = std::move(gamma_dot);
    model.domain_ = std::move(domain);
    model.fixed_tail_ = tail;
    return model;
}

bool CoefficientModel::in_domain(const Theta& theta) const { return domain_(theta); }

void CoefficientModel::require_domain(const Theta& theta) const {
    if (!in_domain(theta))
        throw std::domain_error("theta outside the domain of model " + name_);
}

double CoefficientModel::delta(const Theta& theta, int s) const {
    if (s == 0) return 1.0;
    return delta_(theta, s);
}

double CoefficientModel::gamma_coef(const Theta& theta, int s) const { return gamma_(theta, s); }

Theta CoefficientModel::delta_dot(const Theta& theta, int s) const {
    if (s == 0) return Theta(static_cast<std::size_t>(dim_), 0.0);
    return delta_dot_(theta, s);
}

Theta CoefficientModel::gamma_dot(const Theta& theta, int s) const { return gamma_dot_(theta, s); }

Tail CoefficientModel::tail_at(const Theta& theta) const {
    require_domain(theta);
    if (fixed_tail_) return *fixed_tail_;
    if (name_ == "ar1" || name_ == "ma1") {
        const double amax = std::abs(theta[0]);
        // |delta_s|+|delta_dot_s| and |gamma_s|+|gamma_dot_s| are both
        // bounded by amax^s + s*amax^{s-1} (MA1's delta side is finite)
        return geometric_tail(amax, 1.0 + amax, 1.0);
    }
    // arma11: coefficients carry a factor |t1 - t2| <= 2 and gradients a
    // linear-in-s term
    const double amax = std::max(std::abs(theta[0]), std::abs(theta[1]));
    return geometric_tail(amax, 4.0, 2.0);
}

std::vector<double> CoefficientModel::coefficients(const Theta& theta, CoefKind kind,
                                                   int count) const {
    require_domain(theta);
    if (kind == CoefKind::DeltaDot || kind == CoefKind::GammaDot)
        throw std::invalid_argument("coefficients: use coefficient_grads for gradient families");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int s = 1; s <= count; ++s)
        out[static_cast<std::size_t>(s - 1)] =
            kind == CoefKind::Delta ? delta(theta, s) : gamma_coef(theta, s);
    return out;
}

std::vector<Theta> CoefficientModel::coefficient_grads(const Theta& theta, CoefKind kind,
                                                       int count) const {
    require_domain(theta);
    if (kind != CoefKind::DeltaDot && kind != CoefKind::GammaDot)
        throw std::invalid_argument("coefficient_grads: scalar family requested");
    std::vector<Theta> out(static_cast<std::size_t>(count));
    for (int s = 1; s <= count; ++s)
        out[static_cast<std::size_t>(s - 1)] =
            kind == CoefKind::DeltaDot ? delta_dot(theta, s) : gamma_dot(theta, s);
    return out;
}

int default_prehistory(std::size_t n, double eps, double c) {
    const double v = c * std::pow(std::log(static_cast<double>(n)), 1.0 + eps);
    return static_cast<int>(std::ceil(v));
}

ProcessPath simulate(const CoefficientModel& model, const Theta& theta0, const InnovationSpec& spec,
                     std::size_t n, int r, rng::Stream& stream, double tail_tol) {
    model.require_domain(theta0);
    if (n < 1) throw std::invalid_argument("simulate: n must be at least 1");
    if (r < 0) throw std::invalid_argument("simulate: r must be nonnegative");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("simulate: tail_tol must be positive");

    const Tail tail = model.tail_at(theta0);
    if (!(tail.a < 1.0)) throw std::domain_error("simulate: tail rate a >= 1, truncation unattainable");

    const std::size_t total = static_cast<std::size_t>(r) + 1 + n;
    ProcessPath path;
    path.r = r;
    path.true_theta = theta0;
    path.values.resize(total);

    const std::string& name = model.name();
    if (name == "ar1" || name == "arma11" || name == "ma1") {
        // exact recursion; burn-in long enough that the zero start is
        // below tail_tol in the geometric envelope
        int burn = 1;
        if (name != "ma1") {
            const double target = tail_tol * (1.0 - tail.a) / tail.c;
            burn = std::max(1, static_cast<int>(std::ceil(std::log(target) / std::log(tail.a))));
        }
        std::vector<double> innov(static_cast<std::size_t>(burn) + total);
        for (auto& x : innov) x = spec.sample(stream);
        std::vector<double> y(innov.size(), 0.0);
        if (name == "ar1") {
            const double th = theta0[0];
            for (std::size_t t = 1; t < y.size(); ++t) y[t] = th * y[t - 1] + innov[t];
        } else if (name == "ma1") {
            const double th = theta0[0];
            for (std::size_t t = 1; t < y.size(); ++t) y[t] = innov[t] + th * innov[t - 1];
        } else {
            const double th1 = theta0[0], th2 = theta0[1];
            for (std::size_t t = 1; t < y.size(); ++t)
                y[t] = th1 * y[t - 1] + innov[t] - th2 * innov[t - 1];
        }
        const std::size_t offset = y.size() - total;
        std::copy(y.begin() + static_cast<long>(offset), y.end(), path.values.begin());
        path.true_innovations.emplace(innov.end() - static_cast<long>(n), innov.end());
        return path;
    }

    // generic model: truncated MA(infinity)
    const double target = tail_tol * (1.0 - tail.a) / tail.c;
    const int trunc = std::max(1, static_cast<int>(std::ceil(std::log(target) / std::log(tail.a))));
    std::vector<double> delta(static_cast<std::size_t>(trunc) + 1);
    delta[0] = 1.0;
    for (int s = 1; s <= trunc; ++s) delta[static_cast<std::size_t>(s)] = model.delta(theta0, s);

    std::vector<double> innov(total + static_cast<std::size_t>(trunc));
    for (auto& x : innov) x = spec.sample(stream);
    for (std::size_t t = 0; t < total; ++t) {
        double acc = 0.0;
        for (int s = 0; s <= trunc; ++s)
            acc += delta[static_cast<std::size_t>(s)] *
                   innov[t + static_cast<std::size_t>(trunc - s)];
        path.values[t] = acc;
    }
    path.true_innovations.emplace(innov.end() - static_cast<long>(n), innov.end());
    return path;
}

std::vector<double> recover_innovations(const ProcessPath& path, const CoefficientModel& model,
                                        const Theta& theta) {
    model.require_domain(theta);
    const std::size_t n = path.n();
    const int r = path.r;

    const int max_lag = r + static_cast<int>(n);
    std::vector<double> gam(static_cast<std::size_t>(max_lag) + 1, 0.0);
    int last_nonzero = 0;
    for (int s = 1; s <= max_lag; ++s) {
        gam[static_cast<std::size_t>(s)] = model.gamma_coef(theta, s);
        if (gam[static_cast<std::size_t>(s)] != 0.0) last_nonzero = s;
    }

    std::vector<double> out(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const int lags = std::min(r + static_cast<int>(j), last_nonzero);
        double acc = path.y(static_cast<long>(j));
        for (int s = 1; s <= lags; ++s)
            acc += gam[static_cast<std::size_t>(s)] * path.y(static_cast<long>(j) - s);
        out[j - 1] = acc;
    }
    return out;
}

std::vector<Theta> xi_vectors(const ProcessPath& path, const CoefficientModel& model,
                              const Theta& theta, int truncation) {
    model.require_domain(theta);
    if (truncation < 0) throw std::invalid_argument("xi_vectors: truncation must be nonnegative");
    if (truncation > path.r + 1)
        throw std::invalid_argument("xi_vectors: insufficient pre-observations for truncation");
    const std::size_t n = path.n();
    const std::size_t d = static_cast<std::size_t>(model.dim());

    std::vector<Theta> grads(static_cast<std::size_t>(truncation) + 1, Theta(d, 0.0));
    for (int s = 1; s <= truncation; ++s) grads[static_cast<std::size_t>(s)] = model.gamma_dot(theta, s);

    std::vector<Theta> out(n, Theta(d, 0.0));
    for (std::size_t j = 1; j <= n; ++j) {
        for (int s = 1; s <= truncation; ++s) {
            const double yv = path.y(static_cast<long>(j) - s);
            for (std::size_t k = 0; k < d; ++k)
                out[j - 1][k] += grads[static_cast<std::size_t>(s)][k] * yv;
        }
    }
    return out;
}

void ProcessPath::to_csv(std::ostream& os) const {
    const bool with_innov = true_innovations.has_value();
    os << (with_innov ? "index,y,innovation\n" : "index,y\n");
    char buf[64];
    for (long t = -r; t <= static_cast<long>(n()); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", y(t));
        os << t << ',' << buf;
        if (with_innov) {
            os << ',';
            if (t >= 1) {
                std::snprintf(buf, sizeof buf, "%.17g",
                              (*true_innovations)[static_cast<std::size_t>(t - 1)]);
                os << buf;
            }
        }
        os << '\n';
    }
}

ProcessPath ProcessPath::from_csv(std::istream& is) {
    std::string line;
    // leading '#' lines carry run metadata and are skipped
    do {
        if (!std::getline(is, line)) throw std::runtime_error("path CSV: empty input");
    } while (line.empty() || line[0] == '#');
    const bool with_innov = line.find("innovation") != std::string::npos;

    std::vector<long> index;
    std::vector<double> ys;
    std::vector<double> innov;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        index.push_back(std::stol(field));
        std::getline(row, field, ',');
        ys.push_back(std::stod(field));
        if (with_innov && std::getline(row, field, ',') && !field.empty())
            innov.push_back(std::stod(field));
    }
    if (index.empty()) throw std::runtime_error("path CSV: no rows");
    if (index.front() > 0)
        throw std::runtime_error("path CSV: pre-observations (index <= 0) are required");

    ProcessPath path;
    path.r = static_cast<int>(-index.front());
    path.values = std::move(ys);
    if (!innov.empty()) path.true_innovations = std::move(innov);
    const std::size_t expected = static_cast<std::size_t>(path.r) + 1 + path.n();
    if (path.values.size() != expected || index.back() != static_cast<long>(path.n()))
        throw std::runtime_error("path CSV: inconsistent index range");
    return path;
}

} // namespace linproc
