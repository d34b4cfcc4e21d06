#include "linproc/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "linproc/accumulate.hpp"

namespace linproc {

// ---------------------------------------------------------------- CoefSeq

CoefSeq CoefSeq::ar1_powers(double theta, int head_len) {
    if (!(std::abs(theta) < 1.0)) throw std::domain_error("ar1_powers: |theta| must be < 1");
    CoefSeq seq;
    seq.head_.resize(static_cast<std::size_t>(head_len));
    double v = 1.0;
    for (auto& b : seq.head_) {
        b = v;
        v *= theta;
    }
    if (theta == 0.0) {
        seq.head_ = {1.0};
    } else {
        seq.geo_theta_ = theta;
        seq.tail_c_ = 1.0 / std::abs(theta);
        seq.tail_a_ = std::abs(theta);
    }
    return seq;
}

CoefSeq CoefSeq::finite(std::vector<double> betas) {
    CoefSeq seq;
    seq.head_ = std::move(betas);
    return seq;
}

CoefSeq CoefSeq::with_tail(std::vector<double> head, double tail_c, double tail_a) {
    if (tail_c > 0.0 && !(tail_a > 0.0 && tail_a < 1.0))
        throw std::domain_error("with_tail: need 0 < tail_a < 1");
    CoefSeq seq;
    seq.head_ = std::move(head);
    seq.tail_c_ = tail_c;
    seq.tail_a_ = tail_a;
    return seq;
}

std::span<const double> CoefSeq::first(int m) const {
    if (m < 1 || static_cast<std::size_t>(m) > head_.size())
        throw std::invalid_argument("CoefSeq::first: m exceeds stored head");
    return {head_.data(), static_cast<std::size_t>(m)};
}

double CoefSeq::value(int r) const {
    if (r < 1) throw std::invalid_argument("CoefSeq::value: r must be >= 1");
    if (static_cast<std::size_t>(r) <= head_.size()) return head_[static_cast<std::size_t>(r - 1)];
    if (geo_theta_) return std::pow(*geo_theta_, r - 1);
    return 0.0;
}

int CoefSeq::support() const {
    for (std::size_t r = head_.size(); r >= 1; --r)
        if (head_[r - 1] != 0.0) return static_cast<int>(r);
    return 0;
}

double CoefSeq::abs_tail_sum(int m) const {
    if (geo_theta_) {
        const double a = std::abs(*geo_theta_);
        return std::pow(a, m) / (1.0 - a);
    }
    double acc = 0.0;
    for (std::size_t r = static_cast<std::size_t>(m); r < head_.size(); ++r)
        acc += std::abs(head_[r]);
    if (tail_c_ > 0.0) {
        const int start = std::max<int>(m, static_cast<int>(head_.size()));
        acc += tail_c_ * std::pow(tail_a_, start + 1) / (1.0 - tail_a_);
    }
    return acc;
}

double CoefSeq::abs_sum() const { return std::abs(head_.empty() ? 0.0 : head_[0]) + abs_tail_sum(1); }

double CoefSeq::sum() const {
    if (geo_theta_) return 1.0 / (1.0 - *geo_theta_);
    return std::accumulate(head_.begin(), head_.end(), 0.0);
}

double CoefSeq::sum_sq() const {
    if (geo_theta_) return 1.0 / (1.0 - *geo_theta_ * *geo_theta_);
    double acc = 0.0;
    for (double b : head_) acc += b * b;
    return acc;
}

// ------------------------------------------------------------- UStatResult

double UStatResult::slot_sum(std::size_t j) const {
    double acc = 0.0;
    for (int r = 1; r <= m; ++r) acc += h_mean(r, j);
    return acc;
}

double UStatResult::empty_bucket_fraction() const {
    if (bucket_count.empty()) return 0.0;
    std::size_t empty = 0;
    for (auto c : bucket_count)
        if (c == 0) ++empty;
    return static_cast<double>(empty) / static_cast<double>(bucket_count.size());
}

std::string UStatResult::to_json() const {
    nlohmann::json j{
        {"kappa_tilde", kappa_tilde},
        {"sampling_se", sampling_se},
        {"tuples_used", tuples_used},
        {"m", m},
        {"mode", mode == UStatMode::Exact ? "exact" : "incomplete"},
        {"truncation_bound", truncation_bound},
    };
    return j.dump();
}

// ----------------------------------------------------------------- choose_m

int choose_m(std::size_t n, const CoefSeq& beta, double c, double eps,
             std::vector<std::string>* warnings) {
    if (n < 8) throw std::invalid_argument("choose_m: n must be at least 8");
    if (beta.finite_support()) {
        const int p0 = std::max(1, beta.support());
        return std::min<int>(p0, static_cast<int>(n));
    }
    if (!(beta.tail_a() < 1.0))
        throw std::domain_error("choose_m: tail decays too slowly, rate condition unattainable");

    const double nd = static_cast<double>(n);
    int m = std::max(2, static_cast<int>(std::ceil(c * std::pow(std::log(nd), 1.0 + eps))));
    const int clip = std::max(2, static_cast<int>(std::floor(std::pow(nd / 2.0, 0.25))));
    if (m > clip) {
        m = clip;
        if (warnings)
            warnings->push_back("choose_m: rate clip m^4 <= n/2 binds, m reduced to " +
                                std::to_string(m));
    }
    if (std::sqrt(nd) * beta.abs_tail_sum(m) > 0.1 && warnings)
        warnings->push_back("choose_m: n^{1/2} * tail sum beyond m exceeds 0.1, "
                            "truncation rate condition endangered");
    return m;
}

// ------------------------------------------------------------------- kernel

double kernel(std::span<const double> x, std::span<const double> beta, const SmoothFunction& h) {
    const std::size_t m = x.size();
    if (m < 1 || beta.size() != m) throw std::invalid_argument("kernel: need matching m >= 1");
    if (m > 8) throw std::invalid_argument("kernel: direct evaluation refused for m > 8");

    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    KahanSum acc;
    std::size_t count = 0;
    do {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += beta[r] * x[perm[r]];
        acc.add(h(s));
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc.value() / static_cast<double>(count);
}

// ------------------------------------------------------------------- exact

namespace {

std::uint64_t falling_factorial(std::size_t n, int m, std::uint64_t cap) {
    std::uint64_t acc = 1;
    for (int r = 0; r < m; ++r) {
        acc *= (n - static_cast<std::size_t>(r));
        if (acc > cap) return cap + 1;
    }
    return acc;
}

struct ExactState {
    std::span<const double> X;
    std::span<const double> beta;
    const SmoothFunction* h;
    std::size_t n;
    int m;
    KahanSum kappa;
    std::vector<double> bucket_sum;
    std::vector<std::uint32_t> bucket_count;
    std::vector<std::size_t> idx;
    std::vector<char> used;
    std::uint64_t tuples = 0;

    void recurse(int depth, double partial) {
        if (depth == m) {
            const double v = (*h)(partial);
            kappa.add(v);
            ++tuples;
            for (int r = 0; r < m; ++r) {
                const std::size_t b = static_cast<std::size_t>(r) * n + idx[static_cast<std::size_t>(r)];
                bucket_sum[b] += v;
                ++bucket_count[b];
            }
            return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            idx[static_cast<std::size_t>(depth)] = j;
            recurse(depth + 1, partial + beta[static_cast<std::size_t>(depth)] * X[j]);
            used[j] = 0;
        }
    }
};

} // namespace

UStatResult ustat_exact(std::span<const double> X, std::span<const double> beta,
                        const SmoothFunction& h, std::uint64_t enumeration_cap) {
    const std::size_t n = X.size();
    const int m = static_cast<int>(beta.size());
    if (m < 1 || static_cast<std::size_t>(m) > n)
        throw std::invalid_argument("ustat_exact: need 1 <= m <= n");
    if (falling_factorial(n, m, enumeration_cap) > enumeration_cap)
        throw std::invalid_argument("ustat_exact: |Phi| exceeds the enumeration cap");

    ExactState st;
    st.X = X;
    st.beta = beta;
    st.h = &h;
    st.n = n;
    st.m = m;
    st.bucket_sum.assign(static_cast<std::size_t>(m) * n, 0.0);
    st.bucket_count.assign(static_cast<std::size_t>(m) * n, 0);
    st.idx.assign(static_cast<std::size_t>(m), 0);
    st.used.assign(n, 0);
    st.recurse(0, 0.0);

    UStatResult res;
    res.m = m;
    res.n = n;
    res.mode = UStatMode::Exact;
    res.tuples_used = st.tuples;
    res.kappa_tilde = st.kappa.value() / static_cast<double>(st.tuples);
    res.bucket_mean.resize(st.bucket_sum.size());
    res.bucket_count = std::move(st.bucket_count);
    for (std::size_t b = 0; b < st.bucket_sum.size(); ++b)
        res.bucket_mean[b] =
            res.bucket_count[b] ? st.bucket_sum[b] / static_cast<double>(res.bucket_count[b]) : 0.0;
    return res;
}

// --------------------------------------------------------------- incomplete

UStatResult ustat_incomplete(std::span<const double> X, std::span<const double> beta,
                             const SmoothFunction& h, std::uint64_t B, std::uint64_t seed,
                             int partitions, bool force_enumerate) {
    const std::size_t n = X.size();
    const int m = static_cast<int>(beta.size());
    if (m < 1 || static_cast<std::size_t>(m) > n)
        throw std::invalid_argument("ustat_incomplete: need 1 <= m <= n");
    if (force_enumerate) {
        UStatResult res = ustat_exact(X, beta, h, UINT64_MAX);
        res.mode = UStatMode::Incomplete;
        res.sampling_se = 0.0;
        return res;
    }
    if (B < 1) throw std::invalid_argument("ustat_incomplete: B must be at least 1");
    if (partitions < 1) throw std::invalid_argument("ustat_incomplete: partitions must be >= 1");

    std::vector<double> bucket_sum(static_cast<std::size_t>(m) * n, 0.0);
    std::vector<std::uint32_t> bucket_count(bucket_sum.size(), 0);
    KahanSum total, total_sq;

    std::vector<std::size_t> idx(n);
    const auto P = static_cast<std::uint64_t>(partitions);
    for (std::uint64_t p = 0; p < P; ++p) {
        rng::Stream stream = rng::derive(seed, "tuples", p);
        const std::uint64_t draws = B / P + (p < B % P ? 1 : 0);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        KahanSum part, part_sq;
        for (std::uint64_t b = 0; b < draws; ++b) {
            // partial Fisher-Yates: first m entries become a uniform
            // injective tuple; no reset needed, any starting permutation works
            double s = 0.0;
            for (int r = 0; r < m; ++r) {
                const auto ur = static_cast<std::size_t>(r);
                const std::size_t j =
                    ur + static_cast<std::size_t>(stream.bounded(static_cast<std::uint64_t>(n - ur)));
                std::swap(idx[ur], idx[j]);
                s += beta[ur] * X[idx[ur]];
            }
            const double v = h(s);
            part.add(v);
            part_sq.add(v * v);
            for (int r = 0; r < m; ++r) {
                const std::size_t bkt = static_cast<std::size_t>(r) * n + idx[static_cast<std::size_t>(r)];
                bucket_sum[bkt] += v;
                ++bucket_count[bkt];
            }
        }
        total.add(part.value());
        total_sq.add(part_sq.value());
    }

    UStatResult res;
    res.m = m;
    res.n = n;
    res.mode = UStatMode::Incomplete;
    res.tuples_used = B;
    const double bd = static_cast<double>(B);
    res.kappa_tilde = total.value() / bd;
    if (B > 1) {
        double var = (total_sq.value() - bd * res.kappa_tilde * res.kappa_tilde) / (bd - 1.0);
        if (var < 0.0) var = 0.0;
        res.sampling_se = std::sqrt(var / bd);
    }
    res.bucket_mean.resize(bucket_sum.size());
    res.bucket_count = std::move(bucket_count);
    for (std::size_t b = 0; b < bucket_sum.size(); ++b)
        res.bucket_mean[b] =
            res.bucket_count[b] ? bucket_sum[b] / static_cast<double>(res.bucket_count[b]) : 0.0;
    return res;
}

// ------------------------------------------------------------ influence fn

double influence_h_star(const InnovationSpec& spec, const CoefSeq& beta, const SmoothFunction& h,
                        double x, std::size_t mc, rng::Stream& stream, double tail_tol) {
    if (mc < 1) throw std::invalid_argument("influence_h_star: mc must be at least 1");
    int horizon;
    if (beta.finite_support()) {
        horizon = std::max(1, beta.support());
    } else {
        if (!(beta.tail_a() < 1.0))
            throw std::domain_error("influence_h_star: tail rate a >= 1");
        horizon = 1;
        while (horizon < 100000 && beta.abs_tail_sum(horizon) >= tail_tol) ++horizon;
    }

    std::vector<double> b(static_cast<std::size_t>(horizon));
    for (int r = 1; r <= horizon; ++r) b[static_cast<std::size_t>(r - 1)] = beta.value(r);

    std::vector<double> draw(static_cast<std::size_t>(horizon));
    KahanSum acc;
    for (std::size_t l = 0; l < mc; ++l) {
        double s = 0.0;
        for (std::size_t r = 0; r < draw.size(); ++r) {
            draw[r] = spec.sample(stream);
            s += b[r] * draw[r];
        }
        double contrib = 0.0;
        for (std::size_t r = 0; r < draw.size(); ++r)
            contrib += h(s + b[r] * (x - draw[r])) - h(s);
        acc.add(contrib);
    }
    return acc.value() / static_cast<double>(mc);
}

// -------------------------------------------------------- truncation bound

double truncation_bound(const CoefSeq& beta, const SmoothFunction& h, const InnovationSpec& spec,
                        int m) {
    const double p = h.p();
    double high_moment;
    if (p <= 1.0)
        high_moment = spec.moment(2);
    else if (p <= 2.0)
        high_moment = spec.moment(4);
    else
        throw std::invalid_argument("truncation_bound: moments beyond order 4 unavailable");

    const double K = 2.0 * h.c2() * std::pow(1.0 + beta.abs_sum(), 2.0 * p - 1.0) *
                     (1.0 + spec.moment(2) + high_moment);
    return K * beta.abs_tail_sum(m);
}

} // namespace linproc
