#ifndef LINPROC_USTAT_HPP
#define LINPROC_USTAT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linproc/innovations.hpp"
#include "linproc/rng.hpp"
#include "linproc/smooth_function.hpp"

namespace linproc {

// Summable series weights beta_1, beta_2, ...: an explicit head plus a
// geometric envelope |beta_r| <= tail_c * tail_a^r for r beyond the head.
class CoefSeq {
public:
    // beta_r = theta^{r-1} (the AR(1) series weights), exact geometric tail
    static CoefSeq ar1_powers(double theta, int head_len = 64);
    static CoefSeq finite(std::vector<double> betas);
    static CoefSeq with_tail(std::vector<double> head, double tail_c, double tail_a);

    const std::vector<double>& head() const { return head_; }
    std::span<const double> first(int m) const;
    double value(int r) const; // beta_r, r >= 1

    bool finite_support() const { return tail_c_ == 0.0; }
    int support() const; // last nonzero index when support is finite

    bool geometric() const { return geo_theta_.has_value() || tail_c_ > 0.0; }
    double tail_a() const { return tail_a_; }

    double abs_tail_sum(int m) const; // upper bound on sum_{r>m} |beta_r|
    double abs_sum() const;           // upper bound on sum_r |beta_r|
    double sum() const;               // sum_r beta_r (exact for ar1/finite)
    double sum_sq() const;            // sum_r beta_r^2 (exact for ar1/finite)

private:
    std::vector<double> head_;
    double tail_c_ = 0.0;
    double tail_a_ = 0.0;
    std::optional<double> geo_theta_;
};

enum class UStatMode { Exact, Incomplete };

struct UStatConfig {
    int m = 0;                             // 0 = resolve via choose_m
    UStatMode mode = UStatMode::Incomplete;
    std::uint64_t B = 0;                   // 0 = auto (200 * n * m)
    int partitions = 1;                    // tuple-sampling seed partitions
    std::uint64_t seed = 0;
    std::uint64_t enumeration_cap = 1'000'000;
};

struct UStatResult {
    double kappa_tilde = 0.0;
    int m = 0;
    std::size_t n = 0;
    UStatMode mode = UStatMode::Exact;
    std::uint64_t tuples_used = 0;
    double sampling_se = 0.0;     // incomplete mode only
    double truncation_bound = 0.0; // filled by callers that know the tail

    // H[(r-1)*n + (j-1)] = mean of h(S_i) over sampled tuples with i(r)=j
    std::vector<double> bucket_mean;
    std::vector<std::uint32_t> bucket_count;

    double h_mean(int r, std::size_t j) const { // r,j 1-based
        return bucket_mean[static_cast<std::size_t>(r - 1) * n + (j - 1)];
    }
    // sum over slots r of H_{r,j}
    double slot_sum(std::size_t j) const;
    double empty_bucket_fraction() const;

    std::string to_json() const;
};

// m(n) = max(2, ceil(c * (log n)^{1+eps})), clipped so m^4 <= n/2.
// Finite-support weights take m = support.  Appends diagnostics to
// `warnings` when the clip binds or the truncation-rate check fails.
int choose_m(std::size_t n, const CoefSeq& beta, double c = 1.0, double eps = 0.1,
             std::vector<std::string>* warnings = nullptr);

// Symmetrized kernel k_m by direct permutation enumeration; refuses m > 8.
double kernel(std::span<const double> x, std::span<const double> beta, const SmoothFunction& h);

// Full enumeration over all injective m-tuples.
UStatResult ustat_exact(std::span<const double> X, std::span<const double> beta,
                        const SmoothFunction& h, std::uint64_t enumeration_cap = 1'000'000);

// Uniform random injective tuples; unbiased for the exact kappa_tilde
// conditional on X.  B is split across `partitions` derived seed streams;
// the result depends on (seed, partitions) but not on scheduling.
// force_enumerate = true replaces sampling by full enumeration of Phi.
UStatResult ustat_incomplete(std::span<const double> X, std::span<const double> beta,
                             const SmoothFunction& h, std::uint64_t B, std::uint64_t seed,
                             int partitions = 1, bool force_enumerate = false);

// Monte Carlo estimate of the influence function h_*(x) = sum_r E[h(S)|X_r=x] - E[h(S)],
// common random numbers shared across r.
double influence_h_star(const InnovationSpec& spec, const CoefSeq& beta, const SmoothFunction& h,
                        double x, std::size_t mc, rng::Stream& stream, double tail_tol = 1e-10);

// Diagnostic bound K * sum_{r>m} |beta_r| on |E[h(S)] - E[h(S^(m))]|.
double truncation_bound(const CoefSeq& beta, const SmoothFunction& h, const InnovationSpec& spec,
                        int m);

} // namespace linproc

#endif
