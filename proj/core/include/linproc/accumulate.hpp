#ifndef LINPROC_ACCUMULATE_HPP
#define LINPROC_ACCUMULATE_HPP

#include <cmath>
#include <cstddef>

namespace linproc {

// Neumaier compensated summation.  Tuple sums can run over 10^7 terms,
// so plain accumulation would lose digits the tests care about.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Streaming mean/variance with compensated moment sums.
class MeanVar {
public:
    void add(double x) {
        sum_.add(x);
        sumsq_.add(x * x);
        ++n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return n_ ? sum_.value() / static_cast<double>(n_) : 0.0; }
    // unbiased sample variance
    double variance() const {
        if (n_ < 2) return 0.0;
        const double nd = static_cast<double>(n_);
        const double m = mean();
        double v = (sumsq_.value() - nd * m * m) / (nd - 1.0);
        return v > 0.0 ? v : 0.0;
    }
    double sd() const { return std::sqrt(variance()); }

private:
    KahanSum sum_, sumsq_;
    std::size_t n_ = 0;
};

} // namespace linproc

#endif
