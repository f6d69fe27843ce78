#ifndef EWSMOOTH_SUM_HPP
#define EWSMOOTH_SUM_HPP

#include <cmath>
#include <cstddef>
#include <span>

namespace ewsmooth {

// Neumaier-compensated accumulator. Fixed left-to-right order makes long
// reductions reproducible and keeps accumulation error near one ulp, which
// the 1e-12 identity tolerances rely on.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    CompensatedSum acc;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) acc.add(a[i] * b[i]);
    return acc.value();
}

inline double sq_norm(std::span<const double> a) { return dot(a, a); }

// l1 norm; callers hold nonnegative vectors but abs keeps it a real norm.
inline double l1_norm(std::span<const double> a) {
    CompensatedSum acc;
    for (double x : a) acc.add(std::abs(x));
    return acc.value();
}

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
    CompensatedSum acc;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc.add(d * d);
    }
    return acc.value();
}

} // namespace ewsmooth

#endif
