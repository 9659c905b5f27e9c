#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace eprsim {

// Streaming count / mean / second and third central moments with the
// pairwise merge of Chan et al. Merging in a fixed order gives results
// independent of how the samples were partitioned into workers.
class RunningMoments {
public:
    void add(double x) {
        const double n1 = static_cast<double>(n_);
        ++n_;
        const double n = static_cast<double>(n_);
        const double delta = x - mean_;
        const double delta_n = delta / n;
        const double term1 = delta * delta_n * n1;
        mean_ += delta_n;
        m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
        m2_ += term1;
    }

    void merge(const RunningMoments& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double n = na + nb;
        const double delta = o.mean_ - mean_;
        const double mean = mean_ + delta * nb / n;
        const double m2 = m2_ + o.m2_ + delta * delta * na * nb / n;
        const double m3 = m3_ + o.m3_ + delta * delta * delta * na * nb * (na - nb) / (n * n) +
                          3 * delta * (na * o.m2_ - nb * m2_) / n;
        n_ += o.n_;
        mean_ = mean;
        m2_ = m2;
        m3_ = m3;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double skewness() const {
        if (n_ < 3 || m2_ <= 0) return 0.0;
        const double n = static_cast<double>(n_);
        return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
    }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0, m2_ = 0, m3_ = 0;
};

struct Histogram {
    std::vector<double> edges;  // size = counts.size() + 1
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

// Equal-width bins over [lo, hi]; samples outside are clamped into the
// edge bins so that the counts always sum to the sample size.
inline Histogram make_histogram(std::span<const double> samples, double lo, double hi, std::size_t n_bins) {
    Histogram h;
    if (n_bins == 0) n_bins = 1;
    if (!(hi > lo)) {
        h.edges = {lo, hi};
        h.counts = {samples.size()};
        return h;
    }
    h.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
    h.counts.assign(n_bins, 0);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (double x : samples) {
        auto bin = static_cast<std::ptrdiff_t>(std::floor((x - lo) / width));
        bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(n_bins) - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

}  // namespace eprsim
