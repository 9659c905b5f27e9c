#pragma once

// Counter-based random streams (Philox4x32-10) and the handful of variate
// transforms the simulator needs. The transforms are written out here
// rather than taken from <random> so that results do not depend on the
// standard library implementation.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace eprsim {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr int kRounds = 10;

    static Counter block(Counter ctr, Key key) {
        for (int r = 0; r < kRounds; ++r) {
            if (r > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// An independent stream for (seed, stream_id). The key carries the seed;
// the upper counter words carry the stream id and the lower words count
// blocks, so distinct streams never share a counter.
class RandomStream {
public:
    using result_type = std::uint32_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (used_ == 4) refill();
        return buffer_[used_++];
    }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        const std::uint64_t a = (*this)() >> 5;
        const std::uint64_t b = (*this)() >> 6;
        const std::uint64_t k = (a << 26) | b;
        return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    double exponential(double mean) { return -mean * std::log(uniform()); }

    // Exponential truncated to [lo, hi], by inverse CDF.
    double truncated_exponential(double mean, double lo, double hi) {
        const double a = std::exp(-lo / mean);
        const double b = std::exp(-hi / mean);
        return -mean * std::log(a - (a - b) * uniform());
    }

    double cauchy(double half_width) { return half_width * std::tan(M_PI * (uniform() - 0.5)); }

    std::uint64_t blocks_used() const { return block_; }

private:
    void refill() {
        buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                     stream_[0], stream_[1]},
                                    key_);
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::array<std::uint32_t, 2> stream_;
    Philox4x32::Counter buffer_{};
    std::uint64_t block_ = 0;
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace eprsim
