#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace nvep::mc {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 reference
// constants). Crush-resistant statistical quality; keyed substreams make
// trajectory-level parallelism reproducible regardless of scheduling.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
    constexpr uint32_t kM0 = 0xD2511F53u;
    constexpr uint32_t kM1 = 0xCD9E8D57u;
    constexpr uint32_t kW0 = 0x9E3779B9u;
    constexpr uint32_t kW1 = 0xBB67AE85u;

    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const uint64_t p0 = static_cast<uint64_t>(kM0) * ctr[0];
        const uint64_t p1 = static_cast<uint64_t>(kM1) * ctr[2];
        const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
        const uint32_t lo0 = static_cast<uint32_t>(p0);
        const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
        const uint32_t lo1 = static_cast<uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

// One independent substream: key = seed, counter = (draw index, stream index).
class PhiloxStream {
public:
    PhiloxStream(uint64_t seed, uint64_t stream)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          stream_lo_(static_cast<uint32_t>(stream)),
          stream_hi_(static_cast<uint32_t>(stream >> 32)) {}

    uint64_t next_u64() {
        if (pair_pos_ == 2) {
            buf_ = philox4x32({static_cast<uint32_t>(draw_),
                               static_cast<uint32_t>(draw_ >> 32), stream_lo_, stream_hi_},
                              key_);
            ++draw_;
            pair_pos_ = 0;
        }
        const int i = 2 * pair_pos_++;
        return (static_cast<uint64_t>(buf_[static_cast<size_t>(i)]) << 32) |
               buf_[static_cast<size_t>(i + 1)];
    }

    // Uniform in (0, 1]: 53-bit mantissa, never 0 so log() is safe.
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * std::log(u01()); }

    // Standard normal via Box-Muller; one cached spare per pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        constexpr double kTwoPi = 6.28318530717958647692;
        const double r = std::sqrt(-2.0 * std::log(u01()));
        const double theta = kTwoPi * u01();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::array<uint32_t, 2> key_;
    uint32_t stream_lo_, stream_hi_;
    uint64_t draw_ = 0;
    std::array<uint32_t, 4> buf_{};
    int pair_pos_ = 2;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace nvep::mc
