#pragma once

// Reference MT19937-64 transcribed from the Matsumoto-Nishimura 2004 C code
// (init_genrand64 / genrand64_int64). Test-only: checks the library's seeded draws
// without going through <random>.

#include <array>
#include <cstdint>

namespace oracle {

class Mt64 {
public:
    explicit Mt64(std::uint64_t seed) {
        mt_[0] = seed;
        for (mti_ = 1; mti_ < kNN; ++mti_) {
            mt_[mti_] = 6364136223846793005ULL * (mt_[mti_ - 1] ^ (mt_[mti_ - 1] >> 62)) + mti_;
        }
    }

    std::uint64_t next() {
        static constexpr std::uint64_t mag01[2] = {0ULL, kMatrixA};
        if (mti_ >= kNN) {
            int i = 0;
            for (; i < kNN - kMM; ++i) {
                std::uint64_t x = (mt_[i] & kUM) | (mt_[i + 1] & kLM);
                mt_[i] = mt_[i + kMM] ^ (x >> 1) ^ mag01[x & 1ULL];
            }
            for (; i < kNN - 1; ++i) {
                std::uint64_t x = (mt_[i] & kUM) | (mt_[i + 1] & kLM);
                mt_[i] = mt_[i + (kMM - kNN)] ^ (x >> 1) ^ mag01[x & 1ULL];
            }
            std::uint64_t x = (mt_[kNN - 1] & kUM) | (mt_[0] & kLM);
            mt_[kNN - 1] = mt_[kMM - 1] ^ (x >> 1) ^ mag01[x & 1ULL];
            mti_ = 0;
        }
        std::uint64_t x = mt_[mti_++];
        x ^= (x >> 29) & 0x5555555555555555ULL;
        x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
        x ^= (x << 37) & 0xFFF7EEE000000000ULL;
        x ^= (x >> 43);
        return x;
    }

    // 53-bit mantissa in [0, 1), same as genrand64_real2 resolution.
    double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

private:
    static constexpr int kNN = 312;
    static constexpr int kMM = 156;
    static constexpr std::uint64_t kMatrixA = 0xB5026F5AA96619E9ULL;
    static constexpr std::uint64_t kUM = 0xFFFFFFFF80000000ULL;
    static constexpr std::uint64_t kLM = 0x7FFFFFFFULL;

    std::array<std::uint64_t, kNN> mt_{};
    int mti_ = kNN + 1;
};

} // namespace oracle
