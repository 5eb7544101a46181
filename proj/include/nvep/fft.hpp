#pragma once

#include <complex>
#include <vector>

#include "nvep/errors.hpp"

namespace nvep::mc {

// In-place iterative radix-2 DIT FFT, forward convention X_k = sum_j x_j e^{-2pi i jk/n}.
// n must be a power of two. Twiddles come from one std::polar table per call,
// so results are bit-reproducible across runs.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw DomainError("fft_radix2: length must be a power of two");
    if (n == 1)
        return;

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }

    constexpr double kTwoPi = 6.28318530717958647692;
    std::vector<std::complex<double>> tw(n / 2);
    for (size_t j = 0; j < n / 2; ++j)
        tw[j] = std::polar(1.0, -kTwoPi * static_cast<double>(j) / static_cast<double>(n));

    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t stride = n / len;
        for (size_t start = 0; start < n; start += len) {
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> w = tw[j * stride];
                const std::complex<double> u = a[start + j];
                const std::complex<double> v = a[start + j + len / 2] * w;
                a[start + j] = u + v;
                a[start + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace nvep::mc
