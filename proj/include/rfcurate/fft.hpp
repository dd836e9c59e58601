// SPDX-License-Identifier: Apache-2.0
//
// rfcurate: RF fingerprinting dataset curation toolkit
// Copyright (C) 2026 The rfcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RFCURATE_FFT_HPP
#define RFCURATE_FFT_HPP

#include "common.hpp"

#include <span>

namespace rfcurate::dsp
{

/// In-place iterative radix-2 FFT. Forward is unnormalized
/// (X_k = sum x_n e^{-j2pi kn/N}); inverse applies 1/N.
inline void fft_inplace(std::span<cf64> a, bool inverse = false)
{
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw InvalidArgument("fft: length must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i)
    {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1)
    {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cf64 wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len)
        {
            cf64 w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k)
            {
                const cf64 u = a[i + k];
                const cf64 v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                // re-anchor every 16 steps to bound twiddle drift
                if ((k & 15) == 15)
                {
                    const double t = ang * static_cast<double>(k + 1);
                    w = cf64(std::cos(t), std::sin(t));
                }
                else
                {
                    w *= wlen;
                }
            }
        }
    }
    if (inverse)
    {
        const double s = 1.0 / static_cast<double>(n);
        for (auto &v : a)
            v *= s;
    }
}

inline Samples fft(Samples x)
{
    fft_inplace(x, false);
    return x;
}

inline Samples ifft(Samples x)
{
    fft_inplace(x, true);
    return x;
}

} // namespace rfcurate::dsp

#endif
