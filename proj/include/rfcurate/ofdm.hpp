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

#ifndef RFCURATE_OFDM_HPP
#define RFCURATE_OFDM_HPP

// 802.11a/g legacy numerology at 20 Msps.
//
// Frequency-domain vectors are indexed by FFT bin (0..63); subcarrier s maps
// to bin (s + 64) % 64. Time-domain symbols are scaled by 1/sqrt(52) so that a
// symbol with unit-magnitude values on all 52 occupied subcarriers has unit
// mean power. ofdm_demodulate() is the exact inverse of ofdm_modulate().

#include "common.hpp"
#include "fft.hpp"

#include <array>
#include <span>

namespace rfcurate::ofdm
{

inline constexpr std::size_t kFftSize = 64;
inline constexpr std::size_t kCpLength = 16;
inline constexpr std::size_t kSymbolLength = kFftSize + kCpLength;
inline constexpr std::size_t kStfLength = 160;
inline constexpr std::size_t kStfPeriod = 16;
inline constexpr std::size_t kLtfLength = 160;
inline constexpr std::size_t kLtfGuard = 32;
inline constexpr std::size_t kLtfFirst = kStfLength + kLtfGuard;  // 192
inline constexpr std::size_t kLtfSecond = kLtfFirst + kFftSize;   // 256
inline constexpr std::size_t kPreambleLength = kStfLength + kLtfLength;
inline constexpr std::size_t kOccupied = 52;

using FreqSymbol = std::array<cf64, kFftSize>;

inline constexpr std::size_t bin_of(int subcarrier)
{
    return static_cast<std::size_t>((subcarrier + 64) % 64);
}

/// Occupied subcarriers -26..-1, 1..26 in ascending order.
inline constexpr std::array<int, kOccupied> occupied_subcarriers()
{
    std::array<int, kOccupied> out{};
    std::size_t i = 0;
    for (int s = -26; s <= 26; ++s)
        if (s != 0)
            out[i++] = s;
    return out;
}

inline constexpr bool is_occupied_bin(std::size_t bin)
{
    const int s = bin < 32 ? static_cast<int>(bin) : static_cast<int>(bin) - 64;
    return s != 0 && s >= -26 && s <= 26;
}

inline FreqSymbol stf_freq()
{
    const double a = std::sqrt(13.0 / 6.0);
    const cf64 p(a, a), m(-a, -a);
    FreqSymbol f{};
    const std::array<std::pair<int, cf64>, 12> tones = {{{-24, p}, {-20, m}, {-16, p}, {-12, m},
                                                         {-8, m},  {-4, p},  {4, m},   {8, m},
                                                         {12, p},  {16, p},  {20, p},  {24, p}}};
    for (const auto &[s, v] : tones)
        f[bin_of(s)] = v;
    return f;
}

inline FreqSymbol ltf_freq()
{
    static constexpr std::array<int, 53> seq = {1, 1,  -1, -1, 1,  1,  -1, 1,  -1, 1,  1,  1,  1, 1,
                                                1, -1, -1, 1,  1,  -1, 1,  -1, 1,  1,  1,  1,  0, 1,
                                                -1, -1, 1, 1,  -1, 1,  -1, 1,  -1, -1, -1, -1, -1, 1,
                                                1, -1, -1, 1,  -1, 1,  -1, 1,  1,  1,  1};
    FreqSymbol f{};
    for (int s = -26; s <= 26; ++s)
        f[bin_of(s)] = cf64(seq[static_cast<std::size_t>(s + 26)], 0.0);
    return f;
}

inline Samples ofdm_modulate(const FreqSymbol &freq)
{
    Samples t(freq.begin(), freq.end());
    dsp::fft_inplace(t, true);
    const double scale = static_cast<double>(kFftSize) / std::sqrt(static_cast<double>(kOccupied));
    for (auto &v : t)
        v *= scale;
    return t;
}

/// Demodulates exactly kFftSize samples.
inline FreqSymbol ofdm_demodulate(std::span<const cf64> time)
{
    if (time.size() != kFftSize)
        throw InvalidArgument("ofdm_demodulate: expected 64 samples");
    Samples t(time.begin(), time.end());
    dsp::fft_inplace(t, false);
    const double scale = std::sqrt(static_cast<double>(kOccupied)) / static_cast<double>(kFftSize);
    FreqSymbol f{};
    for (std::size_t k = 0; k < kFftSize; ++k)
        f[k] = t[k] * scale;
    return f;
}

/// Body plus cyclic prefix of `cp` samples.
inline Samples with_cyclic_prefix(const Samples &body, std::size_t cp)
{
    Samples out;
    out.reserve(body.size() + cp);
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cp), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

/// 160-sample short training field: ten 16-sample periods.
inline Samples stf_time()
{
    const Samples sym = ofdm_modulate(stf_freq());
    Samples out(kStfLength);
    for (std::size_t n = 0; n < kStfLength; ++n)
        out[n] = sym[n % kFftSize];
    return out;
}

/// 160-sample long training field: 32-sample guard plus two 64-sample symbols.
inline Samples ltf_time()
{
    const Samples sym = ofdm_modulate(ltf_freq());
    Samples out = with_cyclic_prefix(sym, kLtfGuard);
    out.insert(out.end(), sym.begin(), sym.end());
    return out;
}

} // namespace rfcurate::ofdm

#endif
