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

#ifndef RFCURATE_RESAMPLE_HPP
#define RFCURATE_RESAMPLE_HPP

#include "common.hpp"

#include <cmath>
#include <numeric>

namespace rfcurate::dsp
{

struct ResamplerConfig
{
    std::size_t taps_per_phase = 32;
    double kaiser_beta = 8.0;
};

/// Polyphase rational resampler with a Kaiser-windowed sinc prototype.
///
/// The prototype runs at L * from_hz and is centred, so output sample m is
/// aligned with input time m * from_hz / to_hz (zero group delay). Each
/// polyphase branch is normalized to unit DC gain.
class RationalResampler
{
  public:
    RationalResampler(std::size_t up, std::size_t down, ResamplerConfig cfg = {})
        : up_(up), down_(down)
    {
        if (up == 0 || down == 0 || cfg.taps_per_phase == 0)
            throw InvalidArgument("resampler: factors and taps_per_phase must be positive");
        const std::size_t g = std::gcd(up, down);
        up_ /= g;
        down_ /= g;

        const std::size_t len = cfg.taps_per_phase * up_ + 1;
        center_ = (len - 1) / 2;
        const double fc = 0.5 / static_cast<double>(std::max(up_, down_));
        const double i0b = std::cyl_bessel_i(0.0, cfg.kaiser_beta);
        taps_.resize(len);
        for (std::size_t i = 0; i < len; ++i)
        {
            const double t = static_cast<double>(i) - static_cast<double>(center_);
            const double arg = 2.0 * fc * t;
            const double sinc = (t == 0.0) ? 1.0 : std::sin(kPi * arg) / (kPi * arg);
            const double r = t / static_cast<double>(center_);
            const double w = std::cyl_bessel_i(0.0, cfg.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
            taps_[i] = 2.0 * fc * sinc * w;
        }
        phase_gain_.assign(up_, 0.0);
        for (std::size_t i = 0; i < len; ++i)
            phase_gain_[i % up_] += taps_[i];
    }

    std::size_t up() const { return up_; }
    std::size_t down() const { return down_; }

    std::size_t output_length(std::size_t n) const { return (n * up_ + down_ / 2) / down_; }

    template <class T>
    Samples process(const std::vector<std::complex<T>> &x) const
    {
        const std::size_t n_out = output_length(x.size());
        const std::ptrdiff_t nh = static_cast<std::ptrdiff_t>(taps_.size());
        const std::ptrdiff_t L = static_cast<std::ptrdiff_t>(up_);
        const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x.size());
        Samples y(n_out);
        for (std::size_t m = 0; m < n_out; ++m)
        {
            const std::ptrdiff_t j0 = static_cast<std::ptrdiff_t>(m * down_ + center_);
            // n such that 0 <= j0 - n*L <= nh-1
            std::ptrdiff_t n_lo = (j0 - nh + 1 + L - 1) / L;
            if (j0 - nh + 1 < 0)
                n_lo = 0;
            std::ptrdiff_t n_hi = std::min(j0 / L, nx - 1);
            n_lo = std::max<std::ptrdiff_t>(n_lo, 0);
            cf64 acc(0.0, 0.0);
            for (std::ptrdiff_t n = n_lo; n <= n_hi; ++n)
            {
                const auto &v = x[static_cast<std::size_t>(n)];
                acc += cf64(static_cast<double>(v.real()), static_cast<double>(v.imag())) *
                       taps_[static_cast<std::size_t>(j0 - n * L)];
            }
            y[m] = acc / phase_gain_[static_cast<std::size_t>(j0 % L)];
        }
        return y;
    }

  private:
    std::size_t up_;
    std::size_t down_;
    std::size_t center_ = 0;
    std::vector<double> taps_;
    std::vector<double> phase_gain_;
};

/// Converts between the 25 Msps capture rate and the 20 Msps WiFi rate.
template <class T>
Samples resample(const std::vector<std::complex<T>> &x, double from_hz, double to_hz, ResamplerConfig cfg = {})
{
    const bool down = from_hz == kCaptureRateHz && to_hz == kWifiRateHz;
    const bool up = from_hz == kWifiRateHz && to_hz == kCaptureRateHz;
    if (!down && !up)
        throw InvalidArgument("resample: only 25e6 <-> 20e6 conversion is supported");
    const RationalResampler r(down ? 4 : 5, down ? 5 : 4, cfg);
    return r.process(x);
}

} // namespace rfcurate::dsp

#endif
