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

#ifndef RFCURATE_PREAMBLEEQ_HPP
#define RFCURATE_PREAMBLEEQ_HPP

// Preamble-based equalization of detected packets:
//
//   25 Msps burst -> resample to 20 Msps -> L-STF sync + CFO estimate
//   -> CFO correction -> L-LTF channel estimate -> per-subcarrier MMSE
//   -> CFO re-applied -> resample to 25 Msps -> first 256 samples.
//
// The CFO is put back after equalization because it is part of the
// transmitter fingerprint.

#include "burstdetect.hpp"
#include "common.hpp"
#include "ofdm.hpp"
#include "resample.hpp"
#include "sigstore.hpp"
#include "wavegen.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>

namespace rfcurate::eq
{

struct ChannelEstimate
{
    std::array<cf64, ofdm::kOccupied> gains{}; // subcarriers -26..-1, 1..26
    std::int64_t source_packet = -1;

    cf64 at_subcarrier(int s) const
    {
        if (s == 0 || s < -26 || s > 26)
            throw InvalidArgument("ChannelEstimate: subcarrier not occupied");
        return gains[static_cast<std::size_t>(s < 0 ? s + 26 : s + 25)];
    }

    bool finite() const
    {
        return std::all_of(gains.begin(), gains.end(),
                           [](const cf64 &g) { return std::isfinite(g.real()) && std::isfinite(g.imag()); });
    }
};

struct SyncResult
{
    std::size_t refined_start = 0; // samples @20 Msps
    double cfo_hz = 0.0;           // coarse + fine
    double coarse_cfo_hz = 0.0;    // lag-16 estimate alone
    double peak_metric = 0.0;      // max normalized autocorrelation
    bool detected = false;
};

struct SyncParams
{
    double threshold = 0.8;          // on the normalized lag-16 metric
    std::size_t search_length = 400; // candidate start positions examined
    double edge_fraction = 0.5;      // plateau edges located at this fraction of the peak
    bool fine_cfo = true;            // refine with the full L-STF/L-LTF
    std::size_t fine_backoff = 4;    // FFT windows start this many samples early
};

inline constexpr std::size_t kAutocorrWindow = 128;
inline constexpr std::size_t kLag = ofdm::kStfPeriod;

inline Samples correct_cfo(const Samples &x, double cfo_hz, double fs = kWifiRateHz)
{
    Samples y = x;
    wavegen::rotate_inplace(y, -cfo_hz, fs);
    return y;
}

inline Samples reapply_cfo(const Samples &x, double cfo_hz, double fs = kWifiRateHz)
{
    Samples y = x;
    wavegen::rotate_inplace(y, cfo_hz, fs);
    return y;
}

/// Channel from the two L-LTF symbols of a packet whose start is at index 0.
inline ChannelEstimate estimate_channel(const Samples &x)
{
    if (x.size() < ofdm::kPreambleLength)
        throw InvalidArgument("estimate_channel: need the full 320-sample preamble");
    Samples avg(ofdm::kFftSize);
    for (std::size_t i = 0; i < ofdm::kFftSize; ++i)
        avg[i] = 0.5 * (x[ofdm::kLtfFirst + i] + x[ofdm::kLtfSecond + i]);
    const auto y = ofdm::ofdm_demodulate(avg);
    const auto ref = ofdm::ltf_freq();
    ChannelEstimate h;
    std::size_t i = 0;
    for (int s : ofdm::occupied_subcarriers())
        h.gains[i++] = y[ofdm::bin_of(s)] / ref[ofdm::bin_of(s)];
    return h;
}

/// Per-subcarrier noise variance from the difference of the two L-LTF symbols.
inline double estimate_noise_var(const Samples &x)
{
    if (x.size() < ofdm::kPreambleLength)
        throw InvalidArgument("estimate_noise_var: need the full 320-sample preamble");
    const auto a = ofdm::ofdm_demodulate(std::span<const cf64>(x.data() + ofdm::kLtfFirst, ofdm::kFftSize));
    const auto b = ofdm::ofdm_demodulate(std::span<const cf64>(x.data() + ofdm::kLtfSecond, ofdm::kFftSize));
    double acc = 0.0;
    for (int s : ofdm::occupied_subcarriers())
        acc += std::norm(a[ofdm::bin_of(s)] - b[ofdm::bin_of(s)]);
    return acc / (2.0 * static_cast<double>(ofdm::kOccupied));
}

/// Preamble as seen through `h`, using a cyclic model for each field.
inline Samples reconstruct_preamble(const ChannelEstimate &h)
{
    ofdm::FreqSymbol hs{};
    std::size_t i = 0;
    for (int s : ofdm::occupied_subcarriers())
        hs[ofdm::bin_of(s)] = h.gains[i++];
    auto stf = ofdm::stf_freq();
    auto ltf = ofdm::ltf_freq();
    for (std::size_t k = 0; k < ofdm::kFftSize; ++k)
    {
        stf[k] *= hs[k];
        ltf[k] *= hs[k];
    }
    const Samples s = ofdm::ofdm_modulate(stf);
    const Samples l = ofdm::ofdm_modulate(ltf);
    Samples out(ofdm::kPreambleLength);
    for (std::size_t n = 0; n < ofdm::kStfLength; ++n)
        out[n] = s[n % ofdm::kFftSize];
    for (std::size_t n = 0; n < ofdm::kLtfGuard; ++n)
        out[ofdm::kStfLength + n] = l[ofdm::kFftSize - ofdm::kLtfGuard + n];
    for (std::size_t n = 0; n < ofdm::kFftSize; ++n)
    {
        out[ofdm::kLtfFirst + n] = l[n];
        out[ofdm::kLtfSecond + n] = l[n];
    }
    return out;
}

/// Least-squares fit of the 52 gains to a short FIR with taps at delays
/// [first_delay, first_delay + n_taps). Suppresses estimation noise when the
/// delay spread is known to be short.
inline ChannelEstimate smooth_channel(const ChannelEstimate &h, int first_delay = -4, int n_taps = 17)
{
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(ofdm::kOccupied), n_taps);
    Eigen::VectorXcd g(static_cast<Eigen::Index>(ofdm::kOccupied));
    Eigen::Index row = 0;
    for (int s : ofdm::occupied_subcarriers())
    {
        for (int d = 0; d < n_taps; ++d)
            F(row, d) = std::polar(1.0, -2.0 * kPi * s * (first_delay + d) / static_cast<double>(ofdm::kFftSize));
        g(row) = h.gains[static_cast<std::size_t>(row)];
        ++row;
    }
    const Eigen::VectorXcd taps = F.colPivHouseholderQr().solve(g);
    const Eigen::VectorXcd fit = F * taps;
    ChannelEstimate out = h;
    for (Eigen::Index i = 0; i < fit.size(); ++i)
        out.gains[static_cast<std::size_t>(i)] = fit(i);
    return out;
}

/// Residual CFO by weighted least squares on the phase of x * conj(model),
/// where the model is the known preamble through the (smoothed) L-LTF
/// channel estimate. Spanning the whole 320-sample preamble cuts the error
/// of the lag-16 estimate about fourfold at 20 dB SNR.
inline double refine_cfo(const Samples &aligned, double coarse_hz, int iterations = 2)
{
    if (aligned.size() < ofdm::kPreambleLength)
        return coarse_hz;
    const Samples pre(aligned.begin(), aligned.begin() + static_cast<std::ptrdiff_t>(ofdm::kPreambleLength));
    double total = coarse_hz;
    for (int it = 0; it < iterations; ++it)
    {
        const Samples z = correct_cfo(pre, total);
        const Samples model = reconstruct_preamble(smooth_channel(estimate_channel(z)));
        double sw = 0.0, sn = 0.0, sp = 0.0;
        std::vector<double> phase(z.size(), 0.0), weight(z.size(), 0.0);
        for (std::size_t n = ofdm::kStfPeriod; n < z.size(); ++n)
        {
            if (n >= ofdm::kStfLength && n < ofdm::kStfLength + 8)
                continue; // field boundary: cyclic model does not hold
            const cf64 c = z[n] * std::conj(model[n]);
            weight[n] = std::norm(model[n]);
            phase[n] = std::arg(c);
            sw += weight[n];
            sn += weight[n] * static_cast<double>(n);
            sp += weight[n] * phase[n];
        }
        if (!(sw > 0.0))
            break;
        const double nbar = sn / sw, pbar = sp / sw;
        double num = 0.0, den = 0.0;
        for (std::size_t n = 0; n < z.size(); ++n)
        {
            if (weight[n] == 0.0)
                continue;
            const double dn = static_cast<double>(n) - nbar;
            num += weight[n] * dn * (phase[n] - pbar);
            den += weight[n] * dn * dn;
        }
        if (!(den > 0.0))
            break;
        total += (num / den) * kWifiRateHz / (2.0 * kPi);
    }
    return total;
}

/// L-STF detection on a 20 Msps burst.
///
/// The normalized lag-16 metric M(n) = |P(n)| / E(n) decides detection. The
/// plateau of |P(n)| spans the 17 starts whose 144-sample window lies inside
/// the L-STF; both of its edges ramp linearly over 128 samples, so the start
/// is recovered from the half-peak crossings: midpoint minus 8 when both are
/// visible, falling crossing minus 80 when the burst begins inside the STF.
inline SyncResult detect_lstf(const Samples &x, const SyncParams &p = {})
{
    if (x.size() < ofdm::kPreambleLength)
        throw InvalidArgument("detect_lstf: need at least 320 samples");
    const std::size_t span = kAutocorrWindow + kLag;
    const std::size_t n_pos = std::min(x.size() - span, p.search_length) + 1;

    std::vector<cf64> P(n_pos);
    std::vector<double> E(n_pos);
    cf64 acc_p(0.0, 0.0);
    double acc_e = 0.0;
    for (std::size_t k = 0; k < kAutocorrWindow; ++k)
    {
        acc_p += x[k] * std::conj(x[k + kLag]);
        acc_e += std::norm(x[k + kLag]);
    }
    for (std::size_t n = 0; n < n_pos; ++n)
    {
        if (n > 0)
        {
            const std::size_t out = n - 1, in = n - 1 + kAutocorrWindow;
            acc_p += x[in] * std::conj(x[in + kLag]) - x[out] * std::conj(x[out + kLag]);
            acc_e += std::norm(x[in + kLag]) - std::norm(x[out + kLag]);
        }
        P[n] = acc_p;
        E[n] = std::max(acc_e, 0.0);
    }

    SyncResult res;
    std::size_t n_pk = 0;
    double a_pk = -1.0;
    for (std::size_t n = 0; n < n_pos; ++n)
    {
        const double m = E[n] > 0.0 ? std::abs(P[n]) / E[n] : 0.0;
        res.peak_metric = std::max(res.peak_metric, m);
        if (std::abs(P[n]) > a_pk)
        {
            a_pk = std::abs(P[n]);
            n_pk = n;
        }
    }
    res.detected = res.peak_metric >= p.threshold && a_pk > 0.0;
    if (!res.detected)
        return res;

    const double half = p.edge_fraction * a_pk;
    auto A = [&](std::size_t n) { return std::abs(P[n]); };
    std::size_t lo = n_pk, hi = n_pk;
    while (lo > 0 && A(lo - 1) >= half)
        --lo;
    while (hi + 1 < n_pos && A(hi + 1) >= half)
        ++hi;
    const bool has_rise = lo > 0;
    const bool has_fall = hi + 1 < n_pos;
    const double ramp = static_cast<double>(kAutocorrWindow) * (1.0 - p.edge_fraction);
    double rise = 0.0, fall = 0.0;
    if (has_rise)
        rise = static_cast<double>(lo - 1) + (half - A(lo - 1)) / std::max(1e-300, A(lo) - A(lo - 1));
    if (has_fall)
        fall = static_cast<double>(hi) + (A(hi) - half) / std::max(1e-300, A(hi) - A(hi + 1));
    double start = static_cast<double>(n_pk);
    if (has_rise && has_fall)
        start = 0.5 * (rise + fall) - 0.5 * static_cast<double>(kLag);
    else if (has_fall)
        start = fall - static_cast<double>(kLag) - ramp;
    else if (has_rise)
        start = rise + ramp;
    res.refined_start = static_cast<std::size_t>(std::clamp(std::lround(start), 0L, static_cast<long>(n_pos - 1)));

    res.coarse_cfo_hz = -std::arg(P[res.refined_start]) * kWifiRateHz / (2.0 * kPi * static_cast<double>(kLag));
    res.cfo_hz = res.coarse_cfo_hz;
    if (p.fine_cfo)
    {
        const std::size_t a0 = res.refined_start >= p.fine_backoff ? res.refined_start - p.fine_backoff : 0;
        if (x.size() - a0 >= ofdm::kPreambleLength)
        {
            const Samples aligned(x.begin() + static_cast<std::ptrdiff_t>(a0), x.end());
            res.cfo_hz = refine_cfo(aligned, res.coarse_cfo_hz);
        }
    }
    return res;
}

namespace detail
{

struct Block
{
    std::size_t body; // first sample of the 64-sample FFT window
    std::size_t cp;   // cyclic extension regenerated in front of it
};

/// FFT windows of a packet starting at index 0 that fit in `len` samples.
inline std::vector<Block> packet_blocks(std::size_t len)
{
    std::vector<Block> b = {{16, 16}, {96, 16}, {ofdm::kLtfFirst, ofdm::kLtfGuard}, {ofdm::kLtfSecond, 0}};
    for (std::size_t s = ofdm::kPreambleLength; s + ofdm::kSymbolLength <= len; s += ofdm::kSymbolLength)
        b.push_back({s + ofdm::kCpLength, ofdm::kCpLength});
    std::erase_if(b, [&](const Block &blk) { return blk.body + ofdm::kFftSize > len; });
    return b;
}

} // namespace detail

/// Per-symbol MMSE equalization of a packet starting at index 0. Each FFT
/// window (both STF periods, both LTF symbols, every complete data symbol)
/// is weighted per occupied bin by conj(H)/(|H|^2 + noise_var); unoccupied
/// bins are zeroed and cyclic prefixes are rebuilt from the equalized body.
/// Samples not covered by a window come out as zero.
inline Samples mmse_equalize(const Samples &x, const ChannelEstimate &h, double noise_var)
{
    if (!(noise_var >= 0.0))
        throw InvalidArgument("mmse_equalize: noise_var must be >= 0");
    ofdm::FreqSymbol w{};
    std::size_t i = 0;
    for (int s : ofdm::occupied_subcarriers())
    {
        const cf64 g = h.gains[i++];
        const double den = std::norm(g) + noise_var;
        if (!(den > 0.0))
            throw InvalidArgument("mmse_equalize: singular equalizer (zero channel gain with zero noise)");
        w[ofdm::bin_of(s)] = std::conj(g) / den;
    }

    Samples y(x.size());
    if (std::isinf(noise_var))
        return y;
    for (const auto &blk : detail::packet_blocks(x.size()))
    {
        auto f = ofdm::ofdm_demodulate(std::span<const cf64>(x.data() + blk.body, ofdm::kFftSize));
        for (std::size_t k = 0; k < ofdm::kFftSize; ++k)
            f[k] *= w[k];
        const Samples body = ofdm::ofdm_modulate(f);
        std::copy(body.begin(), body.end(), y.begin() + static_cast<std::ptrdiff_t>(blk.body));
        for (std::size_t c = 0; c < blk.cp; ++c)
            y[blk.body - blk.cp + c] = body[ofdm::kFftSize - blk.cp + c];
    }
    return y;
}

using NoiseVarEstimator = std::function<double(const Samples &)>;

struct EqualizerParams
{
    SyncParams sync{};
    dsp::ResamplerConfig resampler{};
    std::size_t preroll = 100;       // @25 Msps, taken before the burst start
    std::size_t postroll = 64;       // @25 Msps
    std::size_t timing_backoff = 4;  // @20 Msps, keeps FFT windows inside the CP
    NoiseVarEstimator noise_var_estimator = estimate_noise_var;
};

struct EqualizeOutcome
{
    std::optional<store::IdSignal> signal;
    SyncResult sync;
    ChannelEstimate channel;
    double noise_var = 0.0;
    Samples equalized_20;            // CFO-corrected, equalized, packet start at 0
};

/// Full chain for one screened burst. `signal` is empty when the L-STF is not
/// found or the burst is too short to hold a preamble.
inline EqualizeOutcome equalize_packet(const wavegen::IqCapture &cap, const burst::Burst &b,
                                       const EqualizerParams &p = {})
{
    EqualizeOutcome out;
    const std::size_t seg_start = b.start_index >= p.preroll ? b.start_index - p.preroll : 0;
    const std::size_t seg_end = std::min(cap.samples.size(), b.end() + p.postroll);
    if (seg_end <= seg_start)
        return out;
    const std::vector<cf32> seg(cap.samples.begin() + static_cast<std::ptrdiff_t>(seg_start),
                                cap.samples.begin() + static_cast<std::ptrdiff_t>(seg_end));
    const Samples x20 = dsp::resample(seg, kCaptureRateHz, kWifiRateHz, p.resampler);
    if (x20.size() < ofdm::kPreambleLength)
        return out;

    out.sync = detect_lstf(x20, p.sync);
    if (!out.sync.detected)
        return out;
    const std::size_t a0 = out.sync.refined_start >= p.timing_backoff ? out.sync.refined_start - p.timing_backoff : 0;
    if (x20.size() - a0 < ofdm::kPreambleLength)
    {
        out.sync.detected = false;
        return out;
    }
    const Samples aligned(x20.begin() + static_cast<std::ptrdiff_t>(a0), x20.end());
    const Samples corrected = correct_cfo(aligned, out.sync.cfo_hz);
    out.channel = estimate_channel(corrected);
    out.noise_var = p.noise_var_estimator(corrected);
    out.equalized_20 = mmse_equalize(corrected, out.channel, out.noise_var);
    const Samples restored = reapply_cfo(out.equalized_20, out.sync.cfo_hz);
    const Samples y25 = dsp::resample(restored, kWifiRateHz, kCaptureRateHz, p.resampler);
    if (y25.size() < kIdSignalLength)
        return out;
    out.signal = store::IdSignal::from_samples(y25, cap.tx_id, cap.rx_id, cap.day, true);
    if (!out.signal->finite())
        out.signal.reset();
    return out;
}

inline std::optional<store::IdSignal> equalize_pipeline(const wavegen::IqCapture &cap, const burst::Burst &b,
                                                        const EqualizerParams &p = {})
{
    return equalize_packet(cap, b, p).signal;
}

} // namespace rfcurate::eq

#endif
