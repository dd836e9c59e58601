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

#ifndef RFCURATE_WAVEGEN_HPP
#define RFCURATE_WAVEGEN_HPP

// Synthetic 802.11a/g-legacy captures with per-device impairments.
//
// Everything here is a pure function of its seeds: packet content, device
// profiles, channels and noise are each drawn from an mt19937_64 seeded via
// derive_seed(), so a scenario is reproducible from its config alone.

#include "common.hpp"
#include "ofdm.hpp"
#include "resample.hpp"

#include <optional>
#include <random>
#include <span>

namespace rfcurate::wavegen
{

struct TxProfile
{
    int tx_id = 0;
    double cfo_hz = 0.0;
    double iq_gain_imbalance_db = 0.0;
    double iq_phase_imbalance_deg = 0.0;
    double pa_cubic_coeff = 0.0;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (std::abs(cfo_hz) > 100e3)
            throw InvalidArgument("TxProfile: cfo_hz outside +-100 kHz");
        if (std::abs(pa_cubic_coeff) >= 0.3)
            throw InvalidArgument("TxProfile: |pa_cubic_coeff| must be < 0.3");
    }

    bool operator==(const TxProfile &) const = default;
};

struct RxProfile
{
    int rx_id = 0;
    double cfo_hz = 0.0;
    double noise_power = 0.0; // linear, absolute at the receiver output
    double gain_db = 0.0;

    /// SNR of a unit-power transmission through a unit-energy channel.
    double implied_snr_db() const { return gain_db - 10.0 * std::log10(noise_power); }

    bool operator==(const RxProfile &) const = default;
};

struct ChannelTap
{
    std::size_t delay_samples = 0;
    cf64 gain{1.0, 0.0};

    bool operator==(const ChannelTap &) const = default;
};

struct GroundTruth
{
    int tx_id = 0; // -1 for the access point
    std::size_t start = 0;
    std::size_t length = 0;
    bool ack = false;
};

struct IqCapture
{
    std::vector<cf32> samples;
    double sample_rate_hz = kCaptureRateHz;
    int rx_id = 0;
    int tx_id = 0; // transmitter whose session this capture records
    int day = 0;
    std::vector<GroundTruth> ground_truth;
};

/// Parameter ranges for randomly drawn device profiles. These are
/// engineering choices: nothing published characterizes real devices.
struct ProfileRanges
{
    double tx_cfo_hz = 40e3;
    double tx_iq_gain_db = 0.5;
    double tx_iq_phase_deg = 3.0;
    double tx_pa_cubic = 0.05;
    double rx_cfo_hz = 8e3;
    double rx_gain_spread_db = 1.0;
    double rx_reference_gain_db = -33.98; // ~0.02 amplitude: noise stays below l_w
};

inline TxProfile random_tx_profile(int tx_id, std::uint64_t seed, const ProfileRanges &r = {})
{
    std::mt19937_64 rng(derive_seed(seed, 0x7478, tx_id));
    auto sym = [&](double a) { return std::uniform_real_distribution<double>(-a, a)(rng); };
    TxProfile p;
    p.tx_id = tx_id;
    p.seed = derive_seed(seed, 0x7478, tx_id, 1);
    p.cfo_hz = sym(r.tx_cfo_hz);
    p.iq_gain_imbalance_db = sym(r.tx_iq_gain_db);
    p.iq_phase_imbalance_deg = sym(r.tx_iq_phase_deg);
    p.pa_cubic_coeff = sym(r.tx_pa_cubic);
    p.validate();
    return p;
}

inline RxProfile random_rx_profile(int rx_id, std::uint64_t seed, double snr_db, const ProfileRanges &r = {})
{
    std::mt19937_64 rng(derive_seed(seed, 0x7278, rx_id));
    auto sym = [&](double a) { return std::uniform_real_distribution<double>(-a, a)(rng); };
    RxProfile p;
    p.rx_id = rx_id;
    p.cfo_hz = sym(r.rx_cfo_hz);
    p.gain_db = r.rx_reference_gain_db + sym(r.rx_gain_spread_db);
    p.noise_power = std::pow(10.0, (p.gain_db - snr_db) / 10.0);
    return p;
}

/// Exponential power-delay profile with Rayleigh taps, normalized to unit energy.
inline std::vector<ChannelTap> random_channel(std::uint64_t seed, std::size_t n_taps = 4, double decay_taps = 1.5)
{
    if (n_taps == 0)
        throw InvalidArgument("random_channel: need at least one tap");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<ChannelTap> taps(n_taps);
    double energy = 0.0;
    for (std::size_t d = 0; d < n_taps; ++d)
    {
        const double s = std::exp(-static_cast<double>(d) / (2.0 * decay_taps));
        const double re = g(rng), im = g(rng);
        taps[d] = {d, cf64(re, im) * s};
        energy += std::norm(taps[d].gain);
    }
    for (auto &t : taps)
        t.gain /= std::sqrt(energy);
    return taps;
}

struct Packet
{
    Samples samples;                         // 20 Msps
    std::vector<ofdm::FreqSymbol> payload;   // transmitted QPSK per data symbol
};

inline Packet synth_packet_detailed(int payload_symbols, std::uint64_t seed)
{
    if (payload_symbols <= 0)
        throw InvalidArgument("synth_packet: payload_symbols must be >= 1");
    Packet pkt;
    pkt.samples = ofdm::stf_time();
    const Samples ltf = ofdm::ltf_time();
    pkt.samples.insert(pkt.samples.end(), ltf.begin(), ltf.end());

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> bit(0, 1);
    const double a = 1.0 / std::sqrt(2.0);
    for (int s = 0; s < payload_symbols; ++s)
    {
        ofdm::FreqSymbol f{};
        for (int sc : ofdm::occupied_subcarriers())
            f[ofdm::bin_of(sc)] = cf64(bit(rng) ? a : -a, bit(rng) ? a : -a);
        const Samples sym = ofdm::with_cyclic_prefix(ofdm::ofdm_modulate(f), ofdm::kCpLength);
        pkt.samples.insert(pkt.samples.end(), sym.begin(), sym.end());
        pkt.payload.push_back(f);
    }
    return pkt;
}

/// L-STF ++ L-LTF ++ payload_symbols QPSK OFDM symbols at 20 Msps.
inline Samples synth_packet(int payload_symbols, std::uint64_t seed)
{
    return synth_packet_detailed(payload_symbols, seed).samples;
}

inline void rotate_inplace(Samples &x, double cfo_hz, double fs)
{
    if (cfo_hz == 0.0)
        return;
    const double w = 2.0 * kPi * cfo_hz / fs;
    for (std::size_t n = 0; n < x.size(); ++n)
        x[n] *= std::polar(1.0, w * static_cast<double>(n));
}

/// Full-length FIR convolution; output has size x.size() + max delay.
inline Samples convolve(const Samples &x, std::span<const ChannelTap> taps)
{
    std::size_t max_delay = 0;
    for (const auto &t : taps)
        max_delay = std::max(max_delay, t.delay_samples);
    Samples y(x.size() + max_delay);
    for (const auto &t : taps)
        for (std::size_t n = 0; n < x.size(); ++n)
            y[n + t.delay_samples] += x[n] * t.gain;
    return y;
}

inline void add_awgn(Samples &x, double noise_power, std::uint64_t seed)
{
    if (noise_power <= 0.0)
        return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(noise_power / 2.0));
    for (auto &v : x)
        v += cf64(g(rng), g(rng));
}

/// Transmitter impairments, multipath channel and receiver front end, in
/// that order: IQ imbalance, cubic PA, Tx CFO, FIR channel, Rx CFO, Rx gain,
/// AWGN. All rotations use 20 Msps sample indices starting at 0.
inline Samples apply_tx_channel_rx(const Samples &packet, const TxProfile &tx, std::span<const ChannelTap> taps,
                                   const RxProfile &rx, std::uint64_t noise_seed)
{
    if (packet.empty())
        throw InvalidArgument("apply_tx_channel_rx: empty packet");
    if (taps.empty())
        throw InvalidArgument("apply_tx_channel_rx: empty tap list");
    double tap_energy = 0.0;
    for (const auto &t : taps)
        tap_energy += std::norm(t.gain);
    if (!(tap_energy > 0.0))
        throw InvalidArgument("apply_tx_channel_rx: channel has zero energy");

    const double g = std::pow(10.0, tx.iq_gain_imbalance_db / 20.0);
    const double phi = tx.iq_phase_imbalance_deg * kPi / 180.0;
    const cf64 mu = (1.0 + g * std::polar(1.0, -phi)) / 2.0;
    const cf64 nu = (1.0 - g * std::polar(1.0, phi)) / 2.0;

    Samples x(packet.size());
    for (std::size_t n = 0; n < packet.size(); ++n)
    {
        const cf64 v = mu * packet[n] + nu * std::conj(packet[n]);
        x[n] = v + tx.pa_cubic_coeff * v * std::norm(v);
    }
    rotate_inplace(x, tx.cfo_hz, kWifiRateHz);
    Samples y = convolve(x, taps);
    rotate_inplace(y, rx.cfo_hz, kWifiRateHz);
    const double amp = std::pow(10.0, rx.gain_db / 20.0);
    if (amp != 1.0)
        for (auto &v : y)
            v *= amp;
    add_awgn(y, rx.noise_power, noise_seed);
    return y;
}

struct Position
{
    double x = 0.0;
    double y = 0.0;
};

struct ScenarioConfig
{
    int n_days = 1;
    int n_tx = 1;
    int n_rx = 1;
    int packets_per_capture = 10;
    double snr_db = 20.0;
    std::uint64_t seed = 1;

    int payload_symbols = 20;          // 1920 samples @20 Msps, 2400 @25 Msps
    bool acks = true;
    std::size_t ack_length = 1200;     // @20 Msps; 1500 @25 Msps
    std::size_t sifs_samples = 250;    // @25 Msps (10 us)
    std::size_t idle_min = 1500;       // @25 Msps
    std::size_t idle_max = 5000;
    std::size_t lead_in_max = 3000;
    std::size_t capture_samples = 0;   // 0: sized to fit; 12'800'000 emulates 0.512 s
    std::size_t channel_taps = 4;
    double pathloss_exponent = 0.0;    // 0 disables geometry-dependent gain
    double pathloss_ref_m = 2.0;
    ProfileRanges ranges{};
    dsp::ResamplerConfig resampler{};

    void validate() const
    {
        if (n_days < 1 || n_tx < 1 || n_rx < 1 || packets_per_capture < 1)
            throw InvalidArgument("scenario: all counts must be >= 1");
        if (n_days > 255 || n_tx > 65535 || n_rx > 65535)
            throw InvalidArgument("scenario: dimensions exceed label width");
        if (idle_min > idle_max)
            throw InvalidArgument("scenario: idle_min > idle_max");
    }
};

struct Scenario
{
    ScenarioConfig config;
    std::vector<TxProfile> tx;
    std::vector<RxProfile> rx;
    TxProfile access_point;
    std::vector<Position> tx_positions;
    std::vector<Position> rx_positions;
    std::vector<std::vector<ChannelTap>> taps; // indexed by capture_index()
    std::vector<IqCapture> captures;           // indexed by capture_index()

    std::size_t capture_index(int day, int tx_id, int rx_id) const
    {
        return (static_cast<std::size_t>(day) * static_cast<std::size_t>(config.n_tx) +
                static_cast<std::size_t>(tx_id)) *
                   static_cast<std::size_t>(config.n_rx) +
               static_cast<std::size_t>(rx_id);
    }
};

/// Pair gain in dB from log-distance path loss; 0 when geometry is disabled.
inline double pathloss_gain_db(const ScenarioConfig &cfg, const Position &a, const Position &b)
{
    if (cfg.pathloss_exponent <= 0.0)
        return 0.0;
    const double d = std::max(0.1, std::hypot(a.x - b.x, a.y - b.y));
    return -10.0 * cfg.pathloss_exponent * std::log10(d / cfg.pathloss_ref_m);
}

namespace detail
{

inline void add_at(std::vector<cf64> &dst, std::size_t pos, const Samples &src)
{
    for (std::size_t i = 0; i < src.size() && pos + i < dst.size(); ++i)
        dst[pos + i] += src[i];
}

} // namespace detail

/// One capture per (day, tx, rx). Tx profiles stay fixed across days; channel
/// taps are redrawn per day. Packet content and spacing are shared by all
/// receivers of a session, while each receiver starts recording at its own
/// random offset (receivers are not synchronized).
inline Scenario make_scenario(const ScenarioConfig &cfg)
{
    cfg.validate();
    Scenario sc;
    sc.config = cfg;
    for (int t = 0; t < cfg.n_tx; ++t)
        sc.tx.push_back(random_tx_profile(t, cfg.seed, cfg.ranges));
    for (int r = 0; r < cfg.n_rx; ++r)
        sc.rx.push_back(random_rx_profile(r, cfg.seed, cfg.snr_db, cfg.ranges));
    sc.access_point = random_tx_profile(-1, derive_seed(cfg.seed, 0x6170), cfg.ranges);

    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.n_tx))));
    for (int t = 0; t < cfg.n_tx; ++t)
        sc.tx_positions.push_back({static_cast<double>(t % cols), static_cast<double>(t / cols)});
    {
        std::mt19937_64 rng(derive_seed(cfg.seed, 0x706f73));
        std::uniform_real_distribution<double> u(-1.0, static_cast<double>(cols));
        for (int r = 0; r < cfg.n_rx; ++r)
        {
            const double x = u(rng);
            sc.rx_positions.push_back({x, u(rng)});
        }
    }

    const std::size_t n_caps = static_cast<std::size_t>(cfg.n_days) * static_cast<std::size_t>(cfg.n_tx) *
                               static_cast<std::size_t>(cfg.n_rx);
    sc.taps.resize(n_caps);
    sc.captures.resize(n_caps);
    for (int d = 0; d < cfg.n_days; ++d)
        for (int t = 0; t < cfg.n_tx; ++t)
            for (int r = 0; r < cfg.n_rx; ++r)
                sc.taps[sc.capture_index(d, t, r)] = random_channel(derive_seed(cfg.seed, 0x6368, d, t, r),
                                                                    cfg.channel_taps);

    const dsp::RationalResampler up(5, 4, cfg.resampler);
    const std::size_t pkt25 =
        up.output_length(ofdm::kPreambleLength + ofdm::kSymbolLength * static_cast<std::size_t>(cfg.payload_symbols));
    const std::size_t ack25 = up.output_length(cfg.ack_length);

    // Validate the fixed-duration layout before doing any synthesis work.
    if (cfg.capture_samples != 0)
    {
        const std::size_t worst = cfg.lead_in_max + static_cast<std::size_t>(cfg.packets_per_capture) *
                                                        (pkt25 + 64 + (cfg.acks ? cfg.sifs_samples + ack25 + 64 : 0) +
                                                         cfg.idle_max);
        if (worst > cfg.capture_samples)
            throw InvalidArgument("scenario: packets cannot fit in the capture duration");
    }

    parallel_for(n_caps, [&](std::size_t idx) {
        const int r = static_cast<int>(idx % static_cast<std::size_t>(cfg.n_rx));
        const int t = static_cast<int>((idx / static_cast<std::size_t>(cfg.n_rx)) % static_cast<std::size_t>(cfg.n_tx));
        const int d = static_cast<int>(idx / (static_cast<std::size_t>(cfg.n_rx) * static_cast<std::size_t>(cfg.n_tx)));

        RxProfile rx_clean = sc.rx[static_cast<std::size_t>(r)];
        rx_clean.gain_db += pathloss_gain_db(cfg, sc.tx_positions[static_cast<std::size_t>(t)],
                                             sc.rx_positions[static_cast<std::size_t>(r)]);
        const double noise_power = rx_clean.noise_power;
        rx_clean.noise_power = 0.0;
        const auto &taps = sc.taps[idx];
        const std::vector<ChannelTap> ap_taps = random_channel(derive_seed(cfg.seed, 0x6163, d, r), cfg.channel_taps);
        RxProfile rx_ap = sc.rx[static_cast<std::size_t>(r)];
        rx_ap.noise_power = 0.0;

        std::mt19937_64 session(derive_seed(cfg.seed, 0x7365, d, t));
        std::mt19937_64 local(derive_seed(cfg.seed, 0x6c6f, d, t, r));
        std::uniform_int_distribution<std::size_t> idle(cfg.idle_min, cfg.idle_max);

        struct Placed
        {
            std::size_t pos;
            Samples wave;
            bool ack;
        };
        std::vector<Placed> placed;
        std::size_t pos = std::uniform_int_distribution<std::size_t>(cfg.idle_min, std::max(cfg.idle_min, cfg.lead_in_max))(local);
        for (int p = 0; p < cfg.packets_per_capture; ++p)
        {
            const Samples pkt = synth_packet(cfg.payload_symbols, derive_seed(cfg.seed, 0x706b, d, t, p));
            Samples wave = up.process(apply_tx_channel_rx(pkt, sc.tx[static_cast<std::size_t>(t)], taps, rx_clean, 0));
            const std::size_t len = wave.size();
            placed.push_back({pos, std::move(wave), false});
            pos += len;
            if (cfg.acks)
            {
                pos += cfg.sifs_samples;
                Samples ack = synth_packet(1, derive_seed(cfg.seed, 0x616b, d, t, p));
                ack.resize(cfg.ack_length);
                Samples ack_wave = up.process(apply_tx_channel_rx(ack, sc.access_point, ap_taps, rx_ap, 0));
                const std::size_t alen = ack_wave.size();
                placed.push_back({pos, std::move(ack_wave), true});
                pos += alen;
            }
            pos += idle(session);
        }
        std::size_t total = pos;
        if (cfg.capture_samples != 0)
        {
            if (pos > cfg.capture_samples)
                throw InvalidArgument("scenario: packets cannot fit in the capture duration");
            total = cfg.capture_samples;
        }

        Samples buf(total);
        IqCapture cap;
        cap.rx_id = r;
        cap.tx_id = t;
        cap.day = d;
        for (const auto &pl : placed)
        {
            detail::add_at(buf, pl.pos, pl.wave);
            cap.ground_truth.push_back({pl.ack ? -1 : t, pl.pos, pl.wave.size(), pl.ack});
        }
        add_awgn(buf, noise_power, derive_seed(cfg.seed, 0x6e6f, d, t, r));
        cap.samples.resize(total);
        for (std::size_t i = 0; i < total; ++i)
            cap.samples[i] = cf32(static_cast<float>(buf[i].real()), static_cast<float>(buf[i].imag()));
        sc.captures[idx] = std::move(cap);
    });
    return sc;
}

} // namespace rfcurate::wavegen

#endif
