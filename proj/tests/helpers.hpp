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


// Small independent oracles and fixtures shared by the test binaries.

#ifndef RFCURATE_TEST_HELPERS_HPP
#define RFCURATE_TEST_HELPERS_HPP

#include "rfcurate.hpp"

#include <bit>
#include <filesystem>
#include <optional>
#include <random>

namespace testutil
{

using namespace rfcurate;

/// O(N^2) DFT, forward sign convention exp(-j 2 pi k n / N).
inline Samples naive_dft(const Samples &x)
{
    const std::size_t n = x.size();
    Samples y(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        cf64 acc{};
        for (std::size_t i = 0; i < n; ++i)
            acc += x[i] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * i % n) / static_cast<double>(n));
        y[k] = acc;
    }
    return y;
}

inline Samples random_samples(std::size_t n, std::uint64_t seed, double sigma = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    Samples x(n);
    for (auto &v : x)
        v = cf64(g(rng), g(rng));
    return x;
}

inline double max_abs_diff(const Samples &a, const Samples &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline store::IdSignal random_signal(std::mt19937_64 &rng, int tx, int rx, int day, bool eq)
{
    std::normal_distribution<float> g(0.0f, 0.1f);
    store::IdSignal s;
    s.tx = tx;
    s.rx = rx;
    s.day = day;
    s.equalized = eq;
    for (auto &v : s.samples)
        v = cf32(g(rng), g(rng));
    return s;
}

/// Store whose counts follow the given tensors; sample values are random.
inline store::SignalStore store_from_counts(const store::CountTensor &c, const store::CountTensor &c_eq,
                                            std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    store::SignalStore st(c.dims());
    for (int d = 0; d < c.n_days(); ++d)
        for (int t = 0; t < c.n_tx(); ++t)
            for (int r = 0; r < c.n_rx(); ++r)
            {
                for (std::uint32_t i = 0; i < c.at(d, t, r); ++i)
                    st.append(random_signal(rng, t, r, d, false));
                for (std::uint32_t i = 0; i < c_eq.at(d, t, r); ++i)
                    st.append(random_signal(rng, t, r, d, true));
            }
    return st;
}

/// One packet pushed through the impairment chain, resampled to 25 Msps and
/// placed after `lead` samples of silence (plus noise if rx has any).
inline wavegen::IqCapture packet_capture(const Samples &pkt20, const wavegen::TxProfile &tx,
                                         const std::vector<wavegen::ChannelTap> &taps, const wavegen::RxProfile &rx,
                                         std::uint64_t seed, std::size_t lead = 400, std::size_t tail = 400)
{
    wavegen::RxProfile clean = rx;
    clean.noise_power = 0.0;
    const Samples y20 = wavegen::apply_tx_channel_rx(pkt20, tx, taps, clean, 0);
    const Samples y25 = dsp::resample(y20, kWifiRateHz, kCaptureRateHz);
    Samples buf(lead + y25.size() + tail);
    std::copy(y25.begin(), y25.end(), buf.begin() + static_cast<std::ptrdiff_t>(lead));
    wavegen::add_awgn(buf, rx.noise_power, seed);
    wavegen::IqCapture cap;
    cap.samples.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        cap.samples[i] = cf32(static_cast<float>(buf[i].real()), static_cast<float>(buf[i].imag()));
    cap.ground_truth.push_back({0, lead, y25.size(), false});
    return cap;
}

/// Burst covering the packet of a packet_capture().
inline burst::Burst packet_burst(const wavegen::IqCapture &cap)
{
    return {cap.ground_truth.front().start, cap.ground_truth.front().length};
}

/// EVM in dB of the payload of an equalized 20 Msps packet whose L-STF
/// starts at `offset`, against the transmitted constellation.
inline double payload_evm_db(const Samples &eq20, std::size_t offset, const wavegen::Packet &ref)
{
    double err = 0.0, pow = 0.0;
    for (std::size_t s = 0; s < ref.payload.size(); ++s)
    {
        const std::size_t body = offset + ofdm::kPreambleLength + ofdm::kSymbolLength * s + ofdm::kCpLength;
        if (body + ofdm::kFftSize > eq20.size())
            break;
        const auto f = ofdm::ofdm_demodulate(std::span<const cf64>(eq20.data() + body, ofdm::kFftSize));
        for (int sc : ofdm::occupied_subcarriers())
        {
            const std::size_t k = ofdm::bin_of(sc);
            err += std::norm(f[k] - ref.payload[s][k]);
            pow += std::norm(ref.payload[s][k]);
        }
    }
    return 10.0 * std::log10(err / pow);
}

/// std/mean of |H_k| over the occupied subcarriers.
inline double magnitude_spread(const eq::ChannelEstimate &h)
{
    double m = 0.0;
    for (const auto &g : h.gains)
        m += std::abs(g);
    m /= static_cast<double>(h.gains.size());
    double v = 0.0;
    for (const auto &g : h.gains)
        v += (std::abs(g) - m) * (std::abs(g) - m);
    return std::sqrt(v / static_cast<double>(h.gains.size())) / m;
}

/// Small random selection instance; C_eq <= C cell-wise.
struct Instance
{
    store::CountTensor c, c_eq;
    subset::SubsetSpec spec;
};

inline Instance random_instance(std::mt19937_64 &rng, int max_days = 2, int max_tx = 4, int max_rx = 4)
{
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const store::StoreDims dims{uni(1, max_days), uni(1, max_tx), uni(1, max_rx)};
    Instance in{store::CountTensor(dims), store::CountTensor(dims), {}};
    for (int d = 0; d < dims.n_days; ++d)
        for (int t = 0; t < dims.n_tx; ++t)
            for (int r = 0; r < dims.n_rx; ++r)
            {
                const int v = uni(0, 12);
                in.c.at(d, t, r) = static_cast<std::uint32_t>(v);
                in.c_eq.at(d, t, r) = static_cast<std::uint32_t>(std::max(0, v - uni(0, 3)));
            }
    const double ps[] = {1.0, 0.9, 0.75, 0.5};
    in.spec.n_tx_required = uni(1, dims.n_tx);
    in.spec.k_min = static_cast<std::uint32_t>(uni(1, 10));
    in.spec.p = ps[uni(0, 3)];
    in.spec.k_low = static_cast<std::uint32_t>(uni(0, static_cast<int>(in.spec.k_min)));
    return in;
}

/// Lexicographic (M, k) optimum by enumerating every (T, R) pair.
struct Optimum
{
    std::size_t m = 0;
    std::uint64_t k = 0;
};

inline std::optional<Optimum> exhaustive_optimum(const store::CountTensor &c, const store::CountTensor &c_eq,
                                                 const subset::SubsetSpec &spec)
{
    const int nt = c.n_tx(), nr = c.n_rx();
    const auto days = spec.resolved_days(c.n_days());
    std::uint64_t u = 1;
    for (int d : days)
        for (int t = 0; t < nt; ++t)
            for (int r = 0; r < nr; ++r)
                u = std::max<std::uint64_t>(u, std::max(c.at(d, t, r), c_eq.at(d, t, r)));
    const double needed = spec.p * spec.n_tx_required;
    std::optional<Optimum> best;
    for (unsigned tm = 0; tm < (1u << nt); ++tm)
    {
        if (std::popcount(tm) != spec.n_tx_required)
            continue;
        for (unsigned rm = 0; rm < (1u << nr); ++rm)
        {
            bool ok = true;
            std::uint64_t k = u;
            for (int r = 0; r < nr && ok; ++r)
            {
                if (!(rm >> r & 1u))
                    continue;
                for (int d : days)
                {
                    int n = 0, n_eq = 0;
                    for (int t = 0; t < nt; ++t)
                        if (tm >> t & 1u)
                        {
                            n += c.at(d, t, r) >= spec.k_min;
                            n_eq += c_eq.at(d, t, r) >= spec.k_min;
                            k = std::min<std::uint64_t>(k, std::min(c.at(d, t, r), c_eq.at(d, t, r)));
                        }
                    // Integer counts: compare against the smallest integer >= p*N.
                    const double need = std::ceil(needed - 1e-9);
                    if (n < need || n_eq < need)
                        ok = false;
                }
            }
            if (!ok || k < spec.k_low)
                continue;
            const std::size_t m = static_cast<std::size_t>(std::popcount(rm));
            if (!best || m > best->m || (m == best->m && k > best->k))
                best = Optimum{m, k};
        }
    }
    return best;
}

/// Reference models whose LP text is kept under tests/data.
struct GoldenModel
{
    std::string file;
    store::CountTensor c, c_eq;
    subset::SubsetSpec spec;
};

inline std::vector<GoldenModel> golden_models()
{
    auto fill = [](store::StoreDims dims, std::vector<std::uint32_t> v) {
        store::CountTensor c(dims);
        std::size_t i = 0;
        for (int d = 0; d < dims.n_days; ++d)
            for (int t = 0; t < dims.n_tx; ++t)
                for (int r = 0; r < dims.n_rx; ++r)
                    c.at(d, t, r) = v.at(i++);
        return c;
    };
    std::vector<GoldenModel> out;
    {
        GoldenModel g{"model_1x1x1.lp", fill({1, 1, 1}, {7}), fill({1, 1, 1}, {6}), {}};
        g.spec.n_tx_required = 1;
        g.spec.k_min = 5;
        out.push_back(std::move(g));
    }
    {
        GoldenModel g{"model_1x2x2.lp", fill({1, 2, 2}, {10, 3, 8, 12}), fill({1, 2, 2}, {9, 3, 8, 11}), {}};
        g.spec.n_tx_required = 1;
        g.spec.k_min = 5;
        out.push_back(std::move(g));
    }
    {
        GoldenModel g{"model_2x3x2.lp", fill({2, 3, 2}, {6, 4, 9, 0, 5, 7, 8, 2, 6, 6, 4, 9}),
                      fill({2, 3, 2}, {5, 4, 9, 0, 5, 6, 8, 1, 6, 5, 4, 9}), {}};
        g.spec.n_tx_required = 2;
        g.spec.k_min = 4;
        g.spec.p = 0.9;
        g.spec.k_low = 2;
        out.push_back(std::move(g));
    }
    return out;
}

/// Runs generate -> detect -> equalize in memory.
inline store::SignalStore synthetic_store(const wavegen::ScenarioConfig &cfg)
{
    const auto sc = wavegen::make_scenario(cfg);
    auto det = pipeline::detect_captures(sc.captures, store::StoreDims{cfg.n_days, cfg.n_tx, cfg.n_rx});
    pipeline::equalize_store(det.store, det.bursts,
                             [&](int d, int t, int r) { return sc.captures[sc.capture_index(d, t, r)]; });
    return det.store;
}

inline wavegen::ScenarioConfig protocol_config(std::uint64_t seed = 3)
{
    wavegen::ScenarioConfig cfg;
    cfg.n_days = 3;
    cfg.n_tx = 10;
    cfg.n_rx = 8;
    cfg.packets_per_capture = 40;
    cfg.seed = seed;
    return cfg;
}

/// Same-Rx accuracy at least diff-Rx accuracy at every sweep point.
inline bool same_rx_dominates(const eval::ResultTable &t)
{
    for (const auto &row : t.mean)
        if (row[0] < row[1])
            return false;
    return !t.mean.empty();
}

/// Equalized diff-day accuracy at least the raw one at every sweep point.
inline bool equalized_days_dominate(const eval::ResultTable &t)
{
    for (const auto &row : t.mean)
        if (row[3] < row[1])
            return false;
    return !t.mean.empty();
}

/// Each point's upper std band reaches the previous point's mean.
inline bool nondecreasing_within_std(const eval::ResultTable &t)
{
    for (std::size_t i = 1; i < t.mean.size(); ++i)
        if (t.mean[i][0] + t.std[i][0] < t.mean[i - 1][0])
            return false;
    return t.mean.size() >= 2;
}

/// Scratch directory removed on destruction.
struct TempDir
{
    std::filesystem::path path;

    explicit TempDir(const std::string &tag)
    {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("rfcurate_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
};

} // namespace testutil

#endif
