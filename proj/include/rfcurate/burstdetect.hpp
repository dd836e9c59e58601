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

#ifndef RFCURATE_BURSTDETECT_HPP
#define RFCURATE_BURSTDETECT_HPP

// Protocol-agnostic energy detection and packet/ACK screening. Nothing here
// looks at the WiFi preambles.

#include "common.hpp"
#include "sigstore.hpp"
#include "wavegen.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>

namespace rfcurate::burst
{

struct DetectionParams
{
    std::size_t n_w = 100;        // window length, samples
    double l_w = 0.005;           // mean |sample| threshold (full scale = 1)
    std::size_t n_pkt = 1000;     // a packet is strictly longer than this
    std::size_t n_ack = 2000;     // an ACK is strictly shorter than this
    std::size_t min_packets = 10; // per-transmitter retention threshold

    void validate() const
    {
        if (n_w == 0 || !(l_w > 0.0) || n_pkt == 0 || n_ack == 0 || min_packets == 0)
            throw InvalidArgument("DetectionParams: all parameters must be positive");
    }
};

struct Burst
{
    std::size_t start_index = 0;
    std::size_t length = 0;

    std::size_t end() const { return start_index + length; }
    bool operator==(const Burst &) const = default;
};

/// Fixed, non-overlapping windows from index 0. A window is active when its
/// mean magnitude is >= l_w; maximal active runs become bursts. The trailing
/// partial window is judged on its actual length, so bursts never extend
/// past the end of the capture.
template <class T>
std::vector<Burst> detect_bursts(std::span<const std::complex<T>> x, const DetectionParams &p)
{
    p.validate();
    std::vector<Burst> out;
    std::optional<std::size_t> run_start;
    for (std::size_t w = 0; w < x.size(); w += p.n_w)
    {
        const std::size_t end = std::min(x.size(), w + p.n_w);
        double acc = 0.0;
        for (std::size_t i = w; i < end; ++i)
            acc += std::abs(std::complex<double>(x[i].real(), x[i].imag()));
        const bool active = acc / static_cast<double>(end - w) >= p.l_w;
        if (active && !run_start)
            run_start = w;
        if (!active && run_start)
        {
            out.push_back({*run_start, w - *run_start});
            run_start.reset();
        }
    }
    if (run_start)
        out.push_back({*run_start, x.size() - *run_start});
    return out;
}

inline std::vector<Burst> detect_bursts(const wavegen::IqCapture &cap, const DetectionParams &p)
{
    return detect_bursts(std::span<const cf32>(cap.samples), p);
}

/// Keeps bursts longer than n_pkt whose next burst is shorter than n_ack.
/// The confirming short burst is consumed and cannot itself be a packet.
inline std::vector<Burst> screen_packets(std::span<const Burst> bursts, const DetectionParams &p)
{
    p.validate();
    std::vector<Burst> out;
    std::size_t i = 0;
    while (i + 1 < bursts.size())
    {
        if (bursts[i].length > p.n_pkt && bursts[i + 1].length < p.n_ack)
        {
            out.push_back(bursts[i]);
            i += 2;
        }
        else
        {
            ++i;
        }
    }
    return out;
}

/// Transmitters with at least min_packets packets.
inline std::set<int> drop_sparse_tx(const std::map<int, std::size_t> &counts_per_tx, const DetectionParams &p)
{
    std::set<int> keep;
    for (const auto &[tx, n] : counts_per_tx)
        if (n >= p.min_packets)
            keep.insert(tx);
    return keep;
}

/// The first 256 samples of the burst, unprocessed. Returns nullopt when the
/// burst is too short (or runs off the capture).
inline std::optional<store::IdSignal> extract_nonequalized(const wavegen::IqCapture &cap, const Burst &b)
{
    if (b.length < kIdSignalLength || b.start_index + kIdSignalLength > cap.samples.size())
        return std::nullopt;
    store::IdSignal s;
    s.tx = cap.tx_id;
    s.rx = cap.rx_id;
    s.day = cap.day;
    s.equalized = false;
    std::copy_n(cap.samples.begin() + static_cast<std::ptrdiff_t>(b.start_index), kIdSignalLength, s.samples.begin());
    return s;
}

} // namespace rfcurate::burst

#endif
