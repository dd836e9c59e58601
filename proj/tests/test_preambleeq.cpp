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


#include <catch_amalgamated.hpp>
#include "helpers.hpp"

using namespace rfcurate;
using namespace rfcurate::eq;
using Catch::Approx;

namespace
{

wavegen::RxProfile rx_with_snr(double snr_db)
{
    wavegen::RxProfile rx;
    rx.noise_power = snr_db >= 300.0 ? 0.0 : std::pow(10.0, -snr_db / 10.0);
    return rx;
}

std::vector<wavegen::ChannelTap> flat() { return {{0, cf64(1.0, 0.0)}}; }

std::vector<wavegen::ChannelTap> two_tap() { return {{0, cf64(0.9, 0.0)}, {3, cf64(0.3, -0.25)}}; }

} // namespace

TEST_CASE("sync - start and CFO on a clean 20 Msps packet")
{
    const Samples pkt = wavegen::synth_packet(4, 1);
    for (std::size_t lead : {0u, 37u, 200u})
    {
        Samples x(lead, cf64(0.0, 0.0));
        x.insert(x.end(), pkt.begin(), pkt.end());
        wavegen::rotate_inplace(x, 55e3, kWifiRateHz);
        const SyncResult r = detect_lstf(x);
        REQUIRE(r.detected);
        CHECK(r.peak_metric > 0.99);
        CHECK(std::abs(static_cast<double>(r.refined_start) - static_cast<double>(lead)) <= 2.0);
        CHECK(r.cfo_hz == Approx(55e3).margin(50.0));
        CHECK(r.coarse_cfo_hz == Approx(55e3).margin(500.0));
    }
}

TEST_CASE("sync - noise only is not detected")
{
    const Samples x = testutil::random_samples(2000, 3, 0.1);
    CHECK_FALSE(detect_lstf(x).detected);
}

TEST_CASE("sync - CFO accuracy at 20 dB")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-100e3, 100e3);
    int good = 0;
    for (int i = 0; i < 100; ++i)
    {
        const double f = u(rng);
        wavegen::TxProfile tx;
        tx.cfo_hz = f;
        const auto cap = testutil::packet_capture(wavegen::synth_packet(8, 100 + static_cast<std::uint64_t>(i)), tx,
                                                  flat(), rx_with_snr(20.0), 500 + static_cast<std::uint64_t>(i));
        const auto out = equalize_packet(cap, testutil::packet_burst(cap));
        REQUIRE(out.sync.detected);
        good += std::abs(out.sync.cfo_hz - f) <= 500.0;
    }
    CHECK(good >= 99);
}

TEST_CASE("channel estimate - recovers a known two-tap response")
{
    const Samples pkt = wavegen::synth_packet(2, 5);
    const auto taps = two_tap();
    const Samples y = wavegen::convolve(pkt, taps);
    const ChannelEstimate h = estimate_channel(y);
    for (int s : ofdm::occupied_subcarriers())
    {
        cf64 ref{};
        for (const auto &t : taps)
            ref += t.gain * std::polar(1.0, -2.0 * kPi * s * static_cast<double>(t.delay_samples) / 64.0);
        CHECK(std::abs(h.at_subcarrier(s) - ref) < 1e-9);
    }
    CHECK_THROWS_AS(h.at_subcarrier(0), InvalidArgument);
    CHECK_THROWS_AS(estimate_channel(Samples(100)), InvalidArgument);
}

TEST_CASE("channel estimate - smoothing keeps a short channel unchanged")
{
    const Samples y = wavegen::convolve(wavegen::synth_packet(2, 5), two_tap());
    const ChannelEstimate h = estimate_channel(y);
    const ChannelEstimate s = smooth_channel(h);
    for (std::size_t i = 0; i < h.gains.size(); ++i)
        CHECK(std::abs(s.gains[i] - h.gains[i]) < 1e-9);
}

TEST_CASE("noise variance - zero on a clean packet, tracks added noise")
{
    const Samples pkt = wavegen::synth_packet(2, 5);
    CHECK(estimate_noise_var(pkt) < 1e-20);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 40; ++s)
    {
        Samples y = pkt;
        wavegen::add_awgn(y, 0.01, s);
        acc += estimate_noise_var(y);
    }
    // Per-bin variance: the demodulator scales time-domain noise by 52/64.
    CHECK(acc / 40.0 == Approx(0.01 * 52.0 / 64.0).epsilon(0.1));
}

TEST_CASE("mmse - weights follow conj(H)/(|H|^2 + s2)")
{
    ChannelEstimate h;
    for (std::size_t i = 0; i < h.gains.size(); ++i)
        h.gains[i] = cf64(0.5 + 0.01 * static_cast<double>(i), -0.2);
    // A single tone through the equalizer is scaled by the bin weight.
    const int sc = 7;
    ofdm::FreqSymbol f{};
    f[ofdm::bin_of(sc)] = cf64(1.0, 0.0);
    const Samples sym = ofdm::ofdm_modulate(f);
    Samples x(ofdm::kPreambleLength + 80, cf64(0.0, 0.0));
    std::copy(sym.begin(), sym.end(), x.begin() + ofdm::kLtfFirst);
    const double s2 = 0.05;
    const Samples y = mmse_equalize(x, h, s2);
    const auto g = ofdm::ofdm_demodulate(std::span<const cf64>(y.data() + ofdm::kLtfFirst, 64));
    const cf64 H = h.at_subcarrier(sc);
    CHECK(std::abs(g[ofdm::bin_of(sc)] - std::conj(H) / (std::norm(H) + s2)) < 1e-12);
    for (std::size_t k = 0; k < 64; ++k)
        if (k != ofdm::bin_of(sc))
            CHECK(std::abs(g[k]) < 1e-12);
    // Zero-forcing limit.
    const Samples z = mmse_equalize(x, h, 0.0);
    const auto gz = ofdm::ofdm_demodulate(std::span<const cf64>(z.data() + ofdm::kLtfFirst, 64));
    CHECK(std::abs(gz[ofdm::bin_of(sc)] - 1.0 / H) < 1e-12);
    CHECK_THROWS_AS(mmse_equalize(x, h, -1.0), InvalidArgument);
    ChannelEstimate zero;
    CHECK_THROWS_AS(mmse_equalize(x, zero, 0.0), InvalidArgument);
}

TEST_CASE("mmse - rebuilt cyclic prefixes")
{
    const Samples y0 = wavegen::convolve(wavegen::synth_packet(3, 2), two_tap());
    const Samples y = mmse_equalize(y0, estimate_channel(y0), 0.0);
    for (std::size_t s = 0; s < 3; ++s)
    {
        const std::size_t off = ofdm::kPreambleLength + 80 * s;
        for (std::size_t i = 0; i < 16; ++i)
            CHECK(std::abs(y[off + i] - y[off + 64 + i]) < 1e-12);
    }
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(std::abs(y[160 + i] - y[160 + 64 + i]) < 1e-12);
}

TEST_CASE("equalize - noiseless loopback EVM")
{
    const wavegen::Packet pkt = wavegen::synth_packet_detailed(10, 4);
    wavegen::TxProfile tx;
    const auto cap = testutil::packet_capture(pkt.samples, tx, flat(), rx_with_snr(400.0), 1);
    const auto out = equalize_packet(cap, testutil::packet_burst(cap));
    REQUIRE(out.signal.has_value());
    CHECK(testutil::payload_evm_db(out.equalized_20, 0, pkt) < -40.0);
}

TEST_CASE("equalize - two-tap channel comes out flat")
{
    const wavegen::Packet pkt = wavegen::synth_packet_detailed(10, 6);
    wavegen::TxProfile tx;
    tx.cfo_hz = -23e3;
    const auto cap = testutil::packet_capture(pkt.samples, tx, two_tap(), rx_with_snr(30.0), 2);
    const auto out = equalize_packet(cap, testutil::packet_burst(cap));
    REQUIRE(out.signal.has_value());
    CHECK(testutil::magnitude_spread(out.channel) > 0.2);
    CHECK(testutil::magnitude_spread(estimate_channel(out.equalized_20)) < 0.05);
    CHECK(testutil::payload_evm_db(out.equalized_20, 0, pkt) < -20.0);
}

TEST_CASE("equalize - output keeps labels and the CFO")
{
    const wavegen::Packet pkt = wavegen::synth_packet_detailed(10, 6);
    wavegen::TxProfile tx;
    tx.cfo_hz = 31e3;
    auto cap = testutil::packet_capture(pkt.samples, tx, two_tap(), rx_with_snr(40.0), 3);
    cap.tx_id = 2;
    cap.rx_id = 5;
    cap.day = 1;
    const auto out = equalize_packet(cap, testutil::packet_burst(cap));
    REQUIRE(out.signal.has_value());
    CHECK(out.signal->equalized);
    CHECK(out.signal->tx == 2);
    CHECK(out.signal->rx == 5);
    CHECK(out.signal->day == 1);
    // The L-STF period rotation of the stored signal reflects the CFO.
    const Samples s = out.signal->as_samples();
    cf64 acc{};
    for (std::size_t n = 40; n < 160; ++n)
        acc += s[n + 20] * std::conj(s[n]);
    CHECK(std::arg(acc) * 25e6 / (2.0 * kPi * 20.0) == Approx(31e3).margin(1e3));
}

TEST_CASE("equalize - too short or empty bursts give no signal")
{
    const auto cap = testutil::packet_capture(wavegen::synth_packet(10, 1), wavegen::TxProfile{}, flat(),
                                              rx_with_snr(30.0), 1);
    CHECK_FALSE(equalize_packet(cap, burst::Burst{400, 200}).signal.has_value());
    wavegen::IqCapture silent;
    silent.samples.assign(3000, cf32(0.0f, 0.0f));
    CHECK_FALSE(equalize_packet(silent, burst::Burst{100, 2000}).signal.has_value());
}
