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
using namespace rfcurate::eval;
using Catch::Approx;

namespace
{

/// Raw 25 Msps Id signal of one packet with the given CFO at 20 dB SNR.
store::IdSignal cfo_signal(int tx, double cfo_hz, std::uint64_t seed)
{
    wavegen::TxProfile p;
    p.cfo_hz = cfo_hz;
    wavegen::RxProfile rx;
    rx.noise_power = 0.01;
    const std::vector<wavegen::ChannelTap> taps = {{0, cf64(1.0, 0.0)}};
    const Samples y = wavegen::apply_tx_channel_rx(wavegen::synth_packet(2, seed), p, taps, rx, seed + 1);
    return store::IdSignal::from_samples(dsp::resample(y, 20e6, 25e6), tx, 0, 0, false);
}

std::vector<store::IdSignal> two_class_set(std::uint64_t seed, std::size_t per_class)
{
    std::vector<store::IdSignal> v;
    for (std::size_t i = 0; i < per_class; ++i)
    {
        v.push_back(cfo_signal(0, 20e3, seed + 2 * i));
        v.push_back(cfo_signal(1, -20e3, seed + 2 * i + 1));
    }
    return v;
}

const store::SignalStore &pinned_store()
{
    static const store::SignalStore st = testutil::synthetic_store(testutil::protocol_config(3));
    return st;
}

} // namespace

TEST_CASE("normalize - unit average power")
{
    const Samples x = testutil::random_samples(256, 1, 3.0);
    const Samples y = normalize_power(x);
    CHECK(mean_power(y) == Approx(1.0).epsilon(1e-12));
    Samples z = x;
    for (auto &v : z)
        v *= cf64(0.0, 7.0);
    const Samples yz = normalize_power(z);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(yz[i] - y[i] * cf64(0.0, 1.0)) < 1e-12);
    CHECK_THROWS_AS(normalize_power(Samples(16)), InvalidArgument);
}

TEST_CASE("split - per-class 80/10/10, disjoint and deterministic")
{
    std::mt19937_64 rng(1);
    std::vector<store::IdSignal> data;
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 50 + 10 * t; ++i)
            data.push_back(testutil::random_signal(rng, t, 0, 0, false));
    const Split a = split(data, {0.8, 0.1, 0.1, 5});
    const Split b = split(data, {0.8, 0.1, 0.1, 5});
    const Split c = split(data, {0.8, 0.1, 0.1, 6});
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.train != c.train);
    std::vector<std::size_t> all = a.train;
    all.insert(all.end(), a.validation.begin(), a.validation.end());
    all.insert(all.end(), a.test.begin(), a.test.end());
    std::sort(all.begin(), all.end());
    CHECK(all.size() == data.size());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    for (int t = 0; t < 3; ++t)
    {
        const auto n = static_cast<double>(50 + 10 * t);
        auto count = [&](const std::vector<std::size_t> &v) {
            return std::count_if(v.begin(), v.end(), [&](std::size_t i) { return data[i].tx == t; });
        };
        CHECK(count(a.train) == std::lround(0.8 * n));
        CHECK(count(a.validation) == std::lround(0.1 * n));
        CHECK(count(a.test) == static_cast<long>(n) - std::lround(0.8 * n) - std::lround(0.1 * n));
    }
    CHECK_THROWS_AS(split(data, {0.8, 0.3, 0.1, 0}), InvalidArgument);
    CHECK_THROWS_AS(split({}, {}), InvalidArgument);
}

TEST_CASE("features - CFO feature reads the injected offset")
{
    for (double f : {-60e3, -5e3, 0.0, 12e3, 80e3})
    {
        const auto s = cfo_signal(0, f, 3);
        CHECK(features(s)[0] == Approx(f).margin(2e3));
    }
}

TEST_CASE("features - invariant to signal scale")
{
    const auto s = cfo_signal(0, 10e3, 4);
    store::IdSignal t = s;
    for (auto &v : t.samples)
        v *= 5.0f;
    const auto a = features(s), b = features(t);
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        CHECK(a[i] == Approx(b[i]).margin(1e-4));
}

TEST_CASE("classifier - separates two CFO classes")
{
    const auto train = two_class_set(100, 30);
    const auto test = two_class_set(5000, 50);
    const auto model = fit_baseline(train);
    CHECK(model.labels() == std::vector<int>{0, 1});
    const Predictor pred = [&](const store::IdSignal &s) { return classify(model, s); };
    CHECK(accuracy(pred, test) >= 0.95);
    CHECK(accuracy(baseline_trainer()(train), test) == accuracy(pred, test));
}

TEST_CASE("classifier - relabelling the classes relabels the predictions")
{
    auto train = two_class_set(100, 20);
    for (std::size_t i = 0; i < train.size(); i += 3)
        train[i].tx = 2; // a third, mixed class
    const auto test = two_class_set(9000, 20);
    const auto model = fit_baseline(train);
    const std::map<int, int> perm = {{0, 7}, {1, 3}, {2, 0}};
    auto relabelled = train;
    for (auto &s : relabelled)
        s.tx = perm.at(s.tx);
    const auto model2 = fit_baseline(relabelled);
    for (const auto &s : test)
        CHECK(model2.classify(s) == perm.at(model.classify(s)));
}

TEST_CASE("classifier - input errors")
{
    auto one = two_class_set(1, 5);
    for (auto &s : one)
        s.tx = 0;
    CHECK_THROWS_AS(fit_baseline(one), InvalidArgument);
    auto sparse = two_class_set(1, 5);
    sparse.pop_back();
    sparse.erase(std::remove_if(sparse.begin(), sparse.end(), [](const auto &s) { return s.tx == 1; }),
                 sparse.end());
    sparse.push_back(cfo_signal(1, -20e3, 1));
    CHECK_THROWS_AS(fit_baseline(sparse), InvalidArgument);
    CHECK_THROWS_AS(accuracy([](const store::IdSignal &) { return 0; }, {}), InvalidArgument);
}

TEST_CASE("protocols - names and table text")
{
    CHECK(parse_protocol("rx_gen") == Protocol::RxGen);
    CHECK(parse_protocol("rx") == Protocol::RxGen);
    CHECK(parse_protocol("day") == Protocol::DayGen);
    CHECK(parse_protocol("nsig") == Protocol::NSig);
    CHECK(parse_protocol("ntx") == Protocol::NTx);
    CHECK_FALSE(parse_protocol("bogus"));
    CHECK(std::string(to_string(Protocol::DayGen)) == "day_gen");
    ResultTable t;
    t.protocol = "nsig";
    t.sweep_name = "signals_per_cell";
    t.metrics = {"accuracy"};
    t.sweep = {1, 2};
    t.mean = {{0.5}, {0.75}};
    t.std = {{0.0}, {0.125}};
    CHECK(t.to_text() == "# protocol=nsig\nsignals_per_cell,accuracy_mean,accuracy_std\n1,0.5000,0.0000\n"
                         "2,0.7500,0.1250\n");
}

TEST_CASE("protocols - argument checks")
{
    const auto c = [] {
        store::CountTensor t({1, 2, 3});
        for (int x = 0; x < 2; ++x)
            for (int r = 0; r < 3; ++r)
                t.at(0, x, r) = 6;
        return t;
    }();
    const auto st = testutil::store_from_counts(c, c, 1);
    ProtocolParams p;
    p.realizations = 1;
    CHECK_THROWS_AS(run_protocol(st, Protocol::RxGen, p, 1), InvalidArgument); // 3 rx, 5 held out
    CHECK_THROWS_AS(run_protocol(st, Protocol::DayGen, p, 1), InvalidArgument); // one day
    p.sweep = {100};
    CHECK_THROWS_AS(run_protocol(st, Protocol::NSig, p, 1), InvalidArgument);
    p.sweep = {3};
    CHECK_THROWS_AS(run_protocol(st, Protocol::NTx, p, 1), InvalidArgument);
    p.sweep = {};
    p.realizations = 0;
    CHECK_THROWS_AS(run_protocol(st, Protocol::NTx, p, 1), InvalidArgument);
}

TEST_CASE("protocols - custom trainer is used")
{
    const auto &st = pinned_store();
    ProtocolParams p;
    p.realizations = 2;
    p.trainer = [](std::span<const store::IdSignal>) -> Predictor {
        return [](const store::IdSignal &) { return 0; };
    };
    const auto t = run_protocol(st, Protocol::NTx, p, 1);
    for (const auto &row : t.mean)
        CHECK(row[0] < 0.6);
}

TEST_CASE("protocols - trends on the pinned synthetic store")
{
    const auto &st = pinned_store();
    ProtocolParams p;
    const auto rx = run_protocol(st, Protocol::RxGen, p, 1);
    CHECK(rx.sweep == std::vector<int>{1, 2, 3});
    CHECK(testutil::same_rx_dominates(rx));
    const auto day = run_protocol(st, Protocol::DayGen, p, 1);
    CHECK(day.sweep == std::vector<int>{1, 2});
    CHECK(testutil::equalized_days_dominate(day));
    const auto ns = run_protocol(st, Protocol::NSig, p, 1);
    CHECK(ns.sweep.front() == 1);
    CHECK(testutil::nondecreasing_within_std(ns));
    const auto nt = run_protocol(st, Protocol::NTx, p, 1);
    CHECK(nt.sweep == std::vector<int>{2, 5, 10});
    // Same seed, same table.
    CHECK(run_protocol(st, Protocol::RxGen, p, 1).to_text() == rx.to_text());
}

TEST_CASE("fingerprints - ordering, fill rule and nearest receiver")
{
    PathlossStoreConfig cfg;
    cfg.grid_cols = 5;
    cfg.grid_rows = 4;
    cfg.n_rx = 6;
    cfg.shadowing_db = 0.0;
    cfg.sensitivity_db = 12.0;
    cfg.seed = 2;
    const auto st = make_pathloss_store(cfg);
    const auto fps = power_fingerprints(st, 0, 9);
    REQUIRE(fps.size() == 20);
    int filled = 0;
    for (std::size_t t = 0; t < fps.size(); ++t)
    {
        CHECK(fps[t].tx == static_cast<int>(t));
        REQUIRE(fps[t].powers.size() == 6);
        double lo = 1e300, hi = -1e300;
        for (int r = 0; r < 6; ++r)
        {
            CHECK(fps[t].fill_mask[static_cast<std::size_t>(r)] == (st.counts().at(0, static_cast<int>(t), r) == 0));
            if (!fps[t].fill_mask[static_cast<std::size_t>(r)])
            {
                lo = std::min(lo, fps[t].powers[static_cast<std::size_t>(r)]);
                hi = std::max(hi, fps[t].powers[static_cast<std::size_t>(r)]);
            }
        }
        for (int r = 0; r < 6; ++r)
            if (fps[t].fill_mask[static_cast<std::size_t>(r)])
            {
                ++filled;
                CHECK(fps[t].powers[static_cast<std::size_t>(r)] >= lo);
                CHECK(fps[t].powers[static_cast<std::size_t>(r)] <= hi);
            }
    }
    CHECK(filled > 0);
    // Same seed, same fill.
    CHECK(power_fingerprints(st, 0, 9)[3].powers == fps[3].powers);

    // Without shadowing the strongest observed entry belongs to the closest observing receiver.
    const auto rx_pos = [&] {
        std::mt19937_64 rng(derive_seed(cfg.seed, 0x706c));
        std::uniform_real_distribution<double> ux(-0.5, cfg.grid_cols - 0.5), uy(-0.5, cfg.grid_rows - 0.5);
        std::vector<Position> v;
        for (int r = 0; r < cfg.n_rx; ++r)
        {
            const double x = ux(rng);
            v.push_back({x, uy(rng)});
        }
        return v;
    }();
    for (std::size_t t = 0; t < fps.size(); ++t)
    {
        const auto &p = st.tx_positions[t];
        std::size_t near = 6, strong = 6;
        for (std::size_t r = 0; r < 6; ++r)
        {
            if (fps[t].fill_mask[r])
                continue;
            if (near == 6 || std::hypot(rx_pos[r].first - p.first, rx_pos[r].second - p.second) <
                                 std::hypot(rx_pos[near].first - p.first, rx_pos[near].second - p.second))
                near = r;
            if (strong == 6 || fps[t].powers[r] > fps[t].powers[strong])
                strong = r;
        }
        CHECK(strong == near);
    }
}

TEST_CASE("fingerprints - power in dBm and error cases")
{
    store::SignalStore st(store::StoreDims{1, 2, 2});
    store::IdSignal s;
    s.samples.fill(cf32(0.01f, 0.0f)); // 1e-4 W -> -10 dBm
    st.append(s);
    s.rx = 1;
    st.append(s);
    const auto c = [&] {
        try
        {
            (void)power_fingerprints(st, 0, 1);
        }
        catch (const InvalidArgument &)
        {
            return true;
        }
        return false;
    }();
    CHECK(c); // tx 1 has no receiver
    s.tx = 1;
    st.append(s);
    const auto fps = power_fingerprints(st, 0, 1);
    CHECK(fps[0].powers[0] == Approx(-10.0).margin(1e-4));
    CHECK(fps[1].fill_mask[0]);
    CHECK(fps[1].powers[0] == Approx(-10.0).margin(1e-4)); // lo == hi
    CHECK_THROWS_AS(power_fingerprints(st, 1, 1), InvalidArgument);
}

TEST_CASE("knn - prediction is a convex combination of the neighbours")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 5.0);
    std::vector<PowerFingerprint> train(12);
    std::vector<Position> pos(12);
    for (std::size_t i = 0; i < train.size(); ++i)
    {
        train[i].tx = static_cast<int>(i);
        for (int r = 0; r < 4; ++r)
            train[i].powers.push_back(g(rng));
        train[i].fill_mask.assign(4, false);
        pos[i] = {g(rng), g(rng)};
    }
    for (int it = 0; it < 20; ++it)
    {
        PowerFingerprint q;
        for (int r = 0; r < 4; ++r)
            q.powers.push_back(g(rng));
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t i = 0; i < train.size(); ++i)
        {
            double s = 0.0;
            for (int r = 0; r < 4; ++r)
                s += std::pow(train[i].powers[static_cast<std::size_t>(r)] - q.powers[static_cast<std::size_t>(r)], 2);
            d.push_back({s, i});
        }
        std::sort(d.begin(), d.end());
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (int k = 0; k < 3; ++k)
        {
            const auto &p = pos[d[static_cast<std::size_t>(k)].second];
            x0 = std::min(x0, p.first);
            x1 = std::max(x1, p.first);
            y0 = std::min(y0, p.second);
            y1 = std::max(y1, p.second);
        }
        const Position e = knn_locate(train, pos, q, 3);
        CHECK(e.first >= x0 - 1e-12);
        CHECK(e.first <= x1 + 1e-12);
        CHECK(e.second >= y0 - 1e-12);
        CHECK(e.second <= y1 + 1e-12);
    }
    // An exact match returns that position.
    const Position e = knn_locate(train, pos, train[5], 3);
    CHECK(e.first == pos[5].first);
    CHECK(e.second == pos[5].second);
    CHECK_THROWS_AS(knn_locate(train, pos, train[5], 13), InvalidArgument);
}

TEST_CASE("localization - path-loss grid within 2 m mean L1")
{
    PathlossStoreConfig cfg;
    cfg.seed = 1;
    const auto st = make_pathloss_store(cfg);
    const auto fps = power_fingerprints(st, 0, 1);
    const auto rep = localize(fps, st.tx_positions, {3, 0.2, 1});
    CHECK(rep.test_tx.size() == 20);
    CHECK(rep.mean_l1 <= 2.0);
    CHECK(rep.to_text().find("# mean_l1_m=") != std::string::npos);
    // Same seed, same report.
    CHECK(localize(fps, st.tx_positions, {3, 0.2, 1}).to_text() == rep.to_text());
}
