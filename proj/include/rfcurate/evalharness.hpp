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

#ifndef RFCURATE_EVALHARNESS_HPP
#define RFCURATE_EVALHARNESS_HPP

// Preprocessing, a nearest-centroid baseline classifier, the generalization
// protocols (receivers, days, signal count, transmitter count) and received
// power localization.

#include "common.hpp"
#include "fft.hpp"
#include "sigstore.hpp"

#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

namespace rfcurate::eval
{

// ---------------------------------------------------------------------------
// Preprocessing

inline Samples normalize_power(const Samples &x)
{
    const double p = mean_power(x);
    if (!(p > 0.0))
        throw InvalidArgument("normalize_power: all-zero signal");
    const double g = 1.0 / std::sqrt(p);
    Samples y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = x[i] * g;
    return y;
}

struct SplitSpec
{
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (train < 0 || validation < 0 || test < 0 || std::abs(train + validation + test - 1.0) > 1e-9)
            throw InvalidArgument("SplitSpec: fractions must be non-negative and sum to 1");
    }
};

/// Indices into the dataset.
struct Split
{
    std::vector<std::size_t> train, validation, test;
};

/// Per-class seeded shuffle, then 80/10/10 within each class (rounded, test
/// takes the remainder). Classes are the tx labels.
inline Split split(std::span<const store::IdSignal> data, const SplitSpec &spec)
{
    spec.validate();
    if (data.empty())
        throw InvalidArgument("split: empty dataset");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < data.size(); ++i)
        by_class[data[i].tx].push_back(i);
    Split out;
    for (auto &[label, idx] : by_class)
    {
        std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(label)));
        std::shuffle(idx.begin(), idx.end(), rng);
        const double n = static_cast<double>(idx.size());
        const auto n_train = static_cast<std::size_t>(std::round(spec.train * n));
        const auto n_val = std::min(idx.size() - n_train, static_cast<std::size_t>(std::round(spec.validation * n)));
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.validation.insert(out.validation.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                              idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Baseline classifier

inline constexpr std::size_t kCfoLag = 20;          // L-STF period at 25 Msps
inline constexpr std::size_t kCfoSpan = 180;        // STF samples usable at that lag
inline constexpr std::size_t kProfileBins = 64;
inline constexpr std::size_t kFeatureCount = 1 + kProfileBins + 2;

struct FeatureWeights
{
    double cfo = 6.0;
    double profile = 0.25; // per bin
    double iq = 1.0;
};

/// CFO from the lag-20 autocorrelation phase, magnitude profile of the
/// first 64 samples, and the second-order I/Q moment E[x^2].
inline std::array<double, kFeatureCount> features(const store::IdSignal &s)
{
    const Samples x = normalize_power(s.as_samples());
    std::array<double, kFeatureCount> f{};
    cf64 acc{};
    for (std::size_t n = 0; n < kCfoSpan; ++n)
        acc += x[n + kCfoLag] * std::conj(x[n]);
    f[0] = std::arg(acc) / (2.0 * kPi * static_cast<double>(kCfoLag)) * kCaptureRateHz;
    const Samples spec = dsp::fft(Samples(x.begin(), x.begin() + kProfileBins));
    for (std::size_t k = 0; k < kProfileBins; ++k)
        f[1 + k] = std::abs(spec[k]) / std::sqrt(static_cast<double>(kProfileBins));
    cf64 m2{};
    for (const auto &v : x)
        m2 += v * v;
    m2 /= static_cast<double>(x.size());
    f[1 + kProfileBins] = m2.real();
    f[2 + kProfileBins] = m2.imag();
    return f;
}

class NearestCentroid
{
  public:
    using Feature = std::array<double, kFeatureCount>;

    NearestCentroid() = default;
    NearestCentroid(std::vector<int> labels, std::vector<Feature> centroids, Feature mean, Feature scale)
        : labels_(std::move(labels)), centroids_(std::move(centroids)), mean_(mean), scale_(scale)
    {
    }

    Feature transform(const store::IdSignal &s) const
    {
        Feature f = features(s);
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            f[i] = (f[i] - mean_[i]) * scale_[i];
        return f;
    }

    int classify(const store::IdSignal &s) const
    {
        const Feature f = transform(s);
        double best = std::numeric_limits<double>::infinity();
        int label = labels_.front();
        for (std::size_t c = 0; c < centroids_.size(); ++c)
        {
            double d = 0.0;
            for (std::size_t i = 0; i < kFeatureCount; ++i)
                d += (f[i] - centroids_[c][i]) * (f[i] - centroids_[c][i]);
            if (d < best)
            {
                best = d;
                label = labels_[c];
            }
        }
        return label;
    }

    const std::vector<int> &labels() const { return labels_; }

  private:
    std::vector<int> labels_;
    std::vector<Feature> centroids_;
    Feature mean_{}, scale_{};
};

/// Z-scores features on the training set, weights the feature groups and
/// stores one centroid per tx label.
inline NearestCentroid fit_baseline(std::span<const store::IdSignal> train, const FeatureWeights &w = {})
{
    std::map<int, std::size_t> per_class;
    for (const auto &s : train)
        ++per_class[s.tx];
    if (per_class.size() < 2)
        throw InvalidArgument("fit_baseline: need at least 2 classes");
    for (const auto &[label, n] : per_class)
        if (n < 2)
            throw InvalidArgument("fit_baseline: class " + std::to_string(label) + " has fewer than 2 signals");

    using Feature = NearestCentroid::Feature;
    std::vector<Feature> raw;
    raw.reserve(train.size());
    for (const auto &s : train)
        raw.push_back(features(s));
    Feature mean{}, scale{};
    for (const auto &f : raw)
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            mean[i] += f[i];
    for (auto &m : mean)
        m /= static_cast<double>(raw.size());
    for (const auto &f : raw)
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            scale[i] += (f[i] - mean[i]) * (f[i] - mean[i]);
    for (std::size_t i = 0; i < kFeatureCount; ++i)
    {
        const double sd = std::sqrt(scale[i] / static_cast<double>(raw.size()));
        const double g = i == 0 ? w.cfo : i <= kProfileBins ? w.profile : w.iq;
        scale[i] = sd > 1e-12 ? g / sd : 0.0;
    }

    std::vector<int> labels;
    std::vector<Feature> centroids;
    std::map<int, std::size_t> slot;
    for (const auto &[label, n] : per_class)
    {
        slot[label] = labels.size();
        labels.push_back(label);
        centroids.push_back(Feature{});
    }
    for (std::size_t j = 0; j < train.size(); ++j)
    {
        auto &c = centroids[slot[train[j].tx]];
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            c[i] += (raw[j][i] - mean[i]) * scale[i];
    }
    for (std::size_t c = 0; c < labels.size(); ++c)
        for (auto &v : centroids[c])
            v /= static_cast<double>(per_class[labels[c]]);
    return NearestCentroid(std::move(labels), std::move(centroids), mean, scale);
}

inline int classify(const NearestCentroid &c, const store::IdSignal &s) { return c.classify(s); }

/// Any classifier can stand in for the baseline in the protocols.
using Predictor = std::function<int(const store::IdSignal &)>;
using Trainer = std::function<Predictor(std::span<const store::IdSignal>)>;

inline Trainer baseline_trainer(FeatureWeights w = {})
{
    return [w](std::span<const store::IdSignal> train) -> Predictor {
        auto model = std::make_shared<NearestCentroid>(fit_baseline(train, w));
        return [model](const store::IdSignal &s) { return model->classify(s); };
    };
}

inline double accuracy(const Predictor &p, std::span<const store::IdSignal> test)
{
    if (test.empty())
        throw InvalidArgument("accuracy: empty test set");
    std::size_t ok = 0;
    for (const auto &s : test)
        ok += p(s) == s.tx ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(test.size());
}

// ---------------------------------------------------------------------------
// Protocols

enum class Protocol
{
    RxGen,
    DayGen,
    NSig,
    NTx,
};

inline std::optional<Protocol> parse_protocol(const std::string &s)
{
    if (s == "rx" || s == "rx_gen")
        return Protocol::RxGen;
    if (s == "day" || s == "day_gen")
        return Protocol::DayGen;
    if (s == "nsig")
        return Protocol::NSig;
    if (s == "ntx")
        return Protocol::NTx;
    return std::nullopt;
}

inline const char *to_string(Protocol p)
{
    switch (p)
    {
    case Protocol::RxGen:
        return "rx_gen";
    case Protocol::DayGen:
        return "day_gen";
    case Protocol::NSig:
        return "nsig";
    case Protocol::NTx:
        return "ntx";
    }
    return "?";
}

struct ProtocolParams
{
    int realizations = 5;
    bool equalized = true; // rx_gen, nsig, ntx
    int day = 0;           // rx_gen, nsig, ntx
    int rx = 0;            // day_gen
    int held_out_rx = 5;   // rx_gen
    std::vector<int> sweep; // nsig / ntx sweep values; empty picks a default ladder
    Trainer trainer = baseline_trainer();
};

/// Column-oriented result table; each metric comes as a mean/std pair.
struct ResultTable
{
    std::string protocol;
    std::string sweep_name;
    std::vector<std::string> metrics;
    std::vector<int> sweep;
    std::vector<std::vector<double>> mean; // [point][metric]
    std::vector<std::vector<double>> std;

    std::string to_text() const
    {
        std::ostringstream os;
        os << "# protocol=" << protocol << "\n" << sweep_name;
        for (const auto &m : metrics)
            os << ',' << m << "_mean," << m << "_std";
        os << '\n' << std::fixed << std::setprecision(4);
        for (std::size_t i = 0; i < sweep.size(); ++i)
        {
            os << sweep[i];
            for (std::size_t j = 0; j < metrics.size(); ++j)
                os << ',' << mean[i][j] << ',' << std[i][j];
            os << '\n';
        }
        return os.str();
    }
};

namespace detail
{

using Signals = std::vector<store::IdSignal>;

inline Signals select(const store::SignalStore &s, const std::function<bool(const store::IdSignal &)> &keep)
{
    Signals out;
    for (const auto &sig : s.signals())
        if (keep(sig))
            out.push_back(sig);
    return out;
}

inline Signals gather(const Signals &src, const std::vector<std::size_t> &idx)
{
    Signals out;
    out.reserve(idx.size());
    for (auto i : idx)
        out.push_back(src[i]);
    return out;
}

inline std::pair<double, double> mean_std(const std::vector<double> &v)
{
    double m = 0.0;
    for (double x : v)
        m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return {m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
}

/// Runs fn(point, realization) -> metric vector for all jobs in parallel and
/// folds the realizations into mean/std per point.
inline void run_grid(ResultTable &t, int realizations,
                     const std::function<std::vector<double>(std::size_t, int)> &fn)
{
    const std::size_t n_points = t.sweep.size();
    std::vector<std::vector<double>> res(n_points * static_cast<std::size_t>(realizations));
    parallel_for(res.size(), [&](std::size_t j) {
        res[j] = fn(j / static_cast<std::size_t>(realizations), static_cast<int>(j % static_cast<std::size_t>(realizations)));
    });
    t.mean.assign(n_points, std::vector<double>(t.metrics.size()));
    t.std = t.mean;
    for (std::size_t p = 0; p < n_points; ++p)
        for (std::size_t m = 0; m < t.metrics.size(); ++m)
        {
            std::vector<double> v;
            for (int r = 0; r < realizations; ++r)
                v.push_back(res[p * static_cast<std::size_t>(realizations) + static_cast<std::size_t>(r)][m]);
            std::tie(t.mean[p][m], t.std[p][m]) = mean_std(v);
        }
}

inline std::vector<int> default_ladder(int max_value, std::vector<int> ladder)
{
    std::vector<int> out;
    for (int v : ladder)
        if (v <= max_value)
            out.push_back(v);
    if (out.empty() || out.back() != max_value)
        out.push_back(max_value);
    return out;
}

} // namespace detail

/// rx_gen: train on the first n receivers of a seeded permutation, test on
/// held-out signals of those receivers (same Rx) and on `held_out_rx`
/// receivers never seen in training (diff Rx).
inline ResultTable run_rx_gen(const store::SignalStore &st, const ProtocolParams &p, std::uint64_t seed)
{
    const int n_rx = st.dims().n_rx;
    if (n_rx < p.held_out_rx + 1 || p.held_out_rx < 1)
        throw InvalidArgument("rx_gen: need at least held_out_rx + 1 receivers");
    if (p.day < 0 || p.day >= st.dims().n_days)
        throw InvalidArgument("rx_gen: day out of range");
    const auto data = detail::select(st, [&](const auto &s) { return s.day == p.day && s.equalized == p.equalized; });
    ResultTable t;
    t.protocol = "rx_gen";
    t.sweep_name = "n_train_rx";
    t.metrics = {"same_rx", "diff_rx"};
    for (int n = 1; n <= n_rx - p.held_out_rx; ++n)
        t.sweep.push_back(n);
    detail::run_grid(t, p.realizations, [&](std::size_t point, int real) {
        std::vector<int> perm(static_cast<std::size_t>(n_rx));
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(derive_seed(seed, 0x7278, real));
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::set<int> test_rx(perm.end() - p.held_out_rx, perm.end());
        const std::set<int> train_rx(perm.begin(), perm.begin() + t.sweep[point]);
        detail::Signals pool, unseen;
        for (const auto &s : data)
        {
            if (train_rx.count(s.rx))
                pool.push_back(s);
            else if (test_rx.count(s.rx))
                unseen.push_back(s);
        }
        const Split sp = split(pool, {0.8, 0.1, 0.1, derive_seed(seed, 0x7370, real)});
        const auto model = p.trainer(detail::gather(pool, sp.train));
        return std::vector<double>{accuracy(model, detail::gather(pool, sp.test)), accuracy(model, unseen)};
    });
    return t;
}

/// day_gen: fixed receiver, train on days [0, n), test on held-out signals of
/// those days (same day) and on the last day (diff day), for raw and
/// equalized signals.
inline ResultTable run_day_gen(const store::SignalStore &st, const ProtocolParams &p, std::uint64_t seed)
{
    const int n_days = st.dims().n_days;
    if (n_days < 2)
        throw InvalidArgument("day_gen: need at least 2 days");
    if (p.rx < 0 || p.rx >= st.dims().n_rx)
        throw InvalidArgument("day_gen: rx out of range");
    ResultTable t;
    t.protocol = "day_gen";
    t.sweep_name = "n_train_days";
    t.metrics = {"same_day_raw", "diff_day_raw", "same_day_eq", "diff_day_eq"};
    for (int n = 1; n < n_days; ++n)
        t.sweep.push_back(n);
    const int last = n_days - 1;
    detail::run_grid(t, p.realizations, [&](std::size_t point, int real) {
        std::vector<double> out;
        for (bool eq : {false, true})
        {
            detail::Signals pool, unseen;
            for (const auto &s : st.signals())
            {
                if (s.rx != p.rx || s.equalized != eq)
                    continue;
                if (s.day < t.sweep[point])
                    pool.push_back(s);
                else if (s.day == last)
                    unseen.push_back(s);
            }
            const Split sp = split(pool, {0.8, 0.1, 0.1, derive_seed(seed, 0x6479, real)});
            const auto model = p.trainer(detail::gather(pool, sp.train));
            out.push_back(accuracy(model, detail::gather(pool, sp.test)));
            out.push_back(accuracy(model, unseen));
        }
        return out;
    });
    return t;
}

/// nsig: train on n signals per (tx, rx) cell drawn from the training part
/// of a fixed split; the test part stays the same across n.
inline ResultTable run_nsig(const store::SignalStore &st, const ProtocolParams &p, std::uint64_t seed)
{
    if (p.day < 0 || p.day >= st.dims().n_days)
        throw InvalidArgument("nsig: day out of range");
    const auto data = detail::select(st, [&](const auto &s) { return s.day == p.day && s.equalized == p.equalized; });
    ResultTable t;
    t.protocol = "nsig";
    t.sweep_name = "signals_per_cell";
    t.metrics = {"accuracy"};

    // Smallest training-part cell count bounds the sweep.
    const Split probe = split(data, {0.8, 0.1, 0.1, derive_seed(seed, 0x6e73, 0)});
    std::map<std::pair<int, int>, int> cells;
    for (auto i : probe.train)
        ++cells[{data[i].tx, data[i].rx}];
    int min_cell = std::numeric_limits<int>::max();
    for (const auto &[k, v] : cells)
        min_cell = std::min(min_cell, v);
    if (cells.empty())
        throw InvalidArgument("nsig: no training signals");
    t.sweep = p.sweep.empty() ? detail::default_ladder(min_cell, {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000}) : p.sweep;
    for (int n : t.sweep)
        if (n < 1 || n > min_cell)
            throw InvalidArgument("nsig: sweep value " + std::to_string(n) + " outside [1, " +
                                  std::to_string(min_cell) + "]");

    detail::run_grid(t, p.realizations, [&](std::size_t point, int real) {
        const Split sp = split(data, {0.8, 0.1, 0.1, derive_seed(seed, 0x6e73, real)});
        std::map<std::pair<int, int>, std::vector<std::size_t>> by_cell;
        for (auto i : sp.train)
            by_cell[{data[i].tx, data[i].rx}].push_back(i);
        std::vector<std::size_t> chosen;
        for (auto &[cell, idx] : by_cell)
        {
            std::mt19937_64 rng(derive_seed(seed, 0x6373, real, cell.first, cell.second));
            std::shuffle(idx.begin(), idx.end(), rng);
            const auto n = std::min(idx.size(), static_cast<std::size_t>(t.sweep[point]));
            chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
        }
        const auto model = p.trainer(detail::gather(data, chosen));
        return std::vector<double>{accuracy(model, detail::gather(data, sp.test))};
    });
    return t;
}

/// ntx: classify among N randomly drawn transmitters.
inline ResultTable run_ntx(const store::SignalStore &st, const ProtocolParams &p, std::uint64_t seed)
{
    const int n_tx = st.dims().n_tx;
    if (n_tx < 2)
        throw InvalidArgument("ntx: need at least 2 transmitters");
    if (p.day < 0 || p.day >= st.dims().n_days)
        throw InvalidArgument("ntx: day out of range");
    const auto data = detail::select(st, [&](const auto &s) { return s.day == p.day && s.equalized == p.equalized; });
    ResultTable t;
    t.protocol = "ntx";
    t.sweep_name = "n_tx";
    t.metrics = {"accuracy"};
    t.sweep = p.sweep.empty() ? detail::default_ladder(n_tx, {2, 5, 10, 20, 50, 100, 150}) : p.sweep;
    for (int n : t.sweep)
        if (n < 2 || n > n_tx)
            throw InvalidArgument("ntx: sweep value " + std::to_string(n) + " outside [2, " + std::to_string(n_tx) + "]");
    detail::run_grid(t, p.realizations, [&](std::size_t point, int real) {
        std::vector<int> perm(static_cast<std::size_t>(n_tx));
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(derive_seed(seed, 0x7478, real, point));
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::set<int> keep(perm.begin(), perm.begin() + t.sweep[point]);
        detail::Signals pool;
        for (const auto &s : data)
            if (keep.count(s.tx))
                pool.push_back(s);
        const Split sp = split(pool, {0.8, 0.1, 0.1, derive_seed(seed, 0x7370, real)});
        const auto model = p.trainer(detail::gather(pool, sp.train));
        return std::vector<double>{accuracy(model, detail::gather(pool, sp.test))};
    });
    return t;
}

inline ResultTable run_protocol(const store::SignalStore &st, Protocol proto, const ProtocolParams &p,
                                std::uint64_t seed)
{
    if (p.realizations < 1)
        throw InvalidArgument("run_protocol: realizations must be >= 1");
    switch (proto)
    {
    case Protocol::RxGen:
        return run_rx_gen(st, p, seed);
    case Protocol::DayGen:
        return run_day_gen(st, p, seed);
    case Protocol::NSig:
        return run_nsig(st, p, seed);
    case Protocol::NTx:
        return run_ntx(st, p, seed);
    }
    throw InvalidArgument("run_protocol: unknown protocol");
}

// ---------------------------------------------------------------------------
// Localization

inline constexpr double kPowerOffsetDb = 30.0; // linear power read as watts, shown in dBm

struct PowerFingerprint
{
    int tx = 0;
    std::vector<double> powers;  // per rx, dB
    std::vector<bool> fill_mask; // true where the pair was unobserved
};

/// Mean received power per (tx, rx) on one day from the raw signals. Unseen
/// pairs get a seeded uniform draw between that tx's weakest and strongest
/// observed receiver.
inline std::vector<PowerFingerprint> power_fingerprints(const store::SignalStore &st, int day, std::uint64_t seed)
{
    const auto &dims = st.dims();
    if (day < 0 || day >= dims.n_days)
        throw InvalidArgument("power_fingerprints: day out of range");
    const std::size_t n = static_cast<std::size_t>(dims.n_tx * dims.n_rx);
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> cnt(n, 0);
    for (const auto &s : st.signals())
    {
        if (s.equalized || s.day != day)
            continue;
        const std::size_t i = static_cast<std::size_t>(s.tx * dims.n_rx + s.rx);
        sum[i] += mean_power(s.as_samples());
        ++cnt[i];
    }
    std::vector<PowerFingerprint> out;
    for (int t = 0; t < dims.n_tx; ++t)
    {
        PowerFingerprint fp;
        fp.tx = t;
        fp.powers.assign(static_cast<std::size_t>(dims.n_rx), 0.0);
        fp.fill_mask.assign(static_cast<std::size_t>(dims.n_rx), true);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int r = 0; r < dims.n_rx; ++r)
        {
            const std::size_t i = static_cast<std::size_t>(t * dims.n_rx + r);
            if (cnt[i] == 0 || !(sum[i] > 0.0))
                continue;
            const double db = 10.0 * std::log10(sum[i] / static_cast<double>(cnt[i])) + kPowerOffsetDb;
            fp.powers[static_cast<std::size_t>(r)] = db;
            fp.fill_mask[static_cast<std::size_t>(r)] = false;
            lo = std::min(lo, db);
            hi = std::max(hi, db);
        }
        if (!(lo <= hi))
            throw InvalidArgument("power_fingerprints: tx " + std::to_string(t) + " has no observed receiver");
        std::mt19937_64 rng(derive_seed(seed, 0x6669, t));
        std::uniform_real_distribution<double> u(lo, hi);
        for (int r = 0; r < dims.n_rx; ++r)
            if (fp.fill_mask[static_cast<std::size_t>(r)])
                fp.powers[static_cast<std::size_t>(r)] = lo == hi ? lo : u(rng);
        out.push_back(std::move(fp));
    }
    return out;
}

using Position = std::pair<double, double>;

/// k-nearest-neighbour regression with inverse-distance weights in
/// fingerprint space. Exact matches are averaged among themselves.
inline Position knn_locate(std::span<const PowerFingerprint> train, std::span<const Position> train_pos,
                           const PowerFingerprint &query, std::size_t k = 3)
{
    if (train.size() != train_pos.size())
        throw InvalidArgument("knn_locate: fingerprints and positions differ in length");
    if (train.size() < k || k == 0)
        throw InvalidArgument("knn_locate: fewer than k training fingerprints");
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < train.size(); ++i)
    {
        if (train[i].powers.size() != query.powers.size())
            throw InvalidArgument("knn_locate: fingerprint length mismatch");
        double s = 0.0;
        for (std::size_t j = 0; j < query.powers.size(); ++j)
            s += (train[i].powers[j] - query.powers[j]) * (train[i].powers[j] - query.powers[j]);
        d.push_back({std::sqrt(s), i});
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double wx = 0.0, wy = 0.0, ws = 0.0;
    const bool exact = d.front().first < 1e-12;
    for (std::size_t i = 0; i < k; ++i)
    {
        if (exact && d[i].first >= 1e-12)
            break;
        const double w = exact ? 1.0 : 1.0 / d[i].first;
        wx += w * train_pos[d[i].second].first;
        wy += w * train_pos[d[i].second].second;
        ws += w;
    }
    return {wx / ws, wy / ws};
}

struct LocalizeParams
{
    std::size_t k = 3;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct LocalizationReport
{
    std::vector<int> test_tx;
    std::vector<Position> predicted;
    std::vector<double> l1_error;
    double mean_l1 = 0.0;
    double grid_hit_rate = 0.0; // rounded prediction equals the true grid point

    std::string to_text() const
    {
        std::ostringstream os;
        os << std::fixed << std::setprecision(3) << "tx,pred_x,pred_y,l1_error\n";
        for (std::size_t i = 0; i < test_tx.size(); ++i)
            os << test_tx[i] << ',' << predicted[i].first << ',' << predicted[i].second << ',' << l1_error[i] << '\n';
        os << "# mean_l1_m=" << mean_l1 << " grid_hit_rate=" << grid_hit_rate << '\n';
        return os.str();
    }
};

/// Seeded split of the transmitters; the test part is located from the rest.
inline LocalizationReport localize(std::span<const PowerFingerprint> fps, std::span<const Position> positions,
                                   const LocalizeParams &p = {})
{
    if (fps.size() != positions.size())
        throw InvalidArgument("localize: fingerprints and positions differ in length");
    std::vector<std::size_t> order(fps.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(p.seed, 0x6c6f63));
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(p.test_fraction * fps.size())));
    if (fps.size() < n_test + p.k)
        throw InvalidArgument("localize: fewer than k training fingerprints");
    std::vector<PowerFingerprint> train;
    std::vector<Position> train_pos;
    for (std::size_t i = n_test; i < order.size(); ++i)
    {
        train.push_back(fps[order[i]]);
        train_pos.push_back(positions[order[i]]);
    }
    LocalizationReport rep;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_test; ++i)
    {
        const auto &q = fps[order[i]];
        const auto &truth = positions[order[i]];
        const Position est = knn_locate(train, train_pos, q, p.k);
        const double l1 = std::abs(est.first - truth.first) + std::abs(est.second - truth.second);
        rep.test_tx.push_back(q.tx);
        rep.predicted.push_back(est);
        rep.l1_error.push_back(l1);
        rep.mean_l1 += l1;
        hits += std::round(est.first) == std::round(truth.first) && std::round(est.second) == std::round(truth.second);
    }
    rep.mean_l1 /= static_cast<double>(n_test);
    rep.grid_hit_rate = static_cast<double>(hits) / static_cast<double>(n_test);
    return rep;
}

/// Store whose raw signals follow log-distance path loss on a 1 m grid of
/// transmitters. Receivers sit at seeded random spots over the grid; pairs
/// weaker than `sensitivity_db` below the reference go unobserved.
struct PathlossStoreConfig
{
    int grid_cols = 10;
    int grid_rows = 10;
    int n_rx = 18;
    int signals_per_pair = 5;
    double exponent = 3.0;
    double shadowing_db = 1.0;   // per-pair log-normal shadowing
    double sensitivity_db = 40.0; // max path loss still observed, dB relative to 1 m
    std::uint64_t seed = 0;
};

inline store::SignalStore make_pathloss_store(const PathlossStoreConfig &c)
{
    if (c.grid_cols < 1 || c.grid_rows < 1 || c.n_rx < 1 || c.signals_per_pair < 1)
        throw InvalidArgument("make_pathloss_store: sizes must be >= 1");
    const int n_tx = c.grid_cols * c.grid_rows;
    store::SignalStore st(store::StoreDims{1, n_tx, c.n_rx});
    std::mt19937_64 rng(derive_seed(c.seed, 0x706c));
    std::uniform_real_distribution<double> ux(-0.5, c.grid_cols - 0.5), uy(-0.5, c.grid_rows - 0.5);
    std::vector<Position> rx_pos;
    for (int r = 0; r < c.n_rx; ++r)
    {
        const double x = ux(rng);
        rx_pos.push_back({x, uy(rng)});
    }
    for (int t = 0; t < n_tx; ++t)
        st.tx_positions.push_back({static_cast<double>(t % c.grid_cols), static_cast<double>(t / c.grid_cols)});
    std::normal_distribution<double> shadow(0.0, c.shadowing_db), g(0.0, std::sqrt(0.5));
    for (int t = 0; t < n_tx; ++t)
        for (int r = 0; r < c.n_rx; ++r)
        {
            const auto &a = st.tx_positions[static_cast<std::size_t>(t)];
            const auto &b = rx_pos[static_cast<std::size_t>(r)];
            const double dist = std::max(0.1, std::hypot(a.first - b.first, a.second - b.second));
            const double loss = 10.0 * c.exponent * std::log10(dist) + shadow(rng);
            if (loss > c.sensitivity_db)
                continue;
            const double amp = std::sqrt(std::pow(10.0, -loss / 10.0)) * 0.1;
            for (int k = 0; k < c.signals_per_pair; ++k)
            {
                store::IdSignal s;
                s.tx = t;
                s.rx = r;
                s.day = 0;
                for (auto &v : s.samples)
                    v = cf32(static_cast<float>(amp * g(rng)), static_cast<float>(amp * g(rng)));
                st.append(s);
            }
        }
    st.attributes["generator"] = "pathloss";
    return st;
}

} // namespace rfcurate::eval

#endif
