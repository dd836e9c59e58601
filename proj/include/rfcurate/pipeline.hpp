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

#ifndef RFCURATE_PIPELINE_HPP
#define RFCURATE_PIPELINE_HPP

// Dataset assembly stages: captures -> raw Id signals -> equalized Id
// signals -> count summaries. Each stage works on in-memory objects; the
// *_dir helpers add the on-disk layout used by the command line tool.

#include "burstdetect.hpp"
#include "preambleeq.hpp"
#include "sigstore.hpp"
#include "wavegen.hpp"

#include <filesystem>
#include <regex>

namespace rfcurate::pipeline
{

namespace fs = std::filesystem;

/// Screened bursts of one capture, in capture order.
struct CaptureBursts
{
    int day = 0;
    int tx = 0;
    int rx = 0;
    std::vector<burst::Burst> bursts;
};

struct DetectStats
{
    std::size_t captures = 0;
    std::size_t bursts = 0;
    std::size_t packets = 0;
    std::size_t dropped_sparse = 0; // signals removed with sparse (day, tx) pairs
};

struct DetectOutcome
{
    store::SignalStore store;
    std::vector<CaptureBursts> bursts; // only bursts whose signal was kept
    DetectStats stats;
};

/// Thrown when C_eq exceeds C in some cell.
inline void check_counts(const store::SignalStore &s)
{
    const auto &c = s.counts(false);
    const auto &ce = s.counts(true);
    for (int d = 0; d < c.n_days(); ++d)
        for (int t = 0; t < c.n_tx(); ++t)
            for (int r = 0; r < c.n_rx(); ++r)
                if (ce.at(d, t, r) > c.at(d, t, r))
                    throw Error("count check failed: C_eq > C at (day " + std::to_string(d) + ", tx " +
                                std::to_string(t) + ", rx " + std::to_string(r) + ")");
}

namespace detail
{

/// Keeps signals of (day, tx) pairs with at least min_packets signals of the
/// given kind, summed over receivers.
inline std::vector<store::IdSignal> drop_sparse(const std::vector<store::IdSignal> &sigs, bool equalized,
                                                const burst::DetectionParams &p, std::size_t &dropped)
{
    std::map<int, std::map<int, std::size_t>> per_day;
    for (const auto &s : sigs)
        if (s.equalized == equalized)
            ++per_day[s.day][s.tx];
    std::map<int, std::set<int>> keep;
    for (const auto &[d, counts] : per_day)
        keep[d] = burst::drop_sparse_tx(counts, p);
    std::vector<store::IdSignal> out;
    for (const auto &s : sigs)
    {
        if (s.equalized == equalized && !keep[s.day].count(s.tx))
        {
            ++dropped;
            continue;
        }
        out.push_back(s);
    }
    return out;
}

} // namespace detail

/// Energy detection, screening and raw Id-signal extraction over a set of
/// captures sharing one (days, tx, rx) grid.
inline DetectOutcome detect_captures(const std::vector<wavegen::IqCapture> &caps, store::StoreDims dims,
                                     const burst::DetectionParams &p = {})
{
    p.validate();
    struct Local
    {
        std::vector<store::IdSignal> sigs;
        CaptureBursts kept;
        std::size_t bursts = 0;
        std::size_t packets = 0;
    };
    std::vector<Local> local(caps.size());
    parallel_for(caps.size(), [&](std::size_t i) {
        const auto &cap = caps[i];
        const auto all = burst::detect_bursts(cap, p);
        const auto pk = burst::screen_packets(all, p);
        auto &l = local[i];
        l.bursts = all.size();
        l.packets = pk.size();
        l.kept = {cap.day, cap.tx_id, cap.rx_id, {}};
        for (const auto &b : pk)
            if (auto s = burst::extract_nonequalized(cap, b))
            {
                l.sigs.push_back(*s);
                l.kept.bursts.push_back(b);
            }
    });

    DetectOutcome out{store::SignalStore(dims), {}, {}};
    std::vector<store::IdSignal> all;
    for (auto &l : local)
    {
        out.stats.bursts += l.bursts;
        out.stats.packets += l.packets;
        all.insert(all.end(), l.sigs.begin(), l.sigs.end());
    }
    out.stats.captures = caps.size();
    const auto kept = detail::drop_sparse(all, false, p, out.stats.dropped_sparse);
    std::set<std::tuple<int, int>> surviving;
    for (const auto &s : kept)
    {
        out.store.append(s);
        surviving.insert({s.day, s.tx});
    }
    for (auto &l : local)
        if (surviving.count({l.kept.day, l.kept.tx}) && !l.kept.bursts.empty())
            out.bursts.push_back(std::move(l.kept));
    return out;
}

struct EqualizeStats
{
    std::size_t attempted = 0;
    std::size_t equalized = 0;
    std::size_t discarded = 0;      // no L-STF found or too short
    std::size_t dropped_sparse = 0; // equalized signals removed with sparse pairs
    std::vector<std::string> per_capture;
};

/// Adds an equalized Id signal for every burst where the preamble is found.
/// `caps` is looked up by (day, tx, rx).
inline EqualizeStats equalize_store(store::SignalStore &st, const std::vector<CaptureBursts> &bursts,
                                    const std::function<wavegen::IqCapture(int, int, int)> &load,
                                    const eq::EqualizerParams &ep = {}, const burst::DetectionParams &dp = {})
{
    EqualizeStats stats;
    std::vector<std::vector<store::IdSignal>> produced(bursts.size());
    std::vector<std::size_t> fails(bursts.size(), 0);
    parallel_for(bursts.size(), [&](std::size_t i) {
        const auto &cb = bursts[i];
        const auto cap = load(cb.day, cb.tx, cb.rx);
        for (const auto &b : cb.bursts)
        {
            auto s = eq::equalize_pipeline(cap, b, ep);
            if (s)
                produced[i].push_back(*s);
            else
                ++fails[i];
        }
    });
    std::vector<store::IdSignal> eq_sigs;
    for (std::size_t i = 0; i < bursts.size(); ++i)
    {
        const auto &cb = bursts[i];
        stats.attempted += cb.bursts.size();
        stats.discarded += fails[i];
        stats.per_capture.push_back("day " + std::to_string(cb.day) + " tx " + std::to_string(cb.tx) + " rx " +
                                    std::to_string(cb.rx) + ": " + std::to_string(cb.bursts.size()) + " bursts, " +
                                    std::to_string(fails[i]) + " discarded");
        eq_sigs.insert(eq_sigs.end(), produced[i].begin(), produced[i].end());
    }
    for (const auto &s : detail::drop_sparse(eq_sigs, true, dp, stats.dropped_sparse))
    {
        st.append(s);
        ++stats.equalized;
    }
    check_counts(st);
    return stats;
}

/// Histogram and per-day grids for both count tensors.
inline std::string analyze(const store::SignalStore &st, std::uint64_t bin_width, std::uint64_t max_count,
                           std::optional<int> grid_day = std::nullopt)
{
    std::ostringstream os;
    for (bool e : {false, true})
    {
        os << "# histogram " << (e ? "C_eq" : "C") << " bin_width=" << bin_width << " max=" << max_count << '\n';
        os << store::format_histogram(store::histogram(st.counts(e), bin_width, max_count));
    }
    std::vector<int> days;
    if (grid_day)
        days.push_back(*grid_day);
    else
        for (int d = 0; d < st.dims().n_days; ++d)
            days.push_back(d);
    for (int d : days)
        for (bool e : {false, true})
        {
            os << "# grid day=" << d << ' ' << (e ? "C_eq" : "C") << '\n';
            os << store::format_grid(st, d, e);
        }
    return os.str();
}

// ---- on-disk layout --------------------------------------------------------

inline fs::path bursts_path(const fs::path &store_path)
{
    fs::path p = store_path;
    p += ".bursts";
    return p;
}

inline std::string encode_bursts(const std::vector<CaptureBursts> &v)
{
    std::ostringstream os;
    os << "# day tx rx start length\n";
    for (const auto &cb : v)
        for (const auto &b : cb.bursts)
            os << cb.day << ' ' << cb.tx << ' ' << cb.rx << ' ' << b.start_index << ' ' << b.length << '\n';
    return os.str();
}

inline std::vector<CaptureBursts> decode_bursts(const std::string &text)
{
    std::vector<CaptureBursts> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
    {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        int d, t, r;
        std::size_t s, l;
        if (!(ls >> d >> t >> r >> s >> l))
            throw Error("malformed bursts line: " + line);
        if (out.empty() || out.back().day != d || out.back().tx != t || out.back().rx != r)
            out.push_back({d, t, r, {}});
        out.back().bursts.push_back({s, l});
    }
    return out;
}

/// Capture files in a directory, ordered by (day, tx, rx).
struct CaptureIndex
{
    store::StoreDims dims;
    std::map<std::tuple<int, int, int>, fs::path> files;
};

inline CaptureIndex index_captures(const fs::path &dir)
{
    if (!fs::is_directory(dir))
        throw store::StoreError(store::StoreError::Kind::Io, "capture directory not found: " + dir.string());
    static const std::regex re(R"(cap_d(\d+)_t(\d+)_r(\d+)\.wcap)");
    CaptureIndex idx;
    idx.dims = {0, 0, 0};
    for (const auto &e : fs::directory_iterator(dir))
    {
        std::smatch m;
        const std::string name = e.path().filename().string();
        if (!std::regex_match(name, m, re))
            continue;
        const int d = std::stoi(m[1]), t = std::stoi(m[2]), r = std::stoi(m[3]);
        idx.files[{d, t, r}] = e.path();
        idx.dims.n_days = std::max(idx.dims.n_days, d + 1);
        idx.dims.n_tx = std::max(idx.dims.n_tx, t + 1);
        idx.dims.n_rx = std::max(idx.dims.n_rx, r + 1);
    }
    if (idx.files.empty())
        throw store::StoreError(store::StoreError::Kind::Io, "no capture files in " + dir.string());
    return idx;
}

inline constexpr const char *kScenarioFile = "scenario.txt";

/// Writes every capture plus a small key=value scenario description.
inline void write_scenario(const wavegen::Scenario &sc, const fs::path &dir)
{
    fs::create_directories(dir);
    for (const auto &cap : sc.captures)
        store::write_capture(dir / store::capture_filename(cap.day, cap.tx_id, cap.rx_id), cap);
    std::ostringstream os;
    const auto &c = sc.config;
    os << "days=" << c.n_days << "\ntx=" << c.n_tx << "\nrx=" << c.n_rx << "\npackets=" << c.packets_per_capture
       << "\nsnr_db=" << store::detail::fmt_double(c.snr_db) << "\nseed=" << c.seed << "\ntx_positions=";
    for (std::size_t i = 0; i < sc.tx_positions.size(); ++i)
        os << (i ? "," : "") << store::detail::fmt_double(sc.tx_positions[i].x) << ':'
           << store::detail::fmt_double(sc.tx_positions[i].y);
    os << '\n';
    store::detail::write_file_atomic(dir / kScenarioFile, os.str());
}

/// Transmitter positions from a scenario description, empty when absent.
inline std::vector<std::pair<double, double>> read_scenario_positions(const fs::path &dir)
{
    std::vector<std::pair<double, double>> out;
    const fs::path p = dir / kScenarioFile;
    if (!fs::exists(p))
        return out;
    std::istringstream is(store::detail::read_file(p));
    for (std::string line; std::getline(is, line);)
        if (line.rfind("tx_positions=", 0) == 0)
            for (const auto &xy : store::detail::split(line.substr(13), ','))
            {
                const auto parts = store::detail::split(xy, ':');
                if (parts.size() == 2)
                    out.push_back({std::stod(parts[0]), std::stod(parts[1])});
            }
    return out;
}

/// Detection over a capture directory. The capture directory is recorded in
/// the store attributes relative to the store's own directory.
inline DetectOutcome detect_dir(const fs::path &capture_dir, const fs::path &store_path,
                                const burst::DetectionParams &p = {})
{
    const auto idx = index_captures(capture_dir);
    std::vector<wavegen::IqCapture> caps;
    for (const auto &[key, path] : idx.files)
        caps.push_back(store::read_capture(path));
    auto out = detect_captures(caps, idx.dims, p);
    const auto pos = read_scenario_positions(capture_dir);
    if (static_cast<int>(pos.size()) == idx.dims.n_tx)
        out.store.tx_positions = pos;
    const fs::path base = fs::absolute(store_path).parent_path();
    out.store.attributes["capture_dir"] = fs::relative(fs::absolute(capture_dir), base).generic_string();
    return out;
}

inline void write_detect_outcome(const DetectOutcome &o, const fs::path &store_path)
{
    store::write_store(store_path, o.store);
    store::detail::write_file_atomic(bursts_path(store_path), encode_bursts(o.bursts));
}

/// Reads a detected store with its bursts sidecar and equalizes it. The
/// returned store holds both raw and equalized signals.
inline std::pair<store::SignalStore, EqualizeStats> equalize_file(const fs::path &in_store,
                                                                  const eq::EqualizerParams &ep = {},
                                                                  const burst::DetectionParams &dp = {})
{
    auto st = store::read_store(in_store);
    const fs::path bp = bursts_path(in_store);
    if (!fs::exists(bp))
        throw store::StoreError(store::StoreError::Kind::Io, "bursts sidecar not found: " + bp.string());
    const auto bursts = decode_bursts(store::detail::read_file(bp));
    const auto it = st.attributes.find("capture_dir");
    if (it == st.attributes.end())
        throw store::StoreError(store::StoreError::Kind::BadManifest, "store has no attr.capture_dir");
    fs::path cdir = it->second;
    if (cdir.is_relative())
        cdir = fs::absolute(in_store).parent_path() / cdir;
    if (!fs::is_directory(cdir))
        throw store::StoreError(store::StoreError::Kind::Io, "capture directory not found: " + cdir.string());
    auto load = [&](int d, int t, int r) { return store::read_capture(cdir / store::capture_filename(d, t, r)); };
    auto stats = equalize_store(st, bursts, load, ep, dp);
    return {std::move(st), std::move(stats)};
}

} // namespace rfcurate::pipeline

#endif
