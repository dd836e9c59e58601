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

#ifndef RFCURATE_SIGSTORE_HPP
#define RFCURATE_SIGSTORE_HPP

// Identification-signal store, count tensors and the on-disk formats.
//
// Signal file (.wsig), all integers little-endian:
//   "WSIG" | u32 version = 1 | u32 record count
//   per record: u16 tx | u16 rx | u8 day | u8 flags (bit 0 = equalized)
//               | u32 sample count (= 256) | 256 x (f32 I, f32 Q)
// A sidecar "<file>.manifest" holds dims, label names and attributes as
// key=value lines.
//
// Capture file (.wcap):
//   "WCAP" | u32 version = 1 | f64 sample rate | i32 rx | i32 tx | i32 day
//   | u64 sample count | u32 ground-truth count
//   | per interval: i32 tx | u64 start | u64 length | u8 is_ack
//   | samples as (f32 I, f32 Q)

#include "common.hpp"
#include "wavegen.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace rfcurate::store
{

struct IdSignal
{
    std::array<cf32, kIdSignalLength> samples{};
    int tx = 0;
    int rx = 0;
    int day = 0;
    bool equalized = false;

    bool finite() const
    {
        return std::all_of(samples.begin(), samples.end(),
                           [](const cf32 &v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
    }

    Samples as_samples() const
    {
        Samples s(kIdSignalLength);
        for (std::size_t i = 0; i < kIdSignalLength; ++i)
            s[i] = cf64(samples[i].real(), samples[i].imag());
        return s;
    }

    static IdSignal from_samples(const Samples &s, int tx, int rx, int day, bool equalized)
    {
        if (s.size() < kIdSignalLength)
            throw InvalidArgument("IdSignal: need 256 samples");
        IdSignal out;
        for (std::size_t i = 0; i < kIdSignalLength; ++i)
            out.samples[i] = cf32(static_cast<float>(s[i].real()), static_cast<float>(s[i].imag()));
        out.tx = tx;
        out.rx = rx;
        out.day = day;
        out.equalized = equalized;
        return out;
    }

    bool operator==(const IdSignal &o) const
    {
        return tx == o.tx && rx == o.rx && day == o.day && equalized == o.equalized &&
               std::memcmp(samples.data(), o.samples.data(), sizeof(samples)) == 0;
    }
};

struct StoreDims
{
    int n_days = 1;
    int n_tx = 1;
    int n_rx = 1;

    bool operator==(const StoreDims &) const = default;
};

/// Signal counts C(d, t, r).
class CountTensor
{
  public:
    CountTensor() = default;
    explicit CountTensor(StoreDims dims)
        : dims_(dims), data_(static_cast<std::size_t>(dims.n_days * dims.n_tx * dims.n_rx), 0)
    {
    }

    const StoreDims &dims() const { return dims_; }
    int n_days() const { return dims_.n_days; }
    int n_tx() const { return dims_.n_tx; }
    int n_rx() const { return dims_.n_rx; }

    std::uint32_t &at(int d, int t, int r) { return data_[index(d, t, r)]; }
    std::uint32_t at(int d, int t, int r) const { return data_[index(d, t, r)]; }

    std::uint64_t sum() const
    {
        std::uint64_t s = 0;
        for (auto v : data_)
            s += v;
        return s;
    }

    std::uint32_t max() const { return data_.empty() ? 0 : *std::max_element(data_.begin(), data_.end()); }
    const std::vector<std::uint32_t> &values() const { return data_; }

    bool operator==(const CountTensor &) const = default;

  private:
    std::size_t index(int d, int t, int r) const
    {
        if (d < 0 || t < 0 || r < 0 || d >= dims_.n_days || t >= dims_.n_tx || r >= dims_.n_rx)
            throw InvalidArgument("CountTensor: index out of range");
        return (static_cast<std::size_t>(d) * static_cast<std::size_t>(dims_.n_tx) + static_cast<std::size_t>(t)) *
                   static_cast<std::size_t>(dims_.n_rx) +
               static_cast<std::size_t>(r);
    }

    StoreDims dims_{};
    std::vector<std::uint32_t> data_;
};

class StoreError : public Error
{
  public:
    enum class Kind
    {
        Io,
        BadMagic,
        VersionMismatch,
        Truncated,
        BadRecord,
        BadManifest,
        LabelOutOfRange,
    };

    StoreError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

/// In-memory signal store that keeps C and C_eq in sync with its records.
class SignalStore
{
  public:
    SignalStore() : SignalStore(StoreDims{}) {}
    explicit SignalStore(StoreDims dims) : dims_(dims), counts_(dims), counts_eq_(dims)
    {
        if (dims.n_days < 1 || dims.n_tx < 1 || dims.n_rx < 1 || dims.n_days > 256 || dims.n_tx > 65536 ||
            dims.n_rx > 65536)
            throw InvalidArgument("SignalStore: dims out of range");
        for (int t = 0; t < dims.n_tx; ++t)
            tx_names.push_back("tx" + std::to_string(t));
        for (int r = 0; r < dims.n_rx; ++r)
            rx_names.push_back("rx" + std::to_string(r));
        for (int d = 0; d < dims.n_days; ++d)
            day_names.push_back("day" + std::to_string(d));
    }

    const StoreDims &dims() const { return dims_; }

    void append(const IdSignal &s)
    {
        if (s.tx < 0 || s.rx < 0 || s.day < 0 || s.tx >= dims_.n_tx || s.rx >= dims_.n_rx || s.day >= dims_.n_days)
            throw StoreError(StoreError::Kind::LabelOutOfRange,
                             "append: label (day " + std::to_string(s.day) + ", tx " + std::to_string(s.tx) + ", rx " +
                                 std::to_string(s.rx) + ") outside declared dims");
        if (!s.finite())
            throw InvalidArgument("append: signal contains non-finite samples");
        signals_.push_back(s);
        ++(s.equalized ? counts_eq_ : counts_).at(s.day, s.tx, s.rx);
    }

    const std::vector<IdSignal> &signals() const { return signals_; }
    std::size_t size() const { return signals_.size(); }

    /// C for non-equalized signals, C_eq for equalized ones.
    const CountTensor &counts(bool equalized = false) const { return equalized ? counts_eq_ : counts_; }

    CountTensor recount(bool equalized) const
    {
        CountTensor c(dims_);
        for (const auto &s : signals_)
            if (s.equalized == equalized)
                ++c.at(s.day, s.tx, s.rx);
        return c;
    }

    bool operator==(const SignalStore &o) const
    {
        return dims_ == o.dims_ && signals_ == o.signals_ && tx_names == o.tx_names && rx_names == o.rx_names &&
               day_names == o.day_names && attributes == o.attributes && tx_positions == o.tx_positions;
    }

    std::vector<std::string> tx_names;
    std::vector<std::string> rx_names;
    std::vector<std::string> day_names;
    std::vector<std::pair<double, double>> tx_positions; // optional, metres
    std::map<std::string, std::string> attributes;

  private:
    StoreDims dims_;
    std::vector<IdSignal> signals_;
    CountTensor counts_;
    CountTensor counts_eq_;
};

namespace detail
{

inline void put_u16(std::string &b, std::uint16_t v)
{
    b.push_back(static_cast<char>(v & 0xFF));
    b.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string &b, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string &b, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string &b, float f) { put_u32(b, std::bit_cast<std::uint32_t>(f)); }

class Reader
{
  public:
    explicit Reader(const std::string &buf) : buf_(buf) {}

    bool has(std::size_t n) const { return pos_ + n <= buf_.size(); }

    std::uint64_t get(std::size_t n)
    {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += n;
        return v;
    }

    float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(get(4))); }
    std::string bytes(std::size_t n)
    {
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }

  private:
    const std::string &buf_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw StoreError(StoreError::Kind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Write-to-temp then rename so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path &path, const std::string &data)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw StoreError(StoreError::Kind::Io, "cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out)
            throw StoreError(StoreError::Kind::Io, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string join(const std::vector<std::string> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + v[i];
    return s;
}

inline std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    if (s.empty())
        return out;
    std::string cur;
    for (char c : s)
    {
        if (c == sep)
        {
            out.push_back(cur);
            cur.clear();
        }
        else
        {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline constexpr std::uint32_t kStoreVersion = 1;
inline constexpr std::size_t kRecordBytes = 2 + 2 + 1 + 1 + 4 + kIdSignalLength * 8;

inline std::filesystem::path manifest_path(const std::filesystem::path &store_path)
{
    std::filesystem::path m = store_path;
    m += ".manifest";
    return m;
}

inline std::string encode_signals(const SignalStore &s)
{
    std::string b;
    b.reserve(12 + s.size() * kRecordBytes);
    b += "WSIG";
    detail::put_u32(b, kStoreVersion);
    detail::put_u32(b, static_cast<std::uint32_t>(s.size()));
    for (const auto &sig : s.signals())
    {
        detail::put_u16(b, static_cast<std::uint16_t>(sig.tx));
        detail::put_u16(b, static_cast<std::uint16_t>(sig.rx));
        b.push_back(static_cast<char>(static_cast<std::uint8_t>(sig.day)));
        b.push_back(static_cast<char>(sig.equalized ? 1 : 0));
        detail::put_u32(b, static_cast<std::uint32_t>(kIdSignalLength));
        for (const auto &v : sig.samples)
        {
            detail::put_f32(b, v.real());
            detail::put_f32(b, v.imag());
        }
    }
    return b;
}

inline std::string encode_manifest(const SignalStore &s)
{
    std::ostringstream m;
    m << "# rfcurate signal store manifest\n";
    m << "version=" << kStoreVersion << "\n";
    m << "days=" << s.dims().n_days << "\n";
    m << "tx=" << s.dims().n_tx << "\n";
    m << "rx=" << s.dims().n_rx << "\n";
    m << "day_names=" << detail::join(s.day_names) << "\n";
    m << "tx_names=" << detail::join(s.tx_names) << "\n";
    m << "rx_names=" << detail::join(s.rx_names) << "\n";
    if (!s.tx_positions.empty())
    {
        std::vector<std::string> pos;
        for (const auto &[x, y] : s.tx_positions)
            pos.push_back(detail::fmt_double(x) + ":" + detail::fmt_double(y));
        m << "tx_positions=" << detail::join(pos) << "\n";
    }
    for (const auto &[k, v] : s.attributes)
        m << "attr." << k << "=" << v << "\n";
    return m.str();
}

inline void write_store(const std::filesystem::path &path, const SignalStore &s)
{
    detail::write_file_atomic(manifest_path(path), encode_manifest(s));
    detail::write_file_atomic(path, encode_signals(s));
}

inline SignalStore decode_store(const std::string &manifest, const std::string &data)
{
    std::map<std::string, std::string> kv;
    std::istringstream ms(manifest);
    for (std::string line; std::getline(ms, line);)
    {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw StoreError(StoreError::Kind::BadManifest, "manifest: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need_int = [&](const std::string &key) {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw StoreError(StoreError::Kind::BadManifest, "manifest: missing key '" + key + "'");
        try
        {
            return std::stoi(it->second);
        }
        catch (const std::exception &)
        {
            throw StoreError(StoreError::Kind::BadManifest, "manifest: bad integer for '" + key + "'");
        }
    };
    if (need_int("version") != static_cast<int>(kStoreVersion))
        throw StoreError(StoreError::Kind::VersionMismatch, "manifest: unsupported version");
    SignalStore s(StoreDims{need_int("days"), need_int("tx"), need_int("rx")});
    auto names = [&](const std::string &key, std::vector<std::string> &dst, int n) {
        const auto it = kv.find(key);
        if (it == kv.end())
            return;
        auto v = detail::split(it->second, ',');
        if (static_cast<int>(v.size()) != n)
            throw StoreError(StoreError::Kind::BadManifest, "manifest: '" + key + "' length mismatch");
        dst = std::move(v);
    };
    names("day_names", s.day_names, s.dims().n_days);
    names("tx_names", s.tx_names, s.dims().n_tx);
    names("rx_names", s.rx_names, s.dims().n_rx);
    if (const auto it = kv.find("tx_positions"); it != kv.end())
    {
        for (const auto &p : detail::split(it->second, ','))
        {
            const auto xy = detail::split(p, ':');
            if (xy.size() != 2)
                throw StoreError(StoreError::Kind::BadManifest, "manifest: bad tx position '" + p + "'");
            s.tx_positions.emplace_back(std::stod(xy[0]), std::stod(xy[1]));
        }
        if (static_cast<int>(s.tx_positions.size()) != s.dims().n_tx)
            throw StoreError(StoreError::Kind::BadManifest, "manifest: tx_positions length mismatch");
    }
    for (const auto &[k, v] : kv)
        if (k.rfind("attr.", 0) == 0)
            s.attributes[k.substr(5)] = v;

    detail::Reader rd(data);
    if (!rd.has(4) || rd.bytes(4) != "WSIG")
        throw StoreError(StoreError::Kind::BadMagic, "bad magic: not a WSIG signal file");
    if (!rd.has(8))
        throw StoreError(StoreError::Kind::Truncated, "truncated: header incomplete");
    const auto version = static_cast<std::uint32_t>(rd.get(4));
    if (version != kStoreVersion)
        throw StoreError(StoreError::Kind::VersionMismatch,
                         "version mismatch: file has " + std::to_string(version) + ", expected " +
                             std::to_string(kStoreVersion));
    const auto count = static_cast<std::uint32_t>(rd.get(4));
    for (std::uint32_t i = 0; i < count; ++i)
    {
        if (!rd.has(10))
            throw StoreError(StoreError::Kind::Truncated, "truncated: record " + std::to_string(i) + " header incomplete");
        IdSignal sig;
        sig.tx = static_cast<int>(rd.get(2));
        sig.rx = static_cast<int>(rd.get(2));
        sig.day = static_cast<int>(rd.get(1));
        const auto flags = rd.get(1);
        sig.equalized = (flags & 1) != 0;
        const auto n = rd.get(4);
        if (n != kIdSignalLength)
            throw StoreError(StoreError::Kind::BadRecord,
                             "bad record " + std::to_string(i) + ": sample count " + std::to_string(n));
        if (!rd.has(kIdSignalLength * 8))
            throw StoreError(StoreError::Kind::Truncated, "truncated: record " + std::to_string(i) + " samples incomplete");
        for (auto &v : sig.samples)
        {
            const float re = rd.f32();
            v = cf32(re, rd.f32());
        }
        try
        {
            s.append(sig);
        }
        catch (const StoreError &e)
        {
            throw StoreError(e.kind(), "record " + std::to_string(i) + ": " + e.what());
        }
        catch (const InvalidArgument &e)
        {
            throw StoreError(StoreError::Kind::BadRecord, "record " + std::to_string(i) + ": " + e.what());
        }
    }
    return s;
}

inline SignalStore read_store(const std::filesystem::path &path)
{
    if (!std::filesystem::exists(path))
        throw StoreError(StoreError::Kind::Io, "store not found: " + path.string());
    const auto mpath = manifest_path(path);
    if (!std::filesystem::exists(mpath))
        throw StoreError(StoreError::Kind::BadManifest, "manifest not found: " + mpath.string());
    return decode_store(detail::read_file(mpath), detail::read_file(path));
}

// ---- captures -------------------------------------------------------------

inline std::string encode_capture(const wavegen::IqCapture &c)
{
    std::string b;
    b.reserve(48 + c.ground_truth.size() * 21 + c.samples.size() * 8);
    b += "WCAP";
    detail::put_u32(b, 1);
    detail::put_u64(b, std::bit_cast<std::uint64_t>(c.sample_rate_hz));
    detail::put_u32(b, static_cast<std::uint32_t>(c.rx_id));
    detail::put_u32(b, static_cast<std::uint32_t>(c.tx_id));
    detail::put_u32(b, static_cast<std::uint32_t>(c.day));
    detail::put_u64(b, c.samples.size());
    detail::put_u32(b, static_cast<std::uint32_t>(c.ground_truth.size()));
    for (const auto &g : c.ground_truth)
    {
        detail::put_u32(b, static_cast<std::uint32_t>(g.tx_id));
        detail::put_u64(b, g.start);
        detail::put_u64(b, g.length);
        b.push_back(static_cast<char>(g.ack ? 1 : 0));
    }
    for (const auto &v : c.samples)
    {
        detail::put_f32(b, v.real());
        detail::put_f32(b, v.imag());
    }
    return b;
}

inline wavegen::IqCapture decode_capture(const std::string &data)
{
    detail::Reader rd(data);
    if (!rd.has(4) || rd.bytes(4) != "WCAP")
        throw StoreError(StoreError::Kind::BadMagic, "bad magic: not a WCAP capture file");
    if (!rd.has(4 + 8 + 12 + 8 + 4))
        throw StoreError(StoreError::Kind::Truncated, "truncated: capture header incomplete");
    if (rd.get(4) != 1)
        throw StoreError(StoreError::Kind::VersionMismatch, "version mismatch: capture version unsupported");
    wavegen::IqCapture c;
    c.sample_rate_hz = std::bit_cast<double>(rd.get(8));
    c.rx_id = static_cast<int>(static_cast<std::int32_t>(rd.get(4)));
    c.tx_id = static_cast<int>(static_cast<std::int32_t>(rd.get(4)));
    c.day = static_cast<int>(static_cast<std::int32_t>(rd.get(4)));
    const auto n = rd.get(8);
    const auto n_gt = rd.get(4);
    for (std::uint64_t i = 0; i < n_gt; ++i)
    {
        if (!rd.has(21))
            throw StoreError(StoreError::Kind::Truncated, "truncated: ground-truth entry " + std::to_string(i));
        wavegen::GroundTruth g;
        g.tx_id = static_cast<int>(static_cast<std::int32_t>(rd.get(4)));
        g.start = rd.get(8);
        g.length = rd.get(8);
        g.ack = rd.get(1) != 0;
        c.ground_truth.push_back(g);
    }
    if (!rd.has(n * 8))
        throw StoreError(StoreError::Kind::Truncated, "truncated: capture samples incomplete");
    c.samples.resize(n);
    for (auto &v : c.samples)
    {
        const float re = rd.f32();
        v = cf32(re, rd.f32());
    }
    return c;
}

inline std::string capture_filename(int day, int tx, int rx)
{
    return "cap_d" + std::to_string(day) + "_t" + std::to_string(tx) + "_r" + std::to_string(rx) + ".wcap";
}

inline void write_capture(const std::filesystem::path &path, const wavegen::IqCapture &c)
{
    detail::write_file_atomic(path, encode_capture(c));
}

inline wavegen::IqCapture read_capture(const std::filesystem::path &path)
{
    return decode_capture(detail::read_file(path));
}

// ---- analysis ---------------------------------------------------------------

struct HistogramBin
{
    std::uint64_t lo = 0; // inclusive
    std::uint64_t hi = 0; // exclusive
    std::size_t count = 0;
};

/// Number of (d, t, r) cells per count bin; cells above max_count are left out.
inline std::vector<HistogramBin> histogram(const CountTensor &c, std::uint64_t bin_width, std::uint64_t max_count)
{
    if (bin_width < 1)
        throw InvalidArgument("histogram: bin_width must be >= 1");
    const std::size_t n_bins = static_cast<std::size_t>(max_count / bin_width) + 1;
    std::vector<HistogramBin> bins(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i)
        bins[i] = {i * bin_width, (i + 1) * bin_width, 0};
    for (auto v : c.values())
        if (v <= max_count)
            ++bins[v / bin_width].count;
    return bins;
}

inline std::string format_histogram(const std::vector<HistogramBin> &bins)
{
    std::ostringstream os;
    os << "bin_lo,bin_hi,pairs\n";
    for (const auto &b : bins)
        os << b.lo << ',' << b.hi << ',' << b.count << '\n';
    return os.str();
}

/// Tx x Rx count grid for one day as CSV (rows: tx, columns: rx).
inline std::string format_grid(const SignalStore &s, int day, bool equalized)
{
    const auto &c = s.counts(equalized);
    if (day < 0 || day >= c.n_days())
        throw InvalidArgument("format_grid: day out of range");
    std::ostringstream os;
    os << "tx";
    for (int r = 0; r < c.n_rx(); ++r)
        os << ',' << s.rx_names[static_cast<std::size_t>(r)];
    os << '\n';
    for (int t = 0; t < c.n_tx(); ++t)
    {
        os << s.tx_names[static_cast<std::size_t>(t)];
        for (int r = 0; r < c.n_rx(); ++r)
            os << ',' << c.at(day, t, r);
        os << '\n';
    }
    return os.str();
}

} // namespace rfcurate::store

#endif
