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

#ifndef RFCURATE_SUBSETSELECT_HPP
#define RFCURATE_SUBSETSELECT_HPP

// Balanced subset selection over the count tensors.
//
// Given N transmitters and a per-pair signal requirement K, pick the
// transmitter set T (|T| = N) and receiver set R that maximize |R| such
// that, on every selected day and for both the raw and the equalized
// counts, at least p * N of the chosen transmitters have >= K signals at
// each chosen receiver. Ties in |R| are broken by the largest k, the
// smallest count over all chosen (day, tx, rx) cells of both tensors.

#include "common.hpp"
#include "sigstore.hpp"

#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace rfcurate::subset
{

/// Dense n_tx x n_rx matrix of counts.
struct CountMatrix
{
    int n_tx = 0;
    int n_rx = 0;
    std::vector<std::uint32_t> values;

    CountMatrix() = default;
    CountMatrix(int tx, int rx, std::uint32_t fill = 0)
        : n_tx(tx), n_rx(rx), values(static_cast<std::size_t>(tx * rx), fill)
    {
    }
    CountMatrix(int tx, int rx, std::vector<std::uint32_t> v) : n_tx(tx), n_rx(rx), values(std::move(v))
    {
        if (values.size() != static_cast<std::size_t>(tx * rx))
            throw InvalidArgument("CountMatrix: value count does not match dims");
    }

    std::uint32_t &at(int t, int r) { return values[static_cast<std::size_t>(t * n_rx + r)]; }
    std::uint32_t at(int t, int r) const { return values[static_cast<std::size_t>(t * n_rx + r)]; }

    bool operator==(const CountMatrix &) const = default;
};

struct SubsetSpec
{
    int n_tx_required = 1;    // N
    std::uint32_t k_min = 1;  // K
    double p = 1.0;
    std::uint32_t k_low = 0;  // K_low
    std::vector<int> days;    // empty: all days

    void validate() const
    {
        if (n_tx_required < 1)
            throw InvalidArgument("SubsetSpec: N must be >= 1");
        if (k_min < 1)
            throw InvalidArgument("SubsetSpec: K must be >= 1");
        if (!(p > 0.0 && p <= 1.0))
            throw InvalidArgument("SubsetSpec: p must lie in (0, 1]");
        if (k_low > k_min)
            throw InvalidArgument("SubsetSpec: K_low must not exceed K");
    }

    std::vector<int> resolved_days(int n_days) const
    {
        if (days.empty())
        {
            std::vector<int> all(static_cast<std::size_t>(n_days));
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        for (int d : days)
            if (d < 0 || d >= n_days)
                throw InvalidArgument("SubsetSpec: day " + std::to_string(d) + " out of range");
        return days;
    }

    /// p * N with a small slack so that e.g. 0.9 * 10 compares as exactly 9.
    double coverage_needed() const { return p * static_cast<double>(n_tx_required) - 1e-9; }
};

struct SubsetSolution
{
    std::vector<int> tx;     // sorted ascending
    std::vector<int> rx;     // sorted ascending
    std::uint64_t k = 0;
    double objective = 0.0;
    bool verified = false;

    std::size_t m() const { return rx.size(); }
};

/// C'(t, r) = min over the given days (all days when empty).
inline CountMatrix min_over_days(const store::CountTensor &c, const std::vector<int> &days = {})
{
    if (c.n_days() < 1)
        throw InvalidArgument("min_over_days: need at least one day");
    SubsetSpec probe;
    probe.days = days;
    const auto ds = probe.resolved_days(c.n_days());
    CountMatrix m(c.n_tx(), c.n_rx(), std::numeric_limits<std::uint32_t>::max());
    for (int d : ds)
        for (int t = 0; t < c.n_tx(); ++t)
            for (int r = 0; r < c.n_rx(); ++r)
                m.at(t, r) = std::min(m.at(t, r), c.at(d, t, r));
    return m;
}

/// C_min(t, r): minimum over the given days of both tensors.
inline CountMatrix min_over_days_both(const store::CountTensor &c, const store::CountTensor &c_eq,
                                      const std::vector<int> &days = {})
{
    if (!(c.dims() == c_eq.dims()))
        throw InvalidArgument("min_over_days_both: tensor dims differ");
    CountMatrix a = min_over_days(c, days);
    const CountMatrix b = min_over_days(c_eq, days);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        a.values[i] = std::min(a.values[i], b.values[i]);
    return a;
}

/// Greedy heuristic: rank transmitters by how many receivers give them at
/// least K signals (ties to the lower index), keep the top N, then keep the
/// receivers where at least p * N of them reach K.
inline SubsetSolution greedy_select(const CountMatrix &cp, int n_required, std::uint32_t k_min, double p = 1.0)
{
    if (n_required < 1 || n_required > cp.n_tx)
        throw InvalidArgument("greedy_select: N must lie in [1, n_tx]");
    std::vector<int> score(static_cast<std::size_t>(cp.n_tx), 0);
    for (int t = 0; t < cp.n_tx; ++t)
        for (int r = 0; r < cp.n_rx; ++r)
            score[static_cast<std::size_t>(t)] += cp.at(t, r) >= k_min ? 1 : 0;
    std::vector<int> order(static_cast<std::size_t>(cp.n_tx));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)]; });

    SubsetSolution sol;
    sol.tx.assign(order.begin(), order.begin() + n_required);
    std::sort(sol.tx.begin(), sol.tx.end());
    const double needed = p * static_cast<double>(n_required) - 1e-9;
    for (int r = 0; r < cp.n_rx; ++r)
    {
        int ok = 0;
        for (int t : sol.tx)
            ok += cp.at(t, r) >= k_min ? 1 : 0;
        if (static_cast<double>(ok) >= needed)
            sol.rx.push_back(r);
    }
    if (!sol.rx.empty())
    {
        std::uint64_t k = std::numeric_limits<std::uint64_t>::max();
        for (int t : sol.tx)
            for (int r : sol.rx)
                k = std::min<std::uint64_t>(k, cp.at(t, r));
        sol.k = k;
    }
    sol.objective = static_cast<double>(sol.rx.size());
    return sol;
}

struct VerifyReport
{
    bool ok = true;
    std::uint64_t k_actual = 0; // min over selected cells of both tensors; 0 when R is empty
    std::vector<std::string> violations;

    void fail(std::string msg)
    {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

/// Checks a solution against the raw tensors, independently of any model.
inline VerifyReport verify_solution(const SubsetSolution &sol, const store::CountTensor &c,
                                    const store::CountTensor &c_eq, const SubsetSpec &spec)
{
    VerifyReport rep;
    if (!(c.dims() == c_eq.dims()))
    {
        rep.fail("tensor dims differ");
        return rep;
    }
    const auto days = spec.resolved_days(c.n_days());
    if (static_cast<int>(sol.tx.size()) != spec.n_tx_required)
        rep.fail("|T| = " + std::to_string(sol.tx.size()) + " but N = " + std::to_string(spec.n_tx_required));
    auto check_ids = [&](const std::vector<int> &ids, int n, const char *what) {
        std::vector<int> s = ids;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            rep.fail(std::string("duplicate ") + what + " index");
        for (int i : ids)
            if (i < 0 || i >= n)
                rep.fail(std::string(what) + " index " + std::to_string(i) + " out of range");
    };
    check_ids(sol.tx, c.n_tx(), "tx");
    check_ids(sol.rx, c.n_rx(), "rx");
    if (!rep.ok)
        return rep;

    const double needed = spec.coverage_needed();
    for (int d : days)
        for (int r : sol.rx)
        {
            int ok = 0, ok_eq = 0;
            for (int t : sol.tx)
            {
                ok += c.at(d, t, r) >= spec.k_min ? 1 : 0;
                ok_eq += c_eq.at(d, t, r) >= spec.k_min ? 1 : 0;
            }
            if (static_cast<double>(ok) < needed)
                rep.fail("coverage violated for (day " + std::to_string(d) + ", rx " + std::to_string(r) + "): " +
                         std::to_string(ok) + " tx reach K in C");
            if (static_cast<double>(ok_eq) < needed)
                rep.fail("coverage violated for (day " + std::to_string(d) + ", rx " + std::to_string(r) + "): " +
                         std::to_string(ok_eq) + " tx reach K in C_eq");
        }
    if (!sol.rx.empty())
    {
        std::uint64_t k = std::numeric_limits<std::uint64_t>::max();
        for (int d : days)
            for (int t : sol.tx)
                for (int r : sol.rx)
                    k = std::min<std::uint64_t>(k, std::min(c.at(d, t, r), c_eq.at(d, t, r)));
        rep.k_actual = k;
        if (k < spec.k_low)
            rep.fail("k = " + std::to_string(k) + " below K_low = " + std::to_string(spec.k_low));
        if (sol.k > k)
            rep.fail("reported k = " + std::to_string(sol.k) + " exceeds achieved " + std::to_string(k));
    }
    return rep;
}

/// Copies the selected (tx, rx, day) signals into a new store with compact
/// labels, keeping at most max_sig signals per (day, tx, rx, equalized)
/// cell in original order.
inline store::SignalStore materialize(const store::SignalStore &src, const SubsetSolution &sol,
                                      const std::vector<int> &days, std::uint32_t max_sig)
{
    if (!sol.verified)
        throw InvalidArgument("materialize: solution has not been verified");
    if (sol.tx.empty() || sol.rx.empty() || days.empty())
        throw InvalidArgument("materialize: empty selection");
    const auto &dims = src.dims();
    std::vector<int> tx_map(static_cast<std::size_t>(dims.n_tx), -1), rx_map(static_cast<std::size_t>(dims.n_rx), -1),
        day_map(static_cast<std::size_t>(dims.n_days), -1);
    for (std::size_t i = 0; i < sol.tx.size(); ++i)
        tx_map.at(static_cast<std::size_t>(sol.tx[i])) = static_cast<int>(i);
    for (std::size_t i = 0; i < sol.rx.size(); ++i)
        rx_map.at(static_cast<std::size_t>(sol.rx[i])) = static_cast<int>(i);
    for (std::size_t i = 0; i < days.size(); ++i)
        day_map.at(static_cast<std::size_t>(days[i])) = static_cast<int>(i);

    store::SignalStore out(store::StoreDims{static_cast<int>(days.size()), static_cast<int>(sol.tx.size()),
                                            static_cast<int>(sol.rx.size())});
    for (std::size_t i = 0; i < sol.tx.size(); ++i)
        out.tx_names[i] = src.tx_names[static_cast<std::size_t>(sol.tx[i])];
    for (std::size_t i = 0; i < sol.rx.size(); ++i)
        out.rx_names[i] = src.rx_names[static_cast<std::size_t>(sol.rx[i])];
    for (std::size_t i = 0; i < days.size(); ++i)
        out.day_names[i] = src.day_names[static_cast<std::size_t>(days[i])];
    if (!src.tx_positions.empty())
        for (int t : sol.tx)
            out.tx_positions.push_back(src.tx_positions[static_cast<std::size_t>(t)]);
    out.attributes = src.attributes;
    out.attributes["max_sig"] = std::to_string(max_sig);

    for (const auto &s : src.signals())
    {
        const int t = tx_map[static_cast<std::size_t>(s.tx)];
        const int r = rx_map[static_cast<std::size_t>(s.rx)];
        const int d = day_map[static_cast<std::size_t>(s.day)];
        if (t < 0 || r < 0 || d < 0)
            continue;
        if (out.counts(s.equalized).at(d, t, r) >= max_sig)
            continue;
        store::IdSignal copy = s;
        copy.tx = t;
        copy.rx = r;
        copy.day = d;
        out.append(copy);
    }
    return out;
}

/// Pre-packaged compact subset shapes.
struct Recipe
{
    const char *name;
    int n_tx;
    int n_rx;
    std::uint32_t k;
    double p;
    int n_days;

    SubsetSpec spec() const
    {
        SubsetSpec s;
        s.n_tx_required = n_tx;
        s.k_min = k;
        s.p = p;
        s.k_low = 0;
        s.days.resize(static_cast<std::size_t>(n_days));
        std::iota(s.days.begin(), s.days.end(), 0);
        return s;
    }
};

inline constexpr std::array<Recipe, 4> kRecipes = {{
    {"manysig", 6, 12, 1000, 1.0, 4},
    {"manytx", 150, 18, 50, 0.9, 4},
    {"manyrx", 10, 32, 200, 0.9, 4},
    {"singleday", 28, 10, 800, 1.0, 1},
}};

inline std::optional<Recipe> find_recipe(const std::string &name)
{
    for (const auto &r : kRecipes)
        if (name == r.name)
            return r;
    return std::nullopt;
}

inline std::string describe(const SubsetSpec &s)
{
    std::ostringstream os;
    os << "N=" << s.n_tx_required << " K=" << s.k_min << " p=" << s.p << " K_low=" << s.k_low << " days=";
    for (std::size_t i = 0; i < s.days.size(); ++i)
        os << (i ? "," : "") << s.days[i];
    if (s.days.empty())
        os << "all";
    return os.str();
}

} // namespace rfcurate::subset

#endif
