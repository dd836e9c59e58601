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

#ifndef RFCURATE_MILP_HPP
#define RFCURATE_MILP_HPP

// Mixed-integer model of the subset selection problem, its CPLEX LP text
// form, and an exact branch-and-bound solver specialised to the model.
//
// Variables: T(t), R(r), Y(t,r) = T&R, Z(t,r) = k*Y, Q(d,t,r) = Y&Cbar,
// Qe(d,t,r) = Y&Cbar_eq, and k. Objective: maximize w_inf * sum R + k.

#include "subsetselect.hpp"

#include <cinttypes>
#include <cstdio>
#include <functional>
#include <sstream>

namespace rfcurate::milp
{

enum class VarType
{
    Binary,
    Integer,
};

struct Variable
{
    std::string name;
    VarType type = VarType::Binary;
    double lb = 0.0;
    double ub = 1.0;
};

enum class Sense
{
    LE,
    GE,
    EQ,
};

struct Term
{
    std::size_t var = 0;
    double coef = 0.0;
};

struct Constraint
{
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

struct MilpModel
{
    subset::SubsetSpec spec;
    std::vector<int> days; // original day indices covered by the model
    int n_tx = 0;
    int n_rx = 0;
    std::uint64_t U = 1;
    double w_inf = 0.0;

    std::vector<std::uint8_t> cbar;    // (local day, t, r)
    std::vector<std::uint8_t> cbar_eq; // (local day, t, r)
    subset::CountMatrix c_min;         // over days and both tensors

    std::vector<Variable> vars;
    std::vector<Constraint> cons;
    std::vector<Term> objective; // maximized

    int n_days() const { return static_cast<int>(days.size()); }
    std::size_t cell(int dl, int t, int r) const
    {
        return (static_cast<std::size_t>(dl) * static_cast<std::size_t>(n_tx) + static_cast<std::size_t>(t)) *
                   static_cast<std::size_t>(n_rx) +
               static_cast<std::size_t>(r);
    }

    // Variable layout: T, R, Y, Z, Q, Qe, k.
    std::size_t var_T(int t) const { return static_cast<std::size_t>(t); }
    std::size_t var_R(int r) const { return static_cast<std::size_t>(n_tx + r); }
    std::size_t var_Y(int t, int r) const { return static_cast<std::size_t>(n_tx + n_rx + t * n_rx + r); }
    std::size_t var_Z(int t, int r) const { return var_Y(t, r) + static_cast<std::size_t>(n_tx * n_rx); }
    std::size_t var_Q(int dl, int t, int r) const
    {
        return static_cast<std::size_t>(n_tx + n_rx + 2 * n_tx * n_rx) + cell(dl, t, r);
    }
    std::size_t var_Qe(int dl, int t, int r) const
    {
        return var_Q(dl, t, r) + static_cast<std::size_t>(n_days() * n_tx * n_rx);
    }
    std::size_t var_k() const { return vars.size() - 1; }
};

/// Builds the model. Days come from spec.days (all days when empty).
inline MilpModel encode_milp(const store::CountTensor &c, const store::CountTensor &c_eq,
                             const subset::SubsetSpec &spec)
{
    if (!(c.dims() == c_eq.dims()))
        throw InvalidArgument("encode_milp: C and C_eq dims differ");
    spec.validate();
    if (spec.n_tx_required > c.n_tx())
        throw InvalidArgument("encode_milp: N exceeds the number of transmitters");

    MilpModel m;
    m.spec = spec;
    m.days = spec.resolved_days(c.n_days());
    m.n_tx = c.n_tx();
    m.n_rx = c.n_rx();
    const int nd = m.n_days();

    std::uint64_t umax = 1;
    for (int d : m.days)
        for (int t = 0; t < m.n_tx; ++t)
            for (int r = 0; r < m.n_rx; ++r)
                umax = std::max<std::uint64_t>(umax, std::max(c.at(d, t, r), c_eq.at(d, t, r)));
    m.U = umax;
    m.w_inf = static_cast<double>(m.U) * m.n_rx + 1.0;

    const std::size_t cells = static_cast<std::size_t>(nd * m.n_tx * m.n_rx);
    m.cbar.resize(cells);
    m.cbar_eq.resize(cells);
    for (int dl = 0; dl < nd; ++dl)
        for (int t = 0; t < m.n_tx; ++t)
            for (int r = 0; r < m.n_rx; ++r)
            {
                m.cbar[m.cell(dl, t, r)] = c.at(m.days[static_cast<std::size_t>(dl)], t, r) >= spec.k_min;
                m.cbar_eq[m.cell(dl, t, r)] = c_eq.at(m.days[static_cast<std::size_t>(dl)], t, r) >= spec.k_min;
            }
    m.c_min = subset::min_over_days_both(c, c_eq, m.days);

    const double U = static_cast<double>(m.U);
    auto ts = [](int v) { return std::to_string(v); };
    for (int t = 0; t < m.n_tx; ++t)
        m.vars.push_back({"T_" + ts(t), VarType::Binary, 0, 1});
    for (int r = 0; r < m.n_rx; ++r)
        m.vars.push_back({"R_" + ts(r), VarType::Binary, 0, 1});
    for (int t = 0; t < m.n_tx; ++t)
        for (int r = 0; r < m.n_rx; ++r)
            m.vars.push_back({"Y_" + ts(t) + "_" + ts(r), VarType::Binary, 0, 1});
    for (int t = 0; t < m.n_tx; ++t)
        for (int r = 0; r < m.n_rx; ++r)
            m.vars.push_back({"Z_" + ts(t) + "_" + ts(r), VarType::Integer, 0, U});
    for (const char *prefix : {"Q_", "Qe_"})
        for (int dl = 0; dl < nd; ++dl)
            for (int t = 0; t < m.n_tx; ++t)
                for (int r = 0; r < m.n_rx; ++r)
                    m.vars.push_back({prefix + ts(m.days[static_cast<std::size_t>(dl)]) + "_" + ts(t) + "_" + ts(r),
                                      VarType::Binary, 0, 1});
    m.vars.push_back({"k", VarType::Integer, 0, U});

    const std::size_t k = m.var_k();
    auto add = [&](std::string name, std::vector<Term> terms, Sense s, double rhs) {
        m.cons.push_back({std::move(name), std::move(terms), s, rhs});
    };
    for (int t = 0; t < m.n_tx; ++t)
        for (int r = 0; r < m.n_rx; ++r)
        {
            const std::string sfx = ts(t) + "_" + ts(r);
            const auto Y = m.var_Y(t, r), Z = m.var_Z(t, r), T = m.var_T(t), R = m.var_R(r);
            add("y1_" + sfx, {{Y, 1}, {T, -1}}, Sense::LE, 0);
            add("y2_" + sfx, {{Y, 1}, {R, -1}}, Sense::LE, 0);
            add("y3_" + sfx, {{Y, 1}, {T, -1}, {R, -1}}, Sense::GE, -1);
            add("z1_" + sfx, {{Z, 1}, {Y, -U}}, Sense::LE, 0);
            add("z2_" + sfx, {{Z, 1}}, Sense::GE, 0);
            add("z3_" + sfx, {{Z, 1}, {k, -1}}, Sense::LE, 0);
            add("z4_" + sfx, {{Z, 1}, {k, -1}, {Y, -U}}, Sense::GE, -U);
            add("cnt_" + sfx, {{Y, static_cast<double>(m.c_min.at(t, r))}, {Z, -1}}, Sense::GE, 0);
        }
    for (int pass = 0; pass < 2; ++pass)
    {
        const auto &cb = pass == 0 ? m.cbar : m.cbar_eq;
        const std::string tag = pass == 0 ? "q" : "qe";
        for (int dl = 0; dl < nd; ++dl)
            for (int t = 0; t < m.n_tx; ++t)
                for (int r = 0; r < m.n_rx; ++r)
                {
                    const std::string sfx = ts(m.days[static_cast<std::size_t>(dl)]) + "_" + ts(t) + "_" + ts(r);
                    const auto Q = pass == 0 ? m.var_Q(dl, t, r) : m.var_Qe(dl, t, r);
                    const auto Y = m.var_Y(t, r);
                    const double cv = cb[m.cell(dl, t, r)];
                    add(tag + "1_" + sfx, {{Q, 1}, {Y, -1}}, Sense::LE, 0);
                    add(tag + "2_" + sfx, {{Q, 1}}, Sense::LE, cv);
                    add(tag + "3_" + sfx, {{Q, 1}, {Y, -1}}, Sense::GE, cv - 1);
                }
    }
    const double pn = spec.p * spec.n_tx_required;
    for (int pass = 0; pass < 2; ++pass)
        for (int dl = 0; dl < nd; ++dl)
            for (int r = 0; r < m.n_rx; ++r)
            {
                std::vector<Term> terms;
                for (int t = 0; t < m.n_tx; ++t)
                    terms.push_back({pass == 0 ? m.var_Q(dl, t, r) : m.var_Qe(dl, t, r), 1});
                terms.push_back({m.var_R(r), -pn});
                add(std::string(pass == 0 ? "cov_" : "coveq_") + ts(m.days[static_cast<std::size_t>(dl)]) + "_" + ts(r),
                    std::move(terms), Sense::GE, 0);
            }
    add("klow", {{k, 1}}, Sense::GE, static_cast<double>(spec.k_low));
    {
        std::vector<Term> terms;
        for (int t = 0; t < m.n_tx; ++t)
            terms.push_back({m.var_T(t), 1});
        add("card", std::move(terms), Sense::EQ, static_cast<double>(spec.n_tx_required));
    }
    for (int r = 0; r < m.n_rx; ++r)
        m.objective.push_back({m.var_R(r), m.w_inf});
    m.objective.push_back({k, 1});
    return m;
}

/// Full assignment implied by a selection: Y, Z, Q, Qe follow T and R, and
/// k is the min of C_min over selected pairs (U when there are none).
inline std::vector<double> assignment_from(const MilpModel &m, const std::vector<int> &tx, const std::vector<int> &rx)
{
    std::vector<double> x(m.vars.size(), 0.0);
    std::vector<bool> ts(static_cast<std::size_t>(m.n_tx)), rs(static_cast<std::size_t>(m.n_rx));
    for (int t : tx)
        ts.at(static_cast<std::size_t>(t)) = true;
    for (int r : rx)
        rs.at(static_cast<std::size_t>(r)) = true;
    std::uint64_t k = m.U;
    for (int t : tx)
        for (int r : rx)
            k = std::min<std::uint64_t>(k, m.c_min.at(t, r));
    for (int t = 0; t < m.n_tx; ++t)
        x[m.var_T(t)] = ts[static_cast<std::size_t>(t)];
    for (int r = 0; r < m.n_rx; ++r)
        x[m.var_R(r)] = rs[static_cast<std::size_t>(r)];
    for (int t = 0; t < m.n_tx; ++t)
        for (int r = 0; r < m.n_rx; ++r)
        {
            const bool y = ts[static_cast<std::size_t>(t)] && rs[static_cast<std::size_t>(r)];
            x[m.var_Y(t, r)] = y;
            x[m.var_Z(t, r)] = y ? static_cast<double>(k) : 0.0;
            for (int dl = 0; dl < m.n_days(); ++dl)
            {
                x[m.var_Q(dl, t, r)] = y && m.cbar[m.cell(dl, t, r)];
                x[m.var_Qe(dl, t, r)] = y && m.cbar_eq[m.cell(dl, t, r)];
            }
        }
    x[m.var_k()] = static_cast<double>(k);
    return x;
}

/// Names of violated constraints and bounds (empty when feasible).
inline std::vector<std::string> violated(const MilpModel &m, const std::vector<double> &x, double tol = 1e-9)
{
    std::vector<std::string> out;
    if (x.size() != m.vars.size())
        return {"assignment size mismatch"};
    for (std::size_t i = 0; i < m.vars.size(); ++i)
        if (x[i] < m.vars[i].lb - tol || x[i] > m.vars[i].ub + tol || std::abs(x[i] - std::round(x[i])) > tol)
            out.push_back("bound " + m.vars[i].name);
    for (const auto &c : m.cons)
    {
        double lhs = 0.0;
        for (const auto &t : c.terms)
            lhs += t.coef * x[t.var];
        const bool ok = c.sense == Sense::LE   ? lhs <= c.rhs + tol
                        : c.sense == Sense::GE ? lhs >= c.rhs - tol
                                               : std::abs(lhs - c.rhs) <= tol;
        if (!ok)
            out.push_back(c.name);
    }
    return out;
}

inline double objective_value(const MilpModel &m, const std::vector<double> &x)
{
    double v = 0.0;
    for (const auto &t : m.objective)
        v += t.coef * x[t.var];
    return v;
}

// ---------------------------------------------------------------------------
// LP text

namespace detail
{

inline std::string num(double v)
{
    char buf[64];
    if (v == std::floor(v) && std::abs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

/// Linear expression, wrapped so no line gets long.
inline void expr(std::ostringstream &os, const MilpModel &m, const std::vector<Term> &terms)
{
    bool first = true;
    int on_line = 0;
    for (const auto &t : terms)
    {
        if (t.coef == 0.0)
            continue;
        if (on_line == 8)
        {
            os << "\n   ";
            on_line = 0;
        }
        const double a = std::abs(t.coef);
        if (first)
            os << (t.coef < 0 ? "-" : "");
        else
            os << (t.coef < 0 ? " - " : " + ");
        if (a != 1.0)
            os << num(a) << ' ';
        os << m.vars[t.var].name;
        first = false;
        ++on_line;
    }
    if (first)
        os << "0 " << m.vars.front().name;
}

} // namespace detail

/// CPLEX LP format. Deterministic: same model, same bytes.
inline std::string emit_lp(const MilpModel &m)
{
    std::ostringstream os;
    os << "\\ rfcurate subset selection model\n";
    os << "\\ days " << m.n_days() << " tx " << m.n_tx << " rx " << m.n_rx << " N " << m.spec.n_tx_required << " K "
       << m.spec.k_min << " p " << detail::num(m.spec.p) << " K_low " << m.spec.k_low << " U " << m.U << " w_inf "
       << detail::num(m.w_inf) << "\n";
    os << "Maximize\n obj: ";
    detail::expr(os, m, m.objective);
    os << "\nSubject To\n";
    for (const auto &c : m.cons)
    {
        os << ' ' << c.name << ": ";
        detail::expr(os, m, c.terms);
        os << (c.sense == Sense::LE ? " <= " : c.sense == Sense::GE ? " >= " : " = ") << detail::num(c.rhs) << '\n';
    }
    os << "Bounds\n";
    for (const auto &v : m.vars)
        if (v.type == VarType::Integer)
            os << ' ' << detail::num(v.lb) << " <= " << v.name << " <= " << detail::num(v.ub) << '\n';
    os << "General\n";
    for (const auto &v : m.vars)
        if (v.type == VarType::Integer)
            os << ' ' << v.name << '\n';
    os << "Binary\n";
    for (const auto &v : m.vars)
        if (v.type == VarType::Binary)
            os << ' ' << v.name << '\n';
    os << "End\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Exact solver

struct SolveLimits
{
    std::size_t max_cells = 64;            // n_tx * n_rx
    std::uint64_t max_nodes = 50'000'000;  // per search (per subtree when parallel)
    bool parallel = false;
};

enum class SolveStatus
{
    Optimal,
    Infeasible,
    LimitExceeded,
};

inline const char *to_string(SolveStatus s)
{
    switch (s)
    {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::LimitExceeded:
        return "limit exceeded";
    }
    return "?";
}

struct SolveResult
{
    SolveStatus status = SolveStatus::Infeasible;
    subset::SubsetSolution solution;
    std::uint64_t nodes = 0;
    std::string message;
};

namespace detail
{

struct Incumbent
{
    bool found = false;
    std::size_t m = 0;
    std::uint64_t k = 0;
    std::vector<int> tx, rx;

    bool beats(std::size_t m2, std::uint64_t k2) const { return !found || m2 > m || (m2 == m && k2 > k); }
};

// Depth-first search over T. Once T is fixed, R is forced: every receiver
// whose coverage holds on all days for both tensors and whose C_min over T
// reaches K_low can be added without hurting feasibility, and adding it
// raises M. The bound at inner nodes counts receivers that can still be
// covered given the undecided transmitters.
class Search
{
  public:
    Search(const MilpModel &m, std::uint64_t max_nodes) : m_(m), max_nodes_(max_nodes)
    {
        const int nd = m.n_days();
        needed_ = m.spec.coverage_needed();
        fixed_.assign(static_cast<std::size_t>(nd * m.n_rx), 0);
        fixed_eq_.assign(fixed_.size(), 0);
        cmin_fixed_.assign(static_cast<std::size_t>(m.n_rx), m.U);
        // suffix_[i] holds, per (dl, r), the number of tx >= i with Cbar = 1.
        suffix_.assign(static_cast<std::size_t>(m.n_tx + 1), std::vector<int>(fixed_.size(), 0));
        suffix_eq_ = suffix_;
        for (int t = m.n_tx - 1; t >= 0; --t)
        {
            suffix_[static_cast<std::size_t>(t)] = suffix_[static_cast<std::size_t>(t + 1)];
            suffix_eq_[static_cast<std::size_t>(t)] = suffix_eq_[static_cast<std::size_t>(t + 1)];
            for (int dl = 0; dl < nd; ++dl)
                for (int r = 0; r < m.n_rx; ++r)
                {
                    suffix_[static_cast<std::size_t>(t)][dr(dl, r)] += m.cbar[m.cell(dl, t, r)];
                    suffix_eq_[static_cast<std::size_t>(t)][dr(dl, r)] += m.cbar_eq[m.cell(dl, t, r)];
                }
        }
    }

    /// Runs the search below a fixed prefix of T decisions.
    void run(const std::vector<bool> &prefix)
    {
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (prefix[i])
                push(static_cast<int>(i));
            else
                ++pos_, decided_.push_back(false);
        if (ones_ <= m_.spec.n_tx_required &&
            ones_ + (m_.n_tx - pos_) >= m_.spec.n_tx_required)
            dfs();
    }

    Incumbent best;
    std::uint64_t nodes = 0;
    bool aborted = false;

  private:
    std::size_t dr(int dl, int r) const { return static_cast<std::size_t>(dl * m_.n_rx + r); }

    void push(int t)
    {
        for (int dl = 0; dl < m_.n_days(); ++dl)
            for (int r = 0; r < m_.n_rx; ++r)
            {
                fixed_[dr(dl, r)] += m_.cbar[m_.cell(dl, t, r)];
                fixed_eq_[dr(dl, r)] += m_.cbar_eq[m_.cell(dl, t, r)];
            }
        saved_cmin_.push_back(cmin_fixed_);
        for (int r = 0; r < m_.n_rx; ++r)
            cmin_fixed_[static_cast<std::size_t>(r)] =
                std::min<std::uint64_t>(cmin_fixed_[static_cast<std::size_t>(r)], m_.c_min.at(t, r));
        ++ones_;
        ++pos_;
        decided_.push_back(true);
    }

    void pop_one(int t)
    {
        for (int dl = 0; dl < m_.n_days(); ++dl)
            for (int r = 0; r < m_.n_rx; ++r)
            {
                fixed_[dr(dl, r)] -= m_.cbar[m_.cell(dl, t, r)];
                fixed_eq_[dr(dl, r)] -= m_.cbar_eq[m_.cell(dl, t, r)];
            }
        cmin_fixed_ = std::move(saved_cmin_.back());
        saved_cmin_.pop_back();
        --ones_;
        --pos_;
        decided_.pop_back();
    }

    // Can receiver r still be eligible? With all tx decided this is exact.
    bool possible(int r) const
    {
        if (ones_ > 0 && cmin_fixed_[static_cast<std::size_t>(r)] < m_.spec.k_low)
            return false;
        const int slots = m_.spec.n_tx_required - ones_;
        const auto &suf = suffix_[static_cast<std::size_t>(pos_)];
        const auto &suf_eq = suffix_eq_[static_cast<std::size_t>(pos_)];
        for (int dl = 0; dl < m_.n_days(); ++dl)
        {
            const auto i = dr(dl, r);
            if (fixed_[i] + std::min(slots, suf[i]) < needed_ || fixed_eq_[i] + std::min(slots, suf_eq[i]) < needed_)
                return false;
        }
        return true;
    }

    void dfs()
    {
        if (aborted)
            return;
        if (++nodes > max_nodes_)
        {
            aborted = true;
            return;
        }
        std::size_t m_ub = 0;
        std::uint64_t k_ub = m_.U;
        for (int r = 0; r < m_.n_rx; ++r)
            if (possible(r))
            {
                ++m_ub;
                k_ub = std::min(k_ub, cmin_fixed_[static_cast<std::size_t>(r)]);
            }
        if (pos_ == m_.n_tx)
        {
            if (ones_ != m_.spec.n_tx_required)
                return;
            if (m_ub == 0 && m_.U < m_.spec.k_low)
                return; // k = U cannot reach K_low
            if (!best.beats(m_ub, k_ub))
                return;
            best.found = true;
            best.m = m_ub;
            best.k = k_ub;
            best.tx.clear();
            best.rx.clear();
            for (int t = 0; t < m_.n_tx; ++t)
                if (decided_[static_cast<std::size_t>(t)])
                    best.tx.push_back(t);
            for (int r = 0; r < m_.n_rx; ++r)
                if (possible(r))
                    best.rx.push_back(r);
            return;
        }
        if (!best.beats(m_ub, k_ub))
            return;
        const int t = pos_;
        if (ones_ < m_.spec.n_tx_required)
        {
            push(t);
            dfs();
            pop_one(t);
        }
        if (ones_ + (m_.n_tx - pos_ - 1) >= m_.spec.n_tx_required)
        {
            ++pos_;
            decided_.push_back(false);
            dfs();
            decided_.pop_back();
            --pos_;
        }
    }

    const MilpModel &m_;
    std::uint64_t max_nodes_;
    double needed_ = 0.0;
    std::vector<int> fixed_, fixed_eq_;
    std::vector<std::uint64_t> cmin_fixed_;
    std::vector<std::vector<std::uint64_t>> saved_cmin_;
    std::vector<std::vector<int>> suffix_, suffix_eq_;
    std::vector<bool> decided_;
    int ones_ = 0;
    int pos_ = 0;
};

} // namespace detail

/// Exact lexicographic (M, k) optimum. The parallel mode splits the tree on
/// the first few transmitters and merges subtree winners in depth-first
/// order, so it returns the same solution as the sequential search.
inline SolveResult solve_exact(const MilpModel &m, const SolveLimits &limits = {})
{
    SolveResult res;
    const std::size_t cells = static_cast<std::size_t>(m.n_tx) * static_cast<std::size_t>(m.n_rx);
    if (cells > limits.max_cells)
    {
        res.status = SolveStatus::LimitExceeded;
        res.message = "instance has " + std::to_string(cells) + " tx-rx cells, limit is " +
                      std::to_string(limits.max_cells) + "; export the model with emit_lp and use an external solver";
        return res;
    }

    detail::Incumbent best;
    bool aborted = false;
    if (!limits.parallel)
    {
        detail::Search s(m, limits.max_nodes);
        s.run({});
        best = s.best;
        res.nodes = s.nodes;
        aborted = s.aborted;
    }
    else
    {
        const int depth = std::min(m.n_tx, 4);
        const std::size_t n_sub = std::size_t{1} << depth;
        std::vector<detail::Incumbent> sub(n_sub);
        std::vector<std::uint64_t> sub_nodes(n_sub, 0);
        std::vector<char> sub_aborted(n_sub, 0);
        parallel_for(n_sub, [&](std::size_t i) {
            // Subtree i in depth-first order: bit (depth-1-j) clear means T_j = 1.
            std::vector<bool> prefix(static_cast<std::size_t>(depth));
            for (int j = 0; j < depth; ++j)
                prefix[static_cast<std::size_t>(j)] = ((i >> (depth - 1 - j)) & 1U) == 0;
            detail::Search s(m, limits.max_nodes);
            s.run(prefix);
            sub[i] = s.best;
            sub_nodes[i] = s.nodes;
            sub_aborted[i] = s.aborted;
        });
        for (std::size_t i = 0; i < n_sub; ++i)
        {
            res.nodes += sub_nodes[i];
            aborted = aborted || sub_aborted[i];
            if (sub[i].found && best.beats(sub[i].m, sub[i].k))
                best = sub[i];
        }
    }

    if (aborted)
    {
        res.status = SolveStatus::LimitExceeded;
        res.message = "node limit of " + std::to_string(limits.max_nodes) +
                      " reached; export the model with emit_lp and use an external solver";
        return res;
    }
    if (!best.found)
    {
        res.status = SolveStatus::Infeasible;
        res.message = "no transmitter set satisfies the constraints";
        return res;
    }
    res.status = SolveStatus::Optimal;
    res.solution.tx = best.tx;
    res.solution.rx = best.rx;
    res.solution.k = best.k;
    res.solution.objective = m.w_inf * static_cast<double>(best.m) + static_cast<double>(best.k);
    return res;
}

} // namespace rfcurate::milp

#endif
