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

#include <sys/wait.h>

#include <fstream>

#ifndef RFCURATE_CLI
#define RFCURATE_CLI "rfcurate"
#endif

using namespace rfcurate;
namespace fs = std::filesystem;

namespace
{

struct Run
{
    int rc = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Run run(const std::string &args, const fs::path &scratch)
{
    const fs::path o = scratch / "stdout.txt", e = scratch / "stderr.txt";
    const std::string cmd = std::string("'") + RFCURATE_CLI + "' " + args + " >'" + o.string() + "' 2>'" + e.string() + "'";
    const int st = std::system(cmd.c_str());
    Run r;
    r.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

std::string q(const fs::path &p) { return "'" + p.string() + "'"; }

/// Every regular file under `dir`, relative path to contents.
std::map<std::string, std::string> tree(const fs::path &dir)
{
    std::map<std::string, std::string> m;
    for (const auto &e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            m[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
    return m;
}

fs::path write_counts_store(const fs::path &dir, const store::CountTensor &c, const store::CountTensor &ce)
{
    const fs::path p = dir / "counts.wsig";
    store::write_store(p, testutil::store_from_counts(c, ce, 1));
    return p;
}

const std::string kSmall = "--days 1 --ntx 3 --nrx 2 --pkts 20 --seed 5";

} // namespace

TEST_CASE("cli - help lists defaults and version")
{
    testutil::TempDir tmp("cli_help");
    const auto r = run("subset --help", tmp.path);
    CHECK(r.rc == 0);
    CHECK(r.out.find("--k UINT:POSITIVE [1]") != std::string::npos);
    CHECK(r.out.find("[greedy]") != std::string::npos);
    CHECK(r.out.find("--config") != std::string::npos);
    const auto g = run("generate --help", tmp.path);
    CHECK(g.out.find("--pkts INT:POSITIVE [50]") != std::string::npos);
    CHECK(g.out.find("--snr FLOAT [20]") != std::string::npos);
    CHECK(run("--version", tmp.path).out.find("rfcurate") != std::string::npos);
}

TEST_CASE("cli - pipeline output is byte-identical across runs")
{
    testutil::TempDir tmp("cli_det");
    const auto a = run("pipeline " + kSmall + " --out " + q(tmp.path / "a"), tmp.path);
    REQUIRE(a.rc == 0);
    const auto b = run("pipeline " + kSmall + " --out " + q(tmp.path / "b"), tmp.path);
    REQUIRE(b.rc == 0);
    const auto ta = tree(tmp.path / "a"), tb = tree(tmp.path / "b");
    CHECK(ta.count("signals.wsig"));
    CHECK(ta.count("analysis.txt"));
    CHECK(ta.count("captures/scenario.txt"));
    CHECK(ta.size() == tb.size());
    CHECK(ta == tb);
    const auto st = store::read_store(tmp.path / "a" / "signals.wsig");
    CHECK(st.size() > 100);
    CHECK(st.counts(true).max() > 0);
}

TEST_CASE("cli - staged commands match the one-shot pipeline")
{
    testutil::TempDir tmp("cli_stages");
    REQUIRE(run("pipeline " + kSmall + " --out " + q(tmp.path / "p"), tmp.path).rc == 0);
    REQUIRE(run("generate " + kSmall + " --out " + q(tmp.path / "caps"), tmp.path).rc == 0);
    const auto d = run("detect --captures " + q(tmp.path / "caps") + " --out " + q(tmp.path / "s" / "raw.wsig"),
                       tmp.path);
    REQUIRE(d.rc == 0);
    CHECK(d.out.find("detect: 6 captures") != std::string::npos);
    const auto e = run("equalize --in " + q(tmp.path / "s" / "raw.wsig") + " --out " + q(tmp.path / "e" / "eq.wsig"),
                       tmp.path);
    REQUIRE(e.rc == 0);
    CHECK(e.out.find("equalized") != std::string::npos);
    const auto one = store::read_store(tmp.path / "p" / "signals.wsig");
    const auto staged = store::read_store(tmp.path / "e" / "eq.wsig");
    CHECK(one.signals() == staged.signals());
    CHECK(staged.attributes.at("capture_dir") == "../caps");
    const auto an = run("analyze --store " + q(tmp.path / "e" / "eq.wsig") + " --hist-bin 5 --grid-day 0", tmp.path);
    CHECK(an.rc == 0);
    CHECK(an.out.find("# histogram C_eq bin_width=5") != std::string::npos);
    CHECK(an.out.find("# grid day=0 C\n") != std::string::npos);
}

TEST_CASE("cli - usage errors exit 2")
{
    testutil::TempDir tmp("cli_usage");
    CHECK(run("", tmp.path).rc == 2);
    CHECK(run("frobnicate", tmp.path).rc == 2);
    CHECK(run("generate --out " + q(tmp.path / "x") + " --bogus 1", tmp.path).rc == 2);
    CHECK(run("generate", tmp.path).rc == 2); // --out required
    CHECK(run("subset --store s --out o --mode fancy", tmp.path).rc == 2);
    CHECK(run("subset --store s --out o --p 1.5", tmp.path).rc == 2);
    std::ofstream(tmp.path / "bad.cfg") << "colour=blue\n";
    const auto r = run("generate --out " + q(tmp.path / "x") + " --config " + q(tmp.path / "bad.cfg"), tmp.path);
    CHECK(r.rc == 2);
    CHECK(r.err.find("unknown key 'colour'") != std::string::npos);
    std::ofstream(tmp.path / "bad2.cfg") << "just words\n";
    CHECK(run("generate --out " + q(tmp.path / "x") + " --config " + q(tmp.path / "bad2.cfg"), tmp.path).rc == 2);
    CHECK_FALSE(fs::exists(tmp.path / "x"));
}

TEST_CASE("cli - missing inputs exit 3 without output")
{
    testutil::TempDir tmp("cli_missing");
    const auto o = tmp.path / "out" / "o.wsig";
    CHECK(run("detect --captures " + q(tmp.path / "none") + " --out " + q(o), tmp.path).rc == 3);
    CHECK(run("equalize --in " + q(tmp.path / "none.wsig") + " --out " + q(o), tmp.path).rc == 3);
    CHECK(run("analyze --store " + q(tmp.path / "none.wsig"), tmp.path).rc == 3);
    CHECK(run("subset --store " + q(tmp.path / "none.wsig") + " --out " + q(o), tmp.path).rc == 3);
    CHECK(run("eval --store " + q(tmp.path / "none.wsig"), tmp.path).rc == 3);
    CHECK(run("locate --store " + q(tmp.path / "none.wsig"), tmp.path).rc == 3);
    CHECK(run("generate --out " + q(tmp.path / "x") + " --config " + q(tmp.path / "none.cfg"), tmp.path).rc == 3);
    // A store without its bursts sidecar cannot be equalized.
    store::CountTensor c({1, 1, 1});
    c.at(0, 0, 0) = 1;
    const auto s = write_counts_store(tmp.path, c, store::CountTensor({1, 1, 1}));
    const auto r = run("equalize --in " + q(s) + " --out " + q(o), tmp.path);
    CHECK(r.rc == 3);
    CHECK(r.err.find("bursts") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "out"));
    CHECK_FALSE(fs::exists(tmp.path / "x"));
}

TEST_CASE("cli - stage failures exit 4 without output")
{
    testutil::TempDir tmp("cli_fail");
    store::CountTensor c({1, 2, 2}), ce({1, 2, 2});
    for (int t = 0; t < 2; ++t)
        for (int r = 0; r < 2; ++r)
            c.at(0, t, r) = ce.at(0, t, r) = 3;
    const auto s = write_counts_store(tmp.path, c, ce);
    const auto o = tmp.path / "out" / "o.wsig";
    auto r = run("subset --store " + q(s) + " --ntx 3 --out " + q(o), tmp.path);
    CHECK(r.rc == 4);
    CHECK(r.err.find("stage 'subset' failed") != std::string::npos);
    r = run("subset --store " + q(s) + " --ntx 2 --k 4 --out " + q(o), tmp.path);
    CHECK(r.rc == 4);
    CHECK(r.err.find("no receiver") != std::string::npos);
    r = run("subset --store " + q(s) + " --recipe manysig --out " + q(o), tmp.path);
    CHECK(r.rc == 4);
    CHECK(r.err.find("needs 4 days") != std::string::npos);
    CHECK(run("eval --store " + q(s) + " --protocol day", tmp.path).rc == 4);
    CHECK(run("locate --store " + q(s), tmp.path).rc == 4); // no positions
    CHECK_FALSE(fs::exists(tmp.path / "out"));

    // A corrupted store is a stage failure, not a missing input.
    {
        std::fstream f(s, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    r = run("analyze --store " + q(s), tmp.path);
    CHECK(r.rc == 4);
}

TEST_CASE("cli - config file below flags, above defaults")
{
    testutil::TempDir tmp("cli_cfg");
    std::ofstream(tmp.path / "g.cfg") << "# scenario\ndays = 1\n--ntx=2\nnrx=1\npkts=\"12\"\nseed=9\n";
    REQUIRE(run("generate --config " + q(tmp.path / "g.cfg") + " --ntx 3 --out " + q(tmp.path / "c"), tmp.path).rc ==
            0);
    const auto sc = slurp(tmp.path / "c" / "scenario.txt");
    CHECK(sc.find("days=1\n") != std::string::npos);
    CHECK(sc.find("tx=3\n") != std::string::npos);
    CHECK(sc.find("rx=1\n") != std::string::npos);
    CHECK(sc.find("packets=12\n") != std::string::npos);
    CHECK(sc.find("snr_db=20\n") != std::string::npos); // default
    CHECK(sc.find("seed=9\n") != std::string::npos);

    // Boolean keys map to flags.
    store::CountTensor c({1, 3, 2}), ce({1, 3, 2});
    for (int t = 0; t < 3; ++t)
        for (int r = 0; r < 2; ++r)
            c.at(0, t, r) = ce.at(0, t, r) = static_cast<std::uint32_t>(2 + t);
    const auto s = write_counts_store(tmp.path, c, ce);
    std::ofstream(tmp.path / "s.cfg") << "ntx=2\nk=3\nmode=exact\nparallel=true\n";
    const auto r = run("subset --config " + q(tmp.path / "s.cfg") + " --store " + q(s) + " --out " +
                           q(tmp.path / "sub.wsig"),
                       tmp.path);
    REQUIRE(r.rc == 0);
    CHECK(r.out.find("exact search visited") != std::string::npos);
    CHECK(r.out.find("subset: tx 1 2\n") != std::string::npos);
}

TEST_CASE("cli - subset modes agree and write verified stores")
{
    testutil::TempDir tmp("cli_subset");
    store::CountTensor c({2, 3, 3}), ce({2, 3, 3});
    const std::uint32_t v[2][3][3] = {{{9, 9, 1}, {1, 9, 9}, {9, 9, 1}}, {{9, 9, 9}, {9, 9, 9}, {9, 9, 9}}};
    for (int d = 0; d < 2; ++d)
        for (int t = 0; t < 3; ++t)
            for (int r = 0; r < 3; ++r)
                c.at(d, t, r) = ce.at(d, t, r) = v[d][t][r];
    const auto s = write_counts_store(tmp.path, c, ce);
    const std::string base = "subset --store " + q(s) + " --ntx 2 --k 5 --p 0.9 ";
    const auto g = run(base + "--out " + q(tmp.path / "g.wsig"), tmp.path);
    REQUIRE(g.rc == 0);
    CHECK(g.out.find("N=2 M=1 K=5") != std::string::npos);
    const auto e = run(base + "--mode exact --out " + q(tmp.path / "e.wsig"), tmp.path);
    REQUIRE(e.rc == 0);
    CHECK(e.out.find("N=2 M=2 K=5 p=0.9 days=2") != std::string::npos);
    CHECK(e.out.find("subset: tx 0 2\n") != std::string::npos);
    const auto sub = store::read_store(tmp.path / "e.wsig");
    CHECK(sub.dims() == store::StoreDims{2, 2, 2});
    CHECK(sub.size() == 2u * 2u * 2u * 5u * 2u);

    const auto d0 = run(base + "--days 0 --mode exact --max-sig 3 --out " + q(tmp.path / "d.wsig"), tmp.path);
    REQUIRE(d0.rc == 0);
    CHECK(d0.out.find("days=1") != std::string::npos);
    CHECK(store::read_store(tmp.path / "d.wsig").size() == 1u * 2u * 2u * 3u * 2u);

    const auto lp = run(base + "--mode lp --out " + q(tmp.path / "m.lp"), tmp.path);
    REQUIRE(lp.rc == 0);
    const auto text = slurp(tmp.path / "m.lp");
    CHECK(text.rfind("\\", 0) == 0);
    CHECK(text.find("Maximize") != std::string::npos);
    CHECK(text.find("\nEnd\n") != std::string::npos);
    CHECK(run(base + "--mode lp --out -", tmp.path).out == text);
}

TEST_CASE("cli - eval and locate")
{
    testutil::TempDir tmp("cli_eval");
    REQUIRE(run("pipeline --days 2 --ntx 3 --nrx 3 --pkts 25 --seed 2 --out " + q(tmp.path / "p"), tmp.path).rc ==
            0);
    const auto s = tmp.path / "p" / "signals.wsig";
    const auto e = run("eval --store " + q(s) + " --protocol ntx --realizations 2", tmp.path);
    REQUIRE(e.rc == 0);
    CHECK(e.out.rfind("# protocol=ntx\n", 0) == 0);
    CHECK(e.out == run("eval --store " + q(s) + " --protocol ntx --realizations 2", tmp.path).out);
    const auto d = run("eval --store " + q(s) + " --protocol day --realizations 1 --out " + q(tmp.path / "t.txt"),
                       tmp.path);
    REQUIRE(d.rc == 0);
    CHECK(slurp(tmp.path / "t.txt").rfind("# protocol=day_gen\n", 0) == 0);
    CHECK(run("eval --store " + q(s) + " --protocol rx --held-out 1 --realizations 1", tmp.path).rc == 0);

    eval::PathlossStoreConfig pc;
    pc.seed = 1;
    store::write_store(tmp.path / "pl.wsig", eval::make_pathloss_store(pc));
    const auto l = run("locate --store " + q(tmp.path / "pl.wsig"), tmp.path);
    REQUIRE(l.rc == 0);
    CHECK(l.out.find("# mean_l1_m=") != std::string::npos);
}
