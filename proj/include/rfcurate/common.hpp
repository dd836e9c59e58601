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

#ifndef RFCURATE_COMMON_HPP
#define RFCURATE_COMMON_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rfcurate
{

using cf64 = std::complex<double>;
using cf32 = std::complex<float>;
using Samples = std::vector<cf64>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kWifiRateHz = 20e6;    // nominal 802.11a/g sample rate
inline constexpr double kCaptureRateHz = 25e6; // receiver capture rate
inline constexpr std::size_t kIdSignalLength = 256;

/// Base class for all library errors.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when an argument violates an operation precondition.
class InvalidArgument : public Error
{
  public:
    using Error::Error;
};

// splitmix64 finalizer; used to derive independent child seeds.
inline constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

template <class... Ts>
constexpr std::uint64_t derive_seed(std::uint64_t base, Ts... parts)
{
    std::uint64_t s = mix_seed(base);
    ((s = mix_seed(s ^ (static_cast<std::uint64_t>(parts) + 0x632BE59BD9B4E019ULL))), ...);
    return s;
}

/// Worker count, capped by the RFCURATE_THREADS environment variable.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("RFCURATE_THREADS"))
    {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// visited exactly once; callers write results into pre-sized slots so the
/// outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn)
{
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            pool.emplace_back([&, w] {
                try
                {
                    for (std::size_t i = w; i < n; i += workers)
                        fn(i);
                }
                catch (...)
                {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

inline double mean_power(const Samples &x)
{
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto &v : x)
        acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

} // namespace rfcurate

#endif
