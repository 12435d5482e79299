// Copyright 2026 The rankp Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "rankp/simulator.hpp"

using namespace rankp;

namespace {

void BM_HermitianEig(benchmark::State &state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    Rng rng = make_rng(1);
    const CMatrix u = random_haar_unitary(dim, rng);
    std::vector<double> spectrum(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        spectrum[k] = 1.0 + static_cast<double>(k);
    }
    const CMatrix a = u * CMatrix::diagonal(spectrum) * u.adjoint();
    for (auto _ : state) {
        benchmark::DoNotOptimize(hermitian_eig(a));
    }
}
BENCHMARK(BM_HermitianEig)->Arg(2)->Arg(4)->Arg(8);

void BM_MleSolve(benchmark::State &state) {
    Rng rng = make_rng(2);
    const auto truth = random_pure_haar(2, rng);
    LikelihoodData data;
    data.intensity = 1000.0;
    const auto rounds = state.range(0);
    for (std::int64_t r = 0; r < rounds; ++r) {
        const CMatrix u = random_haar_unitary(2, rng);
        for (std::size_t k = 0; k < 2; ++k) {
            const auto m = PovmElement::projector(u.column(k));
            std::poisson_distribution<std::int64_t> pd(data.intensity * born_probability(m, truth));
            data.records.emplace_back(m, 1.0, pd(rng));
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle_solve(data, {}));
    }
    state.SetItemsProcessed(state.iterations() * rounds * 2);
}
BENCHMARK(BM_MleSolve)->Arg(3)->Arg(30)->Arg(300);

void BM_RunTomography(benchmark::State &state) {
    const auto protocol = static_cast<Protocol>(state.range(0));
    Rng rng = make_rng(3);
    const auto truth = random_pure_haar(2, rng);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_tomography(protocol, truth, {}, {100.0, 1.25, 1e5}, ++seed));
    }
    state.SetLabel(std::string(to_string(protocol)));
}
BENCHMARK(BM_RunTomography)
    ->Arg(static_cast<int>(Protocol::Random))
    ->Arg(static_cast<int>(Protocol::Eigen))
    ->Arg(static_cast<int>(Protocol::RankPNC))
    ->Arg(static_cast<int>(Protocol::RankPM))
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
