// Parallel kernels against their serial references. Run with OMP_NUM_THREADS set
// to compare thread counts; on a single core the two should be within noise.

#include "orient/backbone.hpp"
#include "orient/decoder.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

using namespace orient;

namespace {

VoteSet random_votes(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(0.3, 1.0);
    const auto s = build_scheme(n, m);
    SoftmaxVotes sv{m, n, std::vector<double>(s.size())};
    for (std::size_t t = 0; t < m; ++t) {
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) total += sv.probs[t * n + k] = gamma(rng) + 1e-12;
        for (std::size_t k = 0; k < n; ++k) sv.probs[t * n + k] /= total;
    }
    return votes_from_softmax(sv, s);
}

struct Fixture {
    Dataset data;
    ModelState model;
    HeadSetup setup{Head::discrete_meanshift, build_scheme(8, 9), kDefaultHuberDelta};
    std::vector<std::size_t> batch;

    Fixture() : model(init_model(NetworkSpec{{1024, 64, 72}, Activation::relu, 0.01}, 1)) {
        SynthSpec spec;
        spec.count = 256;
        data = generate_synthetic(spec);
        // an untrained model gives near-uniform votes, where mean-shift barely moves
        TrainConfig tc;
        tc.iterations = 300;
        model = train(std::move(model), data, setup, tc).model;
        batch.resize(32);
        std::iota(batch.begin(), batch.end(), 0);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_meanshift_modes(benchmark::State& state) {
    const auto votes = random_votes(static_cast<std::size_t>(state.range(0)), 9, 3);
    for (auto _ : state) benchmark::DoNotOptimize(meanshift_modes(votes, {}));
}

void BM_meanshift_modes_serial(benchmark::State& state) {
    const auto votes = random_votes(static_cast<std::size_t>(state.range(0)), 9, 3);
    for (auto _ : state) benchmark::DoNotOptimize(reference::meanshift_modes_serial(votes, {}));
}

void BM_batch_gradient(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(batch_gradient(f.model, f.data, f.batch, f.setup));
}

void BM_batch_gradient_serial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(reference::batch_gradient_serial(f.model, f.data, f.batch, f.setup));
}

void BM_predict(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(predict(f.model, f.data, f.setup, {}));
}

void BM_predict_serial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(reference::predict_serial(f.model, f.data, f.setup, {}));
}

}  // namespace

BENCHMARK(BM_meanshift_modes)->Arg(8)->Arg(72);
BENCHMARK(BM_meanshift_modes_serial)->Arg(8)->Arg(72);
BENCHMARK(BM_batch_gradient)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_batch_gradient_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_predict)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
