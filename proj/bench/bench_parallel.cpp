// OpenMP kernels against their serial reference twins.

#include <benchmark/benchmark.h>

#include <random>

#include "shiftgrad/bpscan.hpp"
#include "shiftgrad/deriv.hpp"

namespace {

using namespace shiftgrad;

const SpecFamily& family() {
    static const SpecFamily f = hea_family(AnsatzFlavor::ry, ObservableKind::global, 1);
    return f;
}

void BM_SampleParallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Quantity q = parse_quantity("hess:0,1");
    for (auto _ : state) benchmark::DoNotOptimize(sample_quantity(family(), n, n, q, 64, 7));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_SampleSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Quantity q = parse_quantity("hess:0,1");
    for (auto _ : state) benchmark::DoNotOptimize(reference::sample_quantity_serial(family(), n, n, q, 64, 7));
    state.SetItemsProcessed(state.iterations() * 64);
}

std::vector<double> draw(std::size_t p) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
    std::vector<double> t(p);
    for (auto& x : t) x = u(rng);
    return t;
}

void BM_HessianParallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Objective cost(family()(n, 2));
    const auto theta = draw(cost.parameter_count());
    for (auto _ : state) benchmark::DoNotOptimize(hessian(cost, theta));
}

void BM_HessianSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Objective cost(family()(n, 2));
    const auto theta = draw(cost.parameter_count());
    for (auto _ : state) benchmark::DoNotOptimize(reference::hessian_serial(cost, theta));
}

}  // namespace

BENCHMARK(BM_SampleParallel)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSerial)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HessianParallel)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HessianSerial)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
