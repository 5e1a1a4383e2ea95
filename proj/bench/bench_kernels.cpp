// Parallel kernels against their serial references on synthetic feeds.
#include "feedql/kernels.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

using namespace feedql;

namespace {

std::vector<Entry> synthetic(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> secs(1'600'000'000, 1'600'000'000 + 30 * 86400);
    std::uniform_real_distribution<double> lat(47.0, 48.0), lon(8.0, 9.0);
    const char* terms[] = {"java", "jsp", "xml", "geo", "rest"};
    std::vector<Entry> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& e = out[i];
        e.id = "urn:bench:" + std::to_string(i);
        e.title = "entry " + std::to_string(i);
        e.updated = Timestamp::from_unix_seconds(secs(rng));
        e.categories.push_back({terms[rng() % 5], {}, {}});
        if (rng() % 4 != 0)
            e.geo = GeoShape::point(lat(rng), lon(rng));
    }
    return out;
}

double time_ms(const std::function<kernels::Mask()>& run, int reps, kernels::Mask& result)
{
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        result = run();
    std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() / reps;
}

void report(const char* name, const std::function<kernels::Mask()>& parallel,
    const std::function<kernels::Mask()>& serial, int reps)
{
    kernels::Mask a, b;
    double tp = time_ms(parallel, reps, a);
    double ts = time_ms(serial, reps, b);
    std::printf("%-8s parallel %10.3f ms  reference %10.3f ms  speedup %6.2fx  %s\n", name, tp, ts, ts / tp,
        a == b ? "equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv)
{
    std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
    int reps = argc > 2 ? std::atoi(argv[2]) : 3;
    auto entries = synthetic(n, 42);
    std::printf("entries %zu, threads %d, reps %d\n", n, omp_get_max_threads(), reps);

    auto filter = parse_filter("category==java,category==geo;geo:position=within=radius(47.5,8.5,30)");
    EvalContext ctx;
    report("filter", [&] { return kernels::filter_mask(filter, entries, {}, ctx); },
        [&] { return kernels::reference::filter_mask(filter, entries, {}, ctx); }, reps);

    std::size_t window_n = std::min<std::size_t>(n, 20000);
    std::span<const Entry> window_in(entries.data(), window_n);
    report("window", [&] { return kernels::window_mask(window_in, 3600, 4); },
        [&] { return kernels::reference::window_mask(window_in, 3600, 4); }, reps);

    std::size_t cluster_n = std::min<std::size_t>(n, 8000);
    std::span<const Entry> cluster_in(entries.data(), cluster_n);
    report("cluster", [&] { return kernels::cluster_mask(cluster_in, 2.0, 5); },
        [&] { return kernels::reference::cluster_mask(cluster_in, 2.0, 5); }, reps);
}
