#include <benchmark/benchmark.h>

#include <random>

#include "meia/eqa.hpp"
#include "meia/mem.hpp"
#include "meia/motion.hpp"
#include "meia/robot.hpp"

using namespace meia;

namespace {

const WorldScene& scene() {
    static const WorldScene s = randomize_scene(0, {});
    return s;
}

RobotState somewhere() {
    const auto& b = scene().bounds;
    return RobotState::at((b.xmin + b.xmax) / 2, (b.ymin + b.ymax) / 2, 0.3);
}

void BM_Render(benchmark::State& state) {
    const RobotState robot = somewhere();
    for (auto _ : state) benchmark::DoNotOptimize(render(scene(), robot));
}
BENCHMARK(BM_Render);

void BM_TwoMeans(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> i(0, 127), j(0, 95);
    std::vector<Pixel> px(static_cast<std::size_t>(state.range(0)));
    for (auto& p : px) p = {i(rng), j(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(locate_pixel_center(px));
}
BENCHMARK(BM_TwoMeans)->Arg(64)->Arg(512)->Arg(4096);

void BM_RemoveOutliers(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0, 0.2);
    ColoredPointCloud c;
    for (int k = 0; k < state.range(0); ++k) c.points.push_back({{g(rng), g(rng), g(rng)}, {}});
    for (auto _ : state) benchmark::DoNotOptimize(remove_outliers(c, {20, 2.0}));
}
BENCHMARK(BM_RemoveOutliers)->Arg(200)->Arg(1000);

void BM_IntegrateFrame(benchmark::State& state) {
    const auto frames = observe_four_directions(scene(), somewhere());
    std::int64_t step = 0;
    for (auto _ : state) {
        EnvironmentMemory mem(scene().bounds);
        for (const auto& f : frames) mem.integrate_frame(f, ++step);
        benchmark::DoNotOptimize(mem);
    }
}
BENCHMARK(BM_IntegrateFrame);

}  // namespace

BENCHMARK_MAIN();
