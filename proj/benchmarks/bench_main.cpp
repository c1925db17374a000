#include <random>

#include <benchmark/benchmark.h>

#include "clothgrasp/contours.hpp"
#include "clothgrasp/descriptors.hpp"
#include "clothgrasp/pipeline.hpp"
#include "clothgrasp/synthetic.hpp"
#include "clothgrasp/wrinkle.hpp"

using namespace clothgrasp;

namespace {

const SyntheticScene& shirt() {
  static const SyntheticScene s = [] {
    SyntheticSceneSpec spec;
    spec.garment = GarmentClass::kShirt;
    spec.seed = 1;
    return generate_scene(spec);
  }();
  return s;
}

const NormalMap& shirt_normals() {
  static const NormalMap n = estimate_normals(depth_to_cloud(shirt().depth, {}), PipelineConfig{}.normal_radius);
  return n;
}

void BM_Normals(benchmark::State& state) {
  const PointCloud cloud = depth_to_cloud(shirt().depth, {});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_normals(cloud, PipelineConfig{}.normal_radius));
}
BENCHMARK(BM_Normals)->Unit(benchmark::kMillisecond);

void BM_Entropy(benchmark::State& state) {
  const NormalMap& normals = shirt_normals();
  for (auto _ : state) benchmark::DoNotOptimize(entropy_filter(normals, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Entropy)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_VesselnessAtScale(benchmark::State& state) {
  const double sigma = static_cast<double>(state.range(0));
  shirt();
  for (auto _ : state) benchmark::DoNotOptimize(vesselness_at_scale(shirt().depth, sigma, VesselnessParams{}));
}
BENCHMARK(BM_VesselnessAtScale)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MultiscaleVesselness(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(multiscale_vesselness(shirt().depth, VesselnessParams{}));
}
BENCHMARK(BM_MultiscaleVesselness)->Unit(benchmark::kMillisecond);

void BM_Snake(benchmark::State& state) {
  const Pixel seed{shirt().annotation.grasp_points[0].x, shirt().annotation.grasp_points[0].y};
  for (auto _ : state) benchmark::DoNotOptimize(evolve_snake(shirt().depth, seed, SnakeParams{}));
}
BENCHMARK(BM_Snake)->Unit(benchmark::kMillisecond);

void BM_Vfh(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.05);
  PointCloud cloud;
  NormalMap normals;
  for (int i = 0; i < state.range(0); ++i) {
    cloud.push_back(Eigen::Vector3d(g(rng), g(rng), 1.0 + 0.1 * g(rng)));
    normals.normals.push_back(Eigen::Vector3d(g(rng), g(rng), -1.0).normalized());
    normals.valid.push_back(1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(compute_vfh(cloud, normals, Eigen::Vector3d::Zero()));
}
BENCHMARK(BM_Vfh)->Arg(500)->Arg(5000)->Unit(benchmark::kMicrosecond);

void BM_KnnClassify(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_descriptor = [&] {
    VFHDescriptor d;
    for (double& b : d.bins) b = u(rng);
    return d;
  };
  KnnModel model;
  for (int i = 0; i < state.range(0); ++i) model.entries.push_back({random_descriptor(), kKeyPartLabels[i % 3]});
  const VFHDescriptor q = random_descriptor();
  for (auto _ : state) benchmark::DoNotOptimize(knn_classify(model, q, 10));
}
BENCHMARK(BM_KnnClassify)->Arg(60)->Arg(6000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
