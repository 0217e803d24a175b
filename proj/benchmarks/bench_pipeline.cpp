#include <benchmark/benchmark.h>

#include <vkpose/alignment.hpp>
#include <vkpose/losses.hpp>
#include <vkpose/pnp.hpp>
#include <vkpose/sim.hpp>
#include <vkpose/twoview.hpp>

using namespace vkpose;

namespace {

SceneConfig noisy_config(double sigma) {
  SceneConfig cfg;
  cfg.pixel_noise_sigma = sigma;
  return cfg;
}

void BM_Triangulate(benchmark::State& state) {
  ScenePair s = sample_scene(noisy_config(1.0), 1);
  auto [p1, p2] = projection_pair(s.k1, s.k2, s.c1_T_c2);
  for (auto _ : state) {
    for (std::size_t i = 0; i < s.noisy_kps1.size(); ++i) {
      benchmark::DoNotOptimize(
          triangulate(s.noisy_kps1[i], s.noisy_kps2[i], p1, p2));
    }
  }
}
BENCHMARK(BM_Triangulate);

void BM_Kabsch(benchmark::State& state) {
  Rng rng(3);
  KeypointSet3D src =
      generate_virtual_keypoints(8, KeypointDistribution::regular(), 0);
  RigidTransform planted{random_rotation(rng), rng.in_ball(1.0)};
  KeypointSet3D dst;
  for (const auto& p : src) dst.push_back(planted * p + 0.01 * rng.unit_vector());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kabsch(src, dst));
  }
}
BENCHMARK(BM_Kabsch);

void BM_SolvePnp(benchmark::State& state) {
  ScenePair s = sample_scene(noisy_config(1.0), 5);
  Correspondences c{s.virtual_points, s.noisy_kps2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pnp(c, s.k2, 7));
  }
}
BENCHMARK(BM_SolvePnp);

void BM_TotalLoss(benchmark::State& state) {
  ScenePair s = sample_scene(noisy_config(2.0), 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_loss(s.noisy_kps1, s.noisy_kps2,
                                        s.virtual_points, s.k1, s.k2,
                                        s.c1_T_c2, LossWeights{}));
  }
}
BENCHMARK(BM_TotalLoss);

void BM_RefineKeypoints(benchmark::State& state) {
  ScenePair s = sample_scene(noisy_config(3.0), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(refine_keypoints(s.noisy_kps1, s.noisy_kps2,
                                              s.virtual_points, s.k1, s.k2,
                                              s.c1_T_c2, LossWeights{},
                                              RefineConfig{}));
  }
}
BENCHMARK(BM_RefineKeypoints);

void BM_InferenceTrial(benchmark::State& state) {
  TrialScenes scenes = sample_trial_scenes(noisy_config(1.0), 13, 1);
  AveragingParams params;
  MetricThresholds th;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_inference_trial(scenes.query, scenes.references, params, th));
  }
}
BENCHMARK(BM_InferenceTrial);

}  // namespace

BENCHMARK_MAIN();
