// Benchmark comparing the serial reference loops against the OpenMP kernels:
// overlay pair intersection, per-unit correlation, and forest training.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ipcfuse/forest.hpp"
#include "ipcfuse/fuse.hpp"
#include "ipcfuse/predict.hpp"
#include "ipcfuse/stats.hpp"
#include "ipcfuse/synth.hpp"

using namespace ipcfuse;

namespace {

template <typename Fn>
double time_of(Fn&& fn, int repeats = 3) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs < best) best = secs;
  }
  return best;
}

void row(const char* kernel, double serial, double parallel) {
  std::printf("%-22s %10.3fs %10.3fs %8.2fx\n", kernel, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  synth::SynthConfig sc;
  sc.seed = 5;
  sc.n_countries = 4;
  sc.regions_per_country = 4;
  sc.districts_per_region = 5;
  sc.n_years = 8;
  sc.base_conflict_rate = 0.8;
  sc.coupling_beta = 1.0;
  if (argc > 1) sc.n_countries = std::stoi(argv[1]);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("world: %d countries, %d districts/region, %d years\n", sc.n_countries,
              sc.districts_per_region, sc.n_years);
  std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  synth::World world = synth::generate(sc);
  const auto admin = synth::admin_layer(world);
  const Period period = world.periods[world.periods.size() / 2];
  const auto fs = synth::fs_layer(world, period);

  const double overlay_s =
      time_of([&] { fuse::overlay(fs, admin, period, {}, Exec::Serial); });
  const double overlay_p =
      time_of([&] { fuse::overlay(fs, admin, period, {}, Exec::Parallel); });
  row("overlay", overlay_s, overlay_p);

  std::vector<fuse::FSRecord> all;
  for (const Period& p : world.periods) {
    auto recs = fuse::dedup_worst(fuse::overlay(synth::fs_layer(world, p), admin, p));
    all.insert(all.end(), recs.begin(), recs.end());
  }
  const auto fused = fuse::lag_join(all, fuse::aggregate_conflicts(world.events));

  stats::CorrelateOptions opts;
  opts.include_all = true;
  const double corr_s =
      time_of([&] { stats::correlate(fused, stats::Level::District, opts, Exec::Serial); });
  const double corr_p =
      time_of([&] { stats::correlate(fused, stats::Level::District, opts, Exec::Parallel); });
  row("correlate (district)", corr_s, corr_p);

  const auto dataset = predict::build_dataset(fused, true);
  const auto weights = predict::class_weights(dataset.labels);
  predict::ForestConfig fc;
  fc.n_trees = 100;
  const double forest_s =
      time_of([&] { predict::train_forest(dataset, weights, fc, Exec::Serial); }, 2);
  const double forest_p =
      time_of([&] { predict::train_forest(dataset, weights, fc, Exec::Parallel); }, 2);
  row("forest (100 trees)", forest_s, forest_p);

  // the kernels must agree between policies
  const auto a = stats::correlate(fused, stats::Level::District, opts, Exec::Serial);
  const auto b = stats::correlate(fused, stats::Level::District, opts, Exec::Parallel);
  if (a.size() != b.size()) {
    std::fprintf(stderr, "serial/parallel mismatch\n");
    return 1;
  }
  return 0;
}
