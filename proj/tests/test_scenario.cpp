#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fusetrack/io.hpp"
#include "fusetrack/scenario.hpp"
#include "rng_replay.hpp"

using namespace fusetrack;

namespace {

// Straight-line track sampled at a uniform master rate; enough structure for
// the source simulator without invoking the full generator.
GroundTruthTrack line_track(double duration_s, double rate_hz, Vec2 p0, Vec2 v) {
  GroundTruthTrack tr;
  tr.track_id = 1;
  const auto n = static_cast<int>(std::llround(duration_s * rate_hz));
  for (int i = 0; i <= n; ++i) {
    const double t = i / rate_hz;
    tr.samples.push_back({t, p0 + v * t, true});
  }
  return tr;
}

ScenarioSpec small_spec(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.duration_s = 1.0;
  spec.n_tracks = 4;
  return spec;
}

}  // namespace

TEST_CASE("zero-duration and zero-rate specs are rejected") {
  ScenarioSpec spec;
  spec.duration_s = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = ScenarioSpec{};
  spec.master_rate_hz = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  SourceModel m = default_event_model();
  m.rate_hz = 0.0;
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("no occluders means every sample is visible") {
  ScenarioSpec spec = small_spec(5);
  spec.occluder.coverage_min = 0.0;
  spec.occluder.coverage_max = 0.0;
  const auto gen = generate_tracks(spec);
  CHECK(gen.occluders.rects.empty());
  for (const auto& tr : gen.tracks)
    for (const auto& s : tr.samples) CHECK(s.visible);
}

TEST_CASE("a plane-sized static rectangle occludes everything") {
  OccluderSet set;
  set.rects.push_back(Occluder{Vec2(0, 0), Vec2(0, 0), 1e9, 1e9});
  CHECK(set.occluded(Vec2(0, 0), 0.0));
  CHECK(set.occluded(Vec2(-4e8, 3e8), 12.0));

  const auto track = line_track(0.5, 100.0, Vec2(10, 10), Vec2(30, 0));
  SourceModel model = default_event_model();
  model.noise_std = 0.0;
  model.drift_std = 0.0;
  model.vis_flip_prob = 0.0;
  const auto stream = simulate_source(track, set, model, 99);
  for (const auto& m : stream.measurements) CHECK(m.report.p_vis == 0.0);
  // Stuck behavior with no visible sample ever: the chain never leaves the
  // starting point, so every relative displacement is zero.
  for (const auto& m : stream.measurements) CHECK(m.z_raw.norm() == 0.0);
}

TEST_CASE("visibility flags match an independent containment scan") {
  const auto spec = small_spec(1);
  const auto gen = generate_tracks(spec);
  REQUIRE(!gen.occluders.rects.empty());
  std::uint64_t occluded = 0, total = 0;
  for (const auto& tr : gen.tracks) {
    for (const auto& s : tr.samples) {
      bool inside = false;
      for (const auto& r : gen.occluders.rects) {
        const double cx = r.c0.x() + r.vel.x() * s.t;
        const double cy = r.c0.y() + r.vel.y() * s.t;
        if (std::abs(s.pos.x() - cx) <= 0.5 * r.w && std::abs(s.pos.y() - cy) <= 0.5 * r.h) {
          inside = true;
          break;
        }
      }
      CHECK(s.visible == !inside);
      ++total;
      if (inside) ++occluded;
    }
  }
  const double frac = static_cast<double>(occluded) / static_cast<double>(total);
  CHECK(frac >= spec.occluder.coverage_min);
  CHECK(frac <= spec.occluder.coverage_max);
}

TEST_CASE("noise-free fully visible measurements reproduce ground truth") {
  const auto track = line_track(1.0, 1000.0, Vec2(100, 50), Vec2(12, -7));
  OccluderSet none;
  SourceModel model = default_event_model();
  model.noise_std = 0.0;
  model.drift_std = 0.0;
  model.vis_flip_prob = 0.0;
  const auto stream = simulate_source(track, none, model, 4);

  Vec2 chain = track.samples.front().pos;
  for (std::size_t j = 0; j < stream.measurements.size(); ++j) {
    const auto& m = stream.measurements[j];
    CHECK(m.kind == MeasKind::relative);
    chain += m.z_raw;
    const Vec2 gt = gt_position_at(track, m.t);
    CHECK((chain - gt).norm() <= 1e-9);
    CHECK((stream.absolutes[j] - gt).norm() == 0.0);
  }

  SourceModel frame = default_frame_model();
  frame.noise_std = 0.0;
  frame.vis_flip_prob = 0.0;
  const auto fstream = simulate_source(track, none, frame, 4);
  for (const auto& m : fstream.measurements) {
    CHECK(m.kind == MeasKind::absolute);
    CHECK((m.z_raw - gt_position_at(track, m.t)).norm() == 0.0);
  }
}

TEST_CASE("relative chain telescopes back to the absolute chain") {
  const auto spec = small_spec(21);
  const auto gen = generate_tracks(spec);
  const auto stream =
      simulate_source(gen.tracks[0], gen.occluders, spec.event_source, 777);
  Vec2 chain = gen.tracks[0].samples.front().pos;
  for (std::size_t j = 0; j < stream.measurements.size(); ++j) {
    chain += stream.measurements[j].z_raw;
    CHECK((chain - stream.absolutes[j]).norm() <= 1e-9);
  }
}

TEST_CASE("frames never accumulate drift even when asked to") {
  const auto track = line_track(1.0, 1000.0, Vec2(0, 0), Vec2(5, 5));
  OccluderSet none;
  SourceModel frame = default_frame_model();
  frame.noise_std = 0.0;
  frame.drift_std = 0.5;  // ignored for the frame source
  frame.vis_flip_prob = 0.0;
  const auto stream = simulate_source(track, none, frame, 11);
  CHECK(stream.terminal_bias.norm() == 0.0);
  for (const auto& m : stream.measurements) {
    CHECK((m.z_raw - gt_position_at(track, m.t)).norm() == 0.0);
  }
}

TEST_CASE("terminal drift matches an independent random-walk replay") {
  const auto track = line_track(1.0, 1000.0, Vec2(50, 50), Vec2(0, 0));
  OccluderSet none;
  SourceModel model = default_event_model();
  model.rate_hz = 1000.0;
  model.noise_std = 0.0;
  model.drift_std = 0.1;
  model.vis_flip_prob = 0.0;
  const std::uint64_t stream_seed = 3;
  const auto stream = simulate_source(track, none, model, stream_seed);
  REQUIRE(stream.measurements.size() == 1000);

  const auto walk = oracle::replay_bias(stream_seed, 0.1, 1000);
  CHECK(stream.terminal_bias.x() == doctest::Approx(walk.x).epsilon(1e-15));
  CHECK(stream.terminal_bias.y() == doctest::Approx(walk.y).epsilon(1e-15));
  // The drift is also what separates the final measurement from ground truth.
  const Vec2 gt_end = gt_position_at(track, stream.measurements.back().t);
  CHECK((stream.absolutes.back() - gt_end - stream.terminal_bias).norm() <= 1e-9);
}

TEST_CASE("generation is deterministic per seed") {
  const auto spec = small_spec(42);
  const auto a = generate_scenario(spec);
  const auto b = generate_scenario(spec);
  CHECK(gt_to_jsonl(a.gt.tracks) == gt_to_jsonl(b.gt.tracks));
  CHECK(measurements_to_jsonl(a.measurements) == measurements_to_jsonl(b.measurements));
}

TEST_CASE("reported visibility disagreement converges to the flip rate") {
  ScenarioSpec spec = small_spec(8);
  spec.duration_s = 3.0;
  const auto gen = generate_tracks(spec);
  SourceModel model = default_event_model();
  model.rate_hz = 1000.0;
  model.vis_flip_prob = 0.1;
  std::uint64_t flips = 0, total = 0;
  for (const auto& tr : gen.tracks) {
    const auto stream = simulate_source(tr, gen.occluders, model, 1000 + tr.track_id);
    for (const auto& m : stream.measurements) {
      const bool truly_visible = !gen.occluders.occluded(gt_position_at(tr, m.t), m.t);
      if ((m.report.p_vis >= 0.5) != truly_visible) ++flips;
      ++total;
    }
  }
  REQUIRE(total >= 10000);
  const double rate = static_cast<double>(flips) / static_cast<double>(total);
  CHECK(rate == doctest::Approx(0.1).epsilon(0.2));
  CHECK(std::abs(rate - 0.1) <= 0.02);
}

TEST_CASE("track speed respects the configured clamp") {
  ScenarioSpec spec = small_spec(31);
  spec.duration_s = 2.0;
  const auto gen = generate_tracks(spec);
  for (const auto& tr : gen.tracks) {
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      const double dt = tr.samples[i].t - tr.samples[i - 1].t;
      const double v = (tr.samples[i].pos - tr.samples[i - 1].pos).norm() / dt;
      CHECK(v <= spec.motion.max_speed + 1e-9);
    }
  }
}

TEST_CASE("occluded event samples repeat the last visible position") {
  const auto spec = small_spec(12);
  const auto gen = generate_tracks(spec);
  SourceModel model = default_event_model();
  model.vis_flip_prob = 0.0;
  for (const auto& tr : gen.tracks) {
    const auto stream = simulate_source(tr, gen.occluders, model, 50 + tr.track_id);
    for (std::size_t j = 1; j < stream.measurements.size(); ++j) {
      const auto& m = stream.measurements[j];
      const bool visible = !gen.occluders.occluded(gt_position_at(tr, m.t), m.t);
      if (!visible) {
        // Stuck: the absolute chain does not move.
        const bool prev_same = (stream.absolutes[j] - stream.absolutes[j - 1]).norm() == 0.0;
        const bool at_start = j == 0;
        CHECK((prev_same || at_start ||
               gen.occluders.occluded(gt_position_at(tr, stream.measurements[j - 1].t),
                                      stream.measurements[j - 1].t) == false));
        CHECK(m.z_raw.norm() == (stream.absolutes[j] - stream.absolutes[j - 1]).norm());
      }
    }
  }
}

TEST_CASE("occluded frame samples stay inside the garbage disk") {
  const auto spec = small_spec(13);
  const auto gen = generate_tracks(spec);
  SourceModel model = default_frame_model();
  model.vis_flip_prob = 0.0;
  model.garbage_radius = 6.0;
  int occluded_seen = 0;
  for (const auto& tr : gen.tracks) {
    const auto stream = simulate_source(tr, gen.occluders, model, 90 + tr.track_id);
    Vec2 last_visible = tr.samples.front().pos;
    for (std::size_t j = 0; j < stream.measurements.size(); ++j) {
      const auto& m = stream.measurements[j];
      const bool visible = !gen.occluders.occluded(gt_position_at(tr, m.t), m.t);
      if (visible) {
        last_visible = stream.absolutes[j];
      } else {
        ++occluded_seen;
        CHECK((stream.absolutes[j] - last_visible).norm() <= model.garbage_radius + 1e-12);
      }
    }
  }
  CHECK(occluded_seen > 0);
}

TEST_CASE("event timestamps sit exactly on the source grid") {
  const auto spec = small_spec(2);
  const auto gen = generate_tracks(spec);
  const auto stream = simulate_source(gen.tracks[0], gen.occluders, spec.event_source, 123);
  for (std::size_t j = 0; j < stream.measurements.size(); ++j) {
    const double expected = static_cast<double>(j + 1) / spec.event_source.rate_hz;
    CHECK(stream.measurements[j].t == expected);
    if (j > 0) {
      CHECK(stream.measurements[j].t - stream.measurements[j - 1].t ==
            doctest::Approx(0.01).epsilon(1e-12));
    }
  }
}

TEST_CASE("the benchmark suite is deterministic and correctly shaped") {
  const auto a = benchmark_suite(9);
  const auto b = benchmark_suite(9);
  REQUIRE(a.size() == 100);
  REQUIRE(b.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].duration_s == 2.0);
    CHECK(a[i].master_rate_hz == 1000.0);
    CHECK(a[i].n_tracks == 20);
    CHECK(a[i].event_source.rate_hz == 100.0);
    CHECK(a[i].frame_source.rate_hz == 24.0);
  }
  // Distinct scenarios get distinct seeds.
  CHECK(a[0].seed != a[1].seed);

  // Spot-check the occlusion band on a few generated members; the full suite
  // is covered by the acceptance run.
  for (std::size_t i = 0; i < 3; ++i) {
    const auto gen = generate_tracks(a[i]);
    std::uint64_t occ = 0, total = 0;
    for (const auto& tr : gen.tracks)
      for (const auto& s : tr.samples) {
        ++total;
        if (!s.visible) ++occ;
      }
    const double frac = static_cast<double>(occ) / static_cast<double>(total);
    CHECK(frac >= 0.15);
    CHECK(frac <= 0.35);
  }
}
