#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glots/metrics.hpp"
#include "glots/tracker.hpp"

namespace glots {
namespace synth {

enum class Motion { kStatic, kLinear, kJitter };

struct TextSpec {
    std::string transcription;
    double cx = 0, cy = 0;       // position at birth frame
    double w = 40, h = 12, theta = 0;
    Motion motion = Motion::kStatic;
    double vx = 0, vy = 0;                            // linear velocity, px/frame
    int birth = 0;
    int death = -1;                                   // inclusive last frame, -1 = clip end
    std::vector<std::pair<int, int>> occlusions;      // inclusive frame intervals
};

struct NoiseSpec {
    double center_jitter = 0.0;    // px sigma
    double size_jitter = 0.0;      // px sigma
    double angle_jitter = 0.0;     // radians sigma
    double embedding_sigma = 0.0;  // relative to unit-norm cluster centers
    double fp_rate = 0.0;          // expected false positives per frame
    double miss_rate = 0.0;        // per-detection drop probability
};

struct Scenario {
    std::uint64_t seed = 1;
    int frame_count = 10;
    double canvas_w = 1280, canvas_h = 720;
    double pan_vx = 0, pan_vy = 0;  // camera pan applied to every text
    std::vector<TextSpec> texts;
    NoiseSpec noise;
    int embed_dim = 64;
};

struct Clip {
    std::vector<FrameInput> frames;
    metrics::GtSequence gt;
    // per frame, per detection: true track id, -1 for injected false positives
    std::vector<std::vector<long long>> labels;
};

// Deterministic clip from a scenario. Occluded frames omit both the
// detection and the GT entry; the track id persists across the gap.
Clip generate(const Scenario& scenario);

// Canonical acceptance scenarios:
//   fig3_case2     camera pan > 1 box width per frame, shapes preserved
//   fig3_case3     object motion with zero inter-frame IoU
//   occlusion_gap  3-frame disappearance inside a longer track
//   identical_texts two crossing tracks sharing one transcription
//   crowd          20 concurrent texts
Scenario preset(const std::string& name);

std::vector<std::string> preset_names();

// Flattens a clip into the self-association training inputs: one pool row
// per true detection (false positives excluded), frame-major.
void training_pool(const Clip& clip, Mat& pool, std::vector<FrameBlock>& frames,
                   std::vector<long long>& tracklets);

}  // namespace synth
}  // namespace glots
