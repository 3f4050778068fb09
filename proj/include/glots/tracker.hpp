#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glots/assign.hpp"
#include "glots/assoc.hpp"
#include "glots/geom.hpp"
#include "glots/pool.hpp"

namespace glots {

struct Detection {
    Polygon4 polygon;
    RotatedBox box;  // derived from polygon when not supplied
    Embedding embedding;
    std::string transcription;
    double confidence = 1.0;
};

struct FrameInput {
    int frame_index = 0;
    std::vector<Detection> detections;
};

struct TrackEntry {
    int frame_index = 0;
    Polygon4 polygon;
    std::string transcription;
    double confidence = 1.0;
    double score = 1.0;  // fused score of the accepting match, 1 for births
};

struct TrackRecord {
    long long tracklet_id = 0;
    std::vector<TrackEntry> entries;
};

enum class PositionalMode { kWasserstein, kIoU, kNone };

struct TrackerConfig {
    int window = 8;
    double alpha = 1.0;
    double new_track_threshold = 0.3;
    TrackletAgg tracklet_agg = TrackletAgg::kMean;
    GaussianVariant gaussian_variant = GaussianVariant::kPaper;
    bool clamp_positional = true;
    PositionalMode positional = PositionalMode::kWasserstein;
    double confidence_floor = 0.0;  // file-driven inputs only; detector out of scope
};

class Tracker {
public:
    // When no model is given, association falls back to cosine similarity
    // of raw embeddings passed through the per-frame softmax.
    Tracker(TrackerConfig config, std::optional<AssocModel> model = std::nullopt);

    // One frame of inference: associate, fuse, assign, birth, update pool.
    // Returns (detection_index, tracklet_id) per kept detection.
    std::vector<std::pair<int, long long>> step(const FrameInput& frame);

    const std::vector<TrackRecord>& records() const { return records_; }
    std::vector<TrackRecord> take_records() { return std::move(records_); }

    // Cumulative wall time spent in association (encode+decode+aggregate+assign).
    double association_ms() const { return association_ms_; }
    int frames_processed() const { return frames_processed_; }

private:
    long long birth(const Detection& det, int frame_index);
    TrackerConfig cfg_;
    std::optional<AssocModel> model_;
    GlobalPool pool_;
    long long next_id_ = 0;
    std::vector<TrackRecord> records_;
    std::vector<size_t> record_of_id_;
    double association_ms_ = 0.0;
    int frames_processed_ = 0;
};

std::vector<TrackRecord> run_video(const TrackerConfig& config, const std::vector<FrameInput>& frames,
                                   const std::optional<AssocModel>& model = std::nullopt,
                                   double* association_ms_total = nullptr);

// Majority vote over a record's per-frame transcriptions; ties go to the
// transcription backed by the highest-confidence frame.
std::string transcription_vote(const TrackRecord& record);

}  // namespace glots
