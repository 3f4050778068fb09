#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "glots/geom.hpp"

namespace glots {
namespace metrics {

struct GtEntry {
    long long track_id = 0;
    Polygon4 polygon;
    std::string transcription;
    bool ignore = false;
};

struct PredEntry {
    long long track_id = 0;
    Polygon4 polygon;
    std::string transcription;
};

// frame index -> entries (one entry per (frame, track))
using GtSequence = std::map<int, std::vector<GtEntry>>;
using PredSequence = std::map<int, std::vector<PredEntry>>;

enum class EvalMode { kTracking, kSpotting };

struct EvalConfig {
    EvalMode mode = EvalMode::kTracking;
    double iou_threshold = 0.5;
    double max_edit_ratio = 0.0;      // spotting: max tolerated editdist / max-length
    bool spotting_require_iou = true;  // spotting also requires spatial overlap
};

// Matched (gt index, pred index, similarity) triples within one frame.
using FrameMatch = std::vector<std::tuple<int, int, double>>;

// CLEAR-MOT per-frame matching: persisted correspondences from prev
// (gt_track_id -> pred_track_id) are kept when still above threshold,
// Hungarian on similarity settles the remainder. Ignored GT is skipped.
FrameMatch match_frame_tracking(const std::vector<GtEntry>& gt, const std::vector<PredEntry>& pred,
                                double iou_threshold,
                                const std::map<long long, long long>& prev);

FrameMatch match_frame_spotting(const std::vector<GtEntry>& gt, const std::vector<PredEntry>& pred,
                                const EvalConfig& cfg,
                                const std::map<long long, long long>& prev);

struct VideoCounts {
    std::string video;
    long long gt = 0, fp = 0, fn = 0, idsw = 0, matches = 0;
    double sim_sum = 0.0;
    long long idtp = 0, gt_dets = 0, pred_dets = 0;
    int mm_tracks = 0, ml_tracks = 0, total_tracks = 0;
};

struct MetricsReport {
    double mota = 0.0;
    double motp = 0.0;
    double idf1 = 0.0;
    double mm = 0.0;  // percent of GT tracks matched >= 80% of their span
    double ml = 0.0;  // percent matched <= 20%
    long long fp = 0, fn = 0, idsw = 0, gt = 0, matches = 0;
    std::vector<VideoCounts> per_video;
};

MetricsReport compute_report(const std::map<std::string, GtSequence>& gt,
                             const std::map<std::string, PredSequence>& preds,
                             const EvalConfig& cfg);

// Levenshtein distance over unicode code points.
long long edit_distance(const std::string& a, const std::string& b);

// 1 - editdist / max(lengths); both empty -> 1 by convention.
double transcription_similarity(const std::string& a, const std::string& b);

}  // namespace metrics
}  // namespace glots
