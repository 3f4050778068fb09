#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "glots/assoc.hpp"
#include "glots/geom.hpp"

namespace glots {

enum class TrackletAgg { kMean, kSum };

struct PoolEntry {
    Embedding embedding;
    long long tracklet_id = 0;
    RotatedBox box;
};

struct TrackletMeta {
    int birth_frame = 0;
    int last_seen_frame = 0;
    RotatedBox last_box;
    std::vector<std::string> transcriptions;
};

struct PoolIndex {
    std::vector<FrameBlock> frames;
    std::vector<long long> column_tracklets;  // tracklet id per pool column
};

// Sliding-window queue of historical embeddings grouped by tracklet.
class GlobalPool {
public:
    explicit GlobalPool(int window) : window_(window) {}

    int window() const { return window_; }
    int retained_frames() const { return static_cast<int>(frames_.size()); }
    bool empty() const { return frames_.empty(); }
    int total_embeddings() const;
    int last_frame_index() const { return last_frame_index_; }

    // Appends a frame, evicting the oldest when the window overflows.
    // One detection per tracklet per frame.
    void push_frame(int frame_index, const std::vector<PoolEntry>& assigned);

    // Concatenated M_t x d matrix in frame-major order plus column index.
    std::pair<Mat, PoolIndex> concat_embeddings() const;

    // Tracklet ids with at least one embedding still in the window,
    // ascending. These are the K_t matchable tracklets.
    std::vector<long long> active_tracklets() const;

    const std::map<long long, TrackletMeta>& registry() const { return registry_; }
    TrackletMeta& meta(long long tid) { return registry_.at(tid); }

private:
    struct FrameEntry {
        int frame_index;
        std::vector<PoolEntry> entries;
    };
    int window_;
    int last_frame_index_ = -1;
    std::deque<FrameEntry> frames_;
    std::map<long long, TrackletMeta> registry_;  // append-only within a video
};

struct TrackletScores {
    Mat scores;                        // N x K
    std::vector<long long> tracklets;  // column -> tracklet id
};

// Tracklet-wise aggregation of association probabilities.
// Sum mode adds P_Asso over a tracklet's embeddings; mean divides by count.
TrackletScores aggregate_tracklet_scores(const AssocMatrix& am, const PoolIndex& index,
                                         TrackletAgg mode = TrackletAgg::kMean);

}  // namespace glots
