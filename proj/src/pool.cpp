#include "glots/pool.hpp"

#include <algorithm>
#include <set>

namespace glots {

int GlobalPool::total_embeddings() const {
    int n = 0;
    for (const auto& f : frames_) n += static_cast<int>(f.entries.size());
    return n;
}

void GlobalPool::push_frame(int frame_index, const std::vector<PoolEntry>& assigned) {
    if (frame_index <= last_frame_index_)
        throw OrderError("push_frame: frame index must increase");
    std::set<long long> seen;
    for (const PoolEntry& e : assigned) {
        if (!seen.insert(e.tracklet_id).second)
            throw OrderError("push_frame: duplicate tracklet id within a frame");
    }
    frames_.push_back({frame_index, assigned});
    last_frame_index_ = frame_index;
    for (const PoolEntry& e : assigned) {
        auto it = registry_.find(e.tracklet_id);
        if (it == registry_.end()) {
            TrackletMeta meta;
            meta.birth_frame = frame_index;
            meta.last_seen_frame = frame_index;
            meta.last_box = e.box;
            registry_.emplace(e.tracklet_id, meta);
        } else {
            it->second.last_seen_frame = frame_index;
            it->second.last_box = e.box;
        }
    }
    while (static_cast<int>(frames_.size()) > window_) frames_.pop_front();
}

std::pair<Mat, PoolIndex> GlobalPool::concat_embeddings() const {
    if (frames_.empty()) throw EmptyPool("concat_embeddings: pool is empty");
    int m = total_embeddings();
    int d = 0;
    for (const auto& f : frames_)
        if (!f.entries.empty()) {
            d = static_cast<int>(f.entries.front().embedding.values.size());
            break;
        }
    Mat out(m, d);
    PoolIndex index;
    index.column_tracklets.reserve(m);
    int row = 0;
    for (const auto& f : frames_) {
        FrameBlock fb;
        fb.frame_index = f.frame_index;
        fb.col_begin = row;
        fb.col_count = static_cast<int>(f.entries.size());
        index.frames.push_back(fb);
        for (const PoolEntry& e : f.entries) {
            if (static_cast<int>(e.embedding.values.size()) != d)
                throw ShapeError("concat_embeddings: inconsistent embedding width");
            std::copy(e.embedding.values.begin(), e.embedding.values.end(), out.row(row));
            index.column_tracklets.push_back(e.tracklet_id);
            ++row;
        }
    }
    return {out, index};
}

std::vector<long long> GlobalPool::active_tracklets() const {
    std::set<long long> ids;
    for (const auto& f : frames_)
        for (const PoolEntry& e : f.entries) ids.insert(e.tracklet_id);
    return {ids.begin(), ids.end()};
}

TrackletScores aggregate_tracklet_scores(const AssocMatrix& am, const PoolIndex& index,
                                         TrackletAgg mode) {
    if (static_cast<int>(index.column_tracklets.size()) != am.probs.cols)
        throw ShapeError("aggregate_tracklet_scores: index does not cover probability columns");

    std::set<long long> ids(index.column_tracklets.begin(), index.column_tracklets.end());
    TrackletScores out;
    out.tracklets.assign(ids.begin(), ids.end());
    std::map<long long, int> col_of;
    for (size_t k = 0; k < out.tracklets.size(); ++k) col_of[out.tracklets[k]] = static_cast<int>(k);

    const int n = am.probs.rows;
    const int k = static_cast<int>(out.tracklets.size());
    out.scores = Mat(n, k);
    std::vector<int> counts(k, 0);
    for (size_t j = 0; j < index.column_tracklets.size(); ++j)
        counts[col_of[index.column_tracklets[j]]]++;

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < am.probs.cols; ++j)
            out.scores(i, col_of[index.column_tracklets[j]]) += am.probs(i, j);

    if (mode == TrackletAgg::kMean) {
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (int i = 0; i < n; ++i) out.scores(i, c) /= counts[c];
        }
    }
    return out;
}

}  // namespace glots
