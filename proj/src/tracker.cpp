#include "glots/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace glots {

namespace {
double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double denom = std::sqrt(na) * std::sqrt(nb);
    return denom > 0.0 ? dot / denom : 0.0;
}
}  // namespace

Tracker::Tracker(TrackerConfig config, std::optional<AssocModel> model)
    : cfg_(config), model_(std::move(model)), pool_(config.window) {}

long long Tracker::birth(const Detection& det, int frame_index) {
    const long long tid = next_id_++;
    TrackRecord rec;
    rec.tracklet_id = tid;
    rec.entries.push_back({frame_index, det.polygon, det.transcription, det.confidence, 1.0});
    record_of_id_.push_back(records_.size());
    records_.push_back(std::move(rec));
    return tid;
}

std::vector<std::pair<int, long long>> Tracker::step(const FrameInput& frame) {
    if (frame.frame_index <= pool_.last_frame_index())
        throw OrderError("step: frame index must increase");

    std::vector<int> kept;
    for (int i = 0; i < static_cast<int>(frame.detections.size()); ++i)
        if (frame.detections[i].confidence >= cfg_.confidence_floor) kept.push_back(i);

    const int n = static_cast<int>(kept.size());
    int d = -1;
    for (int i : kept) {
        const int w = static_cast<int>(frame.detections[i].embedding.values.size());
        if (d < 0) d = w;
        if (w != d) throw ShapeError("step: inconsistent embedding widths within frame");
        if (model_ && w != model_->dim) throw ShapeError("step: embedding width does not match model");
    }

    std::vector<std::pair<int, long long>> out;
    std::vector<PoolEntry> assigned;

    if (pool_.empty() || pool_.total_embeddings() == 0 || n == 0) {
        // initialization rule: every detection starts a trajectory
        for (int i : kept) {
            const Detection& det = frame.detections[i];
            const long long tid = birth(det, frame.frame_index);
            assigned.push_back({{det.embedding.values, frame.frame_index, i}, tid, det.box});
            out.emplace_back(i, tid);
        }
        pool_.push_frame(frame.frame_index, assigned);
        ++frames_processed_;
        return out;
    }

    const auto t0 = std::chrono::steady_clock::now();

    auto [pool_mat, index] = pool_.concat_embeddings();
    Mat queries(n, d);
    for (int r = 0; r < n; ++r) {
        const auto& vals = frame.detections[kept[r]].embedding.values;
        std::copy(vals.begin(), vals.end(), queries.row(r));
    }

    AssocMatrix am;
    if (model_) {
        Mat memory = encode_pool(*model_, pool_mat);
        am = decode_associations(*model_, queries, memory, index.frames);
    } else {
        // untrained fallback: cosine similarity through the same softmax
        Mat logits(n, pool_mat.rows);
        for (int i = 0; i < n; ++i) {
            const auto& q = frame.detections[kept[i]].embedding.values;
            for (int j = 0; j < pool_mat.rows; ++j) {
                std::vector<double> g(pool_mat.row(j), pool_mat.row(j) + d);
                logits(i, j) = cosine(q, g);
            }
        }
        am = assoc_from_logits(std::move(logits), index.frames, 0.0);
    }

    TrackletScores ts = aggregate_tracklet_scores(am, index, cfg_.tracklet_agg);
    const int k = static_cast<int>(ts.tracklets.size());

    Mat fused = ts.scores;
    if (cfg_.positional != PositionalMode::kNone) {
        for (int c = 0; c < k; ++c) {
            const RotatedBox& last = pool_.meta(ts.tracklets[c]).last_box;
            for (int i = 0; i < n; ++i) {
                const Detection& det = frame.detections[kept[i]];
                double w;
                if (cfg_.positional == PositionalMode::kWasserstein) {
                    w = positional_score(det.box, last, cfg_.alpha, cfg_.gaussian_variant);
                    if (cfg_.clamp_positional) w = clamp01(w);
                } else {
                    w = polygon_iou(det.polygon, box_to_polygon(last));
                }
                fused(i, c) = std::max(fused(i, c), w);
            }
        }
    }

    assign::AssignmentResult res = assign::solve(fused, cfg_.new_track_threshold);

    const auto t1 = std::chrono::steady_clock::now();
    association_ms_ += std::chrono::duration<double, std::milli>(t1 - t0).count();

    for (const auto& [row, col] : res.pairs) {
        const int di = kept[row];
        const Detection& det = frame.detections[di];
        const long long tid = ts.tracklets[col];
        records_[record_of_id_[tid]].entries.push_back(
            {frame.frame_index, det.polygon, det.transcription, det.confidence, fused(row, col)});
        assigned.push_back({{det.embedding.values, frame.frame_index, di}, tid, det.box});
        out.emplace_back(di, tid);
    }
    for (int row : res.unmatched_rows) {
        const int di = kept[row];
        const Detection& det = frame.detections[di];
        const long long tid = birth(det, frame.frame_index);
        assigned.push_back({{det.embedding.values, frame.frame_index, di}, tid, det.box});
        out.emplace_back(di, tid);
    }

    pool_.push_frame(frame.frame_index, assigned);
    ++frames_processed_;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TrackRecord> run_video(const TrackerConfig& config, const std::vector<FrameInput>& frames,
                                   const std::optional<AssocModel>& model,
                                   double* association_ms_total) {
    Tracker tracker(config, model);
    for (const FrameInput& f : frames) tracker.step(f);
    if (association_ms_total) *association_ms_total = tracker.association_ms();
    return tracker.take_records();
}

std::string transcription_vote(const TrackRecord& record) {
    if (record.entries.empty()) return {};
    struct Tally {
        int count = 0;
        double best_conf = -1.0;
    };
    std::map<std::string, Tally> tally;
    for (const TrackEntry& e : record.entries) {
        Tally& t = tally[e.transcription];
        ++t.count;
        t.best_conf = std::max(t.best_conf, e.confidence);
    }
    const std::string* best = nullptr;
    const Tally* best_t = nullptr;
    for (const auto& [text, t] : tally) {
        if (!best || t.count > best_t->count ||
            (t.count == best_t->count && t.best_conf > best_t->best_conf)) {
            best = &text;
            best_t = &t;
        }
    }
    return *best;
}

}  // namespace glots
