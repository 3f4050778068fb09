#include "glots/metrics.hpp"

#include <algorithm>
#include <set>

#include "glots/assign.hpp"
#include "glots/errors.hpp"

namespace glots {
namespace metrics {

namespace {

std::vector<uint32_t> decode_utf8(const std::string& s) {
    std::vector<uint32_t> cps;
    for (size_t i = 0; i < s.size();) {
        const unsigned char c = s[i];
        uint32_t cp;
        int len;
        if (c < 0x80) {
            cp = c;
            len = 1;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1F;
            len = 2;
        } else if ((c >> 4) == 0xE) {
            cp = c & 0x0F;
            len = 3;
        } else if ((c >> 3) == 0x1E) {
            cp = c & 0x07;
            len = 4;
        } else {  // invalid byte, treat as one code point
            cp = c;
            len = 1;
        }
        for (int k = 1; k < len && i + k < s.size(); ++k) cp = (cp << 6) | (s[i + k] & 0x3F);
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

double similarity(const GtEntry& g, const PredEntry& p, const EvalConfig& cfg, bool* valid) {
    if (cfg.mode == EvalMode::kTracking) {
        const double iou = polygon_iou(g.polygon, p.polygon);
        *valid = iou >= cfg.iou_threshold;
        return iou;
    }
    const double sim = transcription_similarity(g.transcription, p.transcription);
    *valid = sim >= 1.0 - cfg.max_edit_ratio - 1e-12;
    if (*valid && cfg.spotting_require_iou)
        *valid = polygon_iou(g.polygon, p.polygon) >= cfg.iou_threshold;
    return sim;
}

FrameMatch match_frame(const std::vector<GtEntry>& gt, const std::vector<PredEntry>& pred,
                       const EvalConfig& cfg, const std::map<long long, long long>& prev) {
    FrameMatch out;
    std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);

    // persist previous correspondences that still hold
    for (size_t gi = 0; gi < gt.size(); ++gi) {
        if (gt[gi].ignore) {
            gt_used[gi] = 1;
            continue;
        }
        auto it = prev.find(gt[gi].track_id);
        if (it == prev.end()) continue;
        for (size_t pi = 0; pi < pred.size(); ++pi) {
            if (pred_used[pi] || pred[pi].track_id != it->second) continue;
            bool valid = false;
            const double sim = similarity(gt[gi], pred[pi], cfg, &valid);
            if (valid) {
                out.emplace_back(static_cast<int>(gi), static_cast<int>(pi), sim);
                gt_used[gi] = 1;
                pred_used[pi] = 1;
            }
            break;
        }
    }

    // Hungarian on the remainder
    std::vector<int> grem, prem;
    for (size_t gi = 0; gi < gt.size(); ++gi)
        if (!gt_used[gi]) grem.push_back(static_cast<int>(gi));
    for (size_t pi = 0; pi < pred.size(); ++pi)
        if (!pred_used[pi]) prem.push_back(static_cast<int>(pi));
    if (grem.empty() || prem.empty()) return out;

    Mat scores(static_cast<int>(grem.size()), static_cast<int>(prem.size()));
    Mat sims = scores;
    for (size_t r = 0; r < grem.size(); ++r)
        for (size_t c = 0; c < prem.size(); ++c) {
            bool valid = false;
            const double sim = similarity(gt[grem[r]], pred[prem[c]], cfg, &valid);
            sims(static_cast<int>(r), static_cast<int>(c)) = sim;
            scores(static_cast<int>(r), static_cast<int>(c)) = valid ? 1.0 + sim : 0.0;
        }
    assign::AssignmentResult res = assign::solve(scores, 1.0);
    for (const auto& [r, c] : res.pairs)
        out.emplace_back(grem[r], prem[c], sims(r, c));
    return out;
}

struct TrackSpan {
    int span = 0;
    int matched = 0;
};

}  // namespace

long long edit_distance(const std::string& a, const std::string& b) {
    const std::vector<uint32_t> x = decode_utf8(a), y = decode_utf8(b);
    const size_t n = x.size(), m = y.size();
    std::vector<long long> row(m + 1);
    for (size_t j = 0; j <= m; ++j) row[j] = static_cast<long long>(j);
    for (size_t i = 1; i <= n; ++i) {
        long long prev = row[0];
        row[0] = static_cast<long long>(i);
        for (size_t j = 1; j <= m; ++j) {
            const long long cur = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + (x[i - 1] == y[j - 1] ? 0 : 1)});
            prev = cur;
        }
    }
    return row[m];
}

double transcription_similarity(const std::string& a, const std::string& b) {
    if (a.empty() && b.empty()) return 1.0;
    const size_t la = decode_utf8(a).size(), lb = decode_utf8(b).size();
    const double maxlen = static_cast<double>(std::max(la, lb));
    return 1.0 - static_cast<double>(edit_distance(a, b)) / maxlen;
}

FrameMatch match_frame_tracking(const std::vector<GtEntry>& gt, const std::vector<PredEntry>& pred,
                                double iou_threshold,
                                const std::map<long long, long long>& prev) {
    EvalConfig cfg;
    cfg.mode = EvalMode::kTracking;
    cfg.iou_threshold = iou_threshold;
    return match_frame(gt, pred, cfg, prev);
}

FrameMatch match_frame_spotting(const std::vector<GtEntry>& gt, const std::vector<PredEntry>& pred,
                                const EvalConfig& cfg,
                                const std::map<long long, long long>& prev) {
    EvalConfig c = cfg;
    c.mode = EvalMode::kSpotting;
    return match_frame(gt, pred, c, prev);
}

MetricsReport compute_report(const std::map<std::string, GtSequence>& gt,
                             const std::map<std::string, PredSequence>& preds,
                             const EvalConfig& cfg) {
    MetricsReport rep;
    long long total_idtp = 0, total_gt_dets = 0, total_pred_dets = 0;
    int total_tracks = 0, mm_tracks = 0, ml_tracks = 0;
    double sim_sum = 0.0;

    for (const auto& [video, gseq] : gt) {
        VideoCounts vc;
        vc.video = video;
        static const PredSequence kEmptyPreds;
        const PredSequence& pseq =
            preds.count(video) ? preds.at(video) : kEmptyPreds;

        std::set<int> frames;
        for (const auto& [f, _] : gseq) frames.insert(f);
        for (const auto& [f, _] : pseq) frames.insert(f);

        std::map<long long, long long> corr;          // live correspondence
        std::map<long long, long long> last_matched;  // persists across gaps, for IDSW
        std::map<long long, TrackSpan> spans;
        std::map<std::pair<long long, long long>, long long> pair_counts;  // IDF1 overlap

        for (int f : frames) {
            static const std::vector<GtEntry> kNoGt;
            static const std::vector<PredEntry> kNoPred;
            const std::vector<GtEntry>& gents = gseq.count(f) ? gseq.at(f) : kNoGt;
            const std::vector<PredEntry>& pents = pseq.count(f) ? pseq.at(f) : kNoPred;

            for (const GtEntry& g : gents)
                if (!g.ignore) {
                    ++vc.gt;
                    ++spans[g.track_id].span;
                }

            FrameMatch fm = match_frame(gents, pents, cfg, corr);

            std::vector<char> gt_matched(gents.size(), 0), pred_matched(pents.size(), 0);
            std::map<long long, long long> new_corr;
            for (const auto& [gi, pi, sim] : fm) {
                gt_matched[gi] = 1;
                pred_matched[pi] = 1;
                const long long gid = gents[gi].track_id;
                const long long pid = pents[pi].track_id;
                ++vc.matches;
                vc.sim_sum += sim;
                ++spans[gid].matched;
                auto lm = last_matched.find(gid);
                if (lm != last_matched.end() && lm->second != pid) ++vc.idsw;
                last_matched[gid] = pid;
                new_corr[gid] = pid;
            }
            corr = std::move(new_corr);

            for (size_t gi = 0; gi < gents.size(); ++gi)
                if (!gents[gi].ignore && !gt_matched[gi]) ++vc.fn;

            for (size_t pi = 0; pi < pents.size(); ++pi) {
                if (pred_matched[pi]) {
                    ++vc.pred_dets;
                    continue;
                }
                // suppress false positives covered by ignore regions
                bool suppressed = false;
                for (const GtEntry& g : gents)
                    if (g.ignore && polygon_iou(g.polygon, pents[pi].polygon) >= cfg.iou_threshold) {
                        suppressed = true;
                        break;
                    }
                if (!suppressed) {
                    ++vc.fp;
                    ++vc.pred_dets;
                }
            }

            // IDF1 overlap counts: frame-level potential matches
            for (size_t gi = 0; gi < gents.size(); ++gi) {
                if (gents[gi].ignore) continue;
                ++vc.gt_dets;
                for (size_t pi = 0; pi < pents.size(); ++pi) {
                    bool valid = false;
                    similarity(gents[gi], pents[pi], cfg, &valid);
                    if (valid) ++pair_counts[{gents[gi].track_id, pents[pi].track_id}];
                }
            }
        }

        // IDF1: optimal gt-track / pred-track bijection maximizing overlap
        std::set<long long> gids, pids;
        for (const auto& [key, _] : pair_counts) {
            gids.insert(key.first);
            pids.insert(key.second);
        }
        if (!gids.empty() && !pids.empty()) {
            std::vector<long long> gv(gids.begin(), gids.end()), pv(pids.begin(), pids.end());
            Mat counts(static_cast<int>(gv.size()), static_cast<int>(pv.size()));
            for (size_t r = 0; r < gv.size(); ++r)
                for (size_t c = 0; c < pv.size(); ++c) {
                    auto it = pair_counts.find({gv[r], pv[c]});
                    if (it != pair_counts.end())
                        counts(static_cast<int>(r), static_cast<int>(c)) =
                            static_cast<double>(it->second);
                }
            assign::AssignmentResult res = assign::solve(counts, 0.5);
            for (const auto& [r, c] : res.pairs)
                vc.idtp += static_cast<long long>(counts(r, c));
        }

        vc.total_tracks = static_cast<int>(spans.size());
        for (const auto& [tid, sp] : spans) {
            const double ratio = sp.span > 0 ? static_cast<double>(sp.matched) / sp.span : 0.0;
            if (ratio >= 0.8) ++vc.mm_tracks;
            if (ratio <= 0.2) ++vc.ml_tracks;
        }

        rep.gt += vc.gt;
        rep.fp += vc.fp;
        rep.fn += vc.fn;
        rep.idsw += vc.idsw;
        rep.matches += vc.matches;
        sim_sum += vc.sim_sum;
        total_idtp += vc.idtp;
        total_gt_dets += vc.gt_dets;
        total_pred_dets += vc.pred_dets;
        total_tracks += vc.total_tracks;
        mm_tracks += vc.mm_tracks;
        ml_tracks += vc.ml_tracks;
        rep.per_video.push_back(std::move(vc));
    }

    if (rep.gt == 0) throw EmptyGroundTruth("compute_report: no ground truth entries");

    rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.idsw) / static_cast<double>(rep.gt);
    rep.motp = rep.matches > 0 ? sim_sum / static_cast<double>(rep.matches) : 0.0;
    const long long denom = total_gt_dets + total_pred_dets;
    rep.idf1 = denom > 0 ? 2.0 * static_cast<double>(total_idtp) / static_cast<double>(denom) : 0.0;
    rep.mm = total_tracks > 0 ? 100.0 * mm_tracks / total_tracks : 0.0;
    rep.ml = total_tracks > 0 ? 100.0 * ml_tracks / total_tracks : 0.0;
    return rep;
}

}  // namespace metrics
}  // namespace glots
