#include "glots/synth.hpp"

#include <algorithm>
#include <cmath>

#include "glots/rng.hpp"

namespace glots {
namespace synth {

namespace {

std::vector<std::vector<double>> cluster_centers(int count, int dim, Rng& rng) {
    // orthogonally-leaning unit vectors: Gram-Schmidt over seeded gaussians
    std::vector<std::vector<double>> centers;
    centers.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::vector<double> v(dim);
        for (double& x : v) x = rng.normal();
        if (k < dim) {
            for (const auto& c : centers) {
                double dot = 0.0;
                for (int i = 0; i < dim; ++i) dot += v[i] * c[i];
                for (int i = 0; i < dim; ++i) v[i] -= dot * c[i];
            }
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-9) {  // regenerate-free fallback, keep determinism
            v.assign(dim, 0.0);
            v[k % dim] = 1.0;
            norm = 1.0;
        }
        for (double& x : v) x /= norm;
        centers.push_back(std::move(v));
    }
    return centers;
}

bool occluded_at(const TextSpec& t, int frame) {
    for (const auto& [a, b] : t.occlusions)
        if (frame >= a && frame <= b) return true;
    return false;
}

RotatedBox box_at(const Scenario& sc, const TextSpec& t, int frame, Rng* jitter_rng) {
    RotatedBox b;
    const int dt = frame - t.birth;
    b.cx = t.cx + sc.pan_vx * frame;
    b.cy = t.cy + sc.pan_vy * frame;
    if (t.motion == Motion::kLinear) {
        b.cx += t.vx * dt;
        b.cy += t.vy * dt;
    } else if (t.motion == Motion::kJitter && jitter_rng) {
        b.cx += jitter_rng->normal(0.0, t.vx);
        b.cy += jitter_rng->normal(0.0, t.vy);
    }
    b.w = t.w;
    b.h = t.h;
    b.theta = t.theta;
    return canonicalize(b);
}

std::string random_text(Rng& rng) {
    const int len = 3 + static_cast<int>(rng.below(3));
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(static_cast<char>('A' + rng.below(26)));
    return s;
}

}  // namespace

Clip generate(const Scenario& scenario) {
    if (scenario.frame_count <= 0) throw SpecError("generate: frame_count must be positive");
    for (const TextSpec& t : scenario.texts)
        if (t.w > scenario.canvas_w || t.h > scenario.canvas_h)
            throw SpecError("generate: text larger than canvas");

    Rng rng(scenario.seed);
    auto centers = cluster_centers(static_cast<int>(scenario.texts.size()), scenario.embed_dim, rng);

    // validate live spans stay on canvas (deterministic check, no jitter)
    for (size_t k = 0; k < scenario.texts.size(); ++k) {
        const TextSpec& t = scenario.texts[k];
        const int death = t.death < 0 ? scenario.frame_count - 1 : t.death;
        for (int f = t.birth; f <= death && f < scenario.frame_count; ++f) {
            if (t.motion == Motion::kJitter) continue;
            const Polygon4 p = box_to_polygon(box_at(scenario, t, f, nullptr));
            for (const Point& v : p.v)
                if (v.x < 0 || v.y < 0 || v.x > scenario.canvas_w || v.y > scenario.canvas_h)
                    throw SpecError("generate: text leaves canvas during its live span");
        }
    }

    Clip clip;
    const NoiseSpec& nz = scenario.noise;
    for (int f = 0; f < scenario.frame_count; ++f) {
        FrameInput frame;
        frame.frame_index = f;
        std::vector<long long> labels;
        std::vector<metrics::GtEntry>& gt_frame = clip.gt[f];

        for (size_t k = 0; k < scenario.texts.size(); ++k) {
            const TextSpec& t = scenario.texts[k];
            const int death = t.death < 0 ? scenario.frame_count - 1 : t.death;
            if (f < t.birth || f > death) continue;
            if (occluded_at(t, f)) continue;

            const RotatedBox gt_box = box_at(scenario, t, f, &rng);
            gt_frame.push_back(
                {static_cast<long long>(k), box_to_polygon(gt_box), t.transcription, false});

            const bool missed = rng.uniform() < nz.miss_rate;
            RotatedBox det_box = gt_box;
            det_box.cx += rng.normal(0.0, nz.center_jitter);
            det_box.cy += rng.normal(0.0, nz.center_jitter);
            det_box.w = std::max(1.0, det_box.w + rng.normal(0.0, nz.size_jitter));
            det_box.h = std::max(1.0, det_box.h + rng.normal(0.0, nz.size_jitter));
            det_box.theta += rng.normal(0.0, nz.angle_jitter);
            det_box = canonicalize(det_box);

            Embedding emb;
            emb.frame_index = f;
            emb.values.resize(scenario.embed_dim);
            for (int i = 0; i < scenario.embed_dim; ++i)
                emb.values[i] = centers[k][i] + rng.normal(0.0, nz.embedding_sigma);
            const double conf = 0.9 + 0.1 * rng.uniform();
            if (missed) continue;

            Detection det;
            det.box = det_box;
            det.polygon = box_to_polygon(det_box);
            det.embedding = std::move(emb);
            det.embedding.detection_index = static_cast<int>(frame.detections.size());
            det.transcription = t.transcription;
            det.confidence = conf;
            frame.detections.push_back(std::move(det));
            labels.push_back(static_cast<long long>(k));
        }

        int fp_count = static_cast<int>(nz.fp_rate);
        if (rng.uniform() < nz.fp_rate - fp_count) ++fp_count;
        for (int j = 0; j < fp_count; ++j) {
            RotatedBox b;
            b.w = 20.0 + 60.0 * rng.uniform();
            b.h = 8.0 + 16.0 * rng.uniform();
            b.cx = rng.uniform(b.w, scenario.canvas_w - b.w);
            b.cy = rng.uniform(b.h, scenario.canvas_h - b.h);
            b.theta = rng.uniform(-0.3, 0.3);
            b = canonicalize(b);
            Detection det;
            det.box = b;
            det.polygon = box_to_polygon(b);
            det.embedding.frame_index = f;
            det.embedding.detection_index = static_cast<int>(frame.detections.size());
            det.embedding.values.resize(scenario.embed_dim);
            for (double& x : det.embedding.values) x = rng.normal();
            det.transcription = random_text(rng);
            det.confidence = 0.3 + 0.2 * rng.uniform();
            frame.detections.push_back(std::move(det));
            labels.push_back(-1);
        }

        if (gt_frame.empty()) clip.gt.erase(f);
        clip.frames.push_back(std::move(frame));
        clip.labels.push_back(std::move(labels));
    }
    return clip;
}

namespace {
TextSpec make_text(std::string txt, double cx, double cy, double w, double h) {
    TextSpec t;
    t.transcription = std::move(txt);
    t.cx = cx;
    t.cy = cy;
    t.w = w;
    t.h = h;
    return t;
}
}  // namespace

Scenario preset(const std::string& name) {
    Scenario sc;
    if (name == "fig3_case2") {
        // camera pan displacing every box by 1.5 box widths per frame
        sc.seed = 21;
        sc.frame_count = 8;
        sc.pan_vx = 60.0;
        sc.noise.embedding_sigma = 2.0;
        sc.noise.center_jitter = 0.3;
        sc.texts = {make_text("NORTH", 100, 100, 40, 12), make_text("SOUTH", 100, 300, 50, 14),
                    make_text("RIVER", 100, 500, 60, 16)};
    } else if (name == "fig3_case3") {
        // object motion: the movers have zero IoU between consecutive frames
        sc.seed = 22;
        sc.frame_count = 8;
        sc.noise.embedding_sigma = 2.0;
        sc.noise.center_jitter = 0.3;
        TextSpec mover1 = make_text("TAXI", 100, 100, 40, 12);
        mover1.motion = Motion::kLinear;
        mover1.vx = 60.0;
        TextSpec mover2 = make_text("BUS7", 100, 500, 40, 12);
        mover2.motion = Motion::kLinear;
        mover2.vx = 60.0;
        sc.texts = {mover1, make_text("SHOP", 600, 300, 50, 14), mover2};
    } else if (name == "occlusion_gap") {
        sc.seed = 23;
        sc.frame_count = 12;
        sc.noise.embedding_sigma = 0.05;
        TextSpec main = make_text("MAIN", 200, 200, 60, 18);
        main.occlusions = {{5, 7}};
        sc.texts = {main, make_text("SIDE", 600, 400, 50, 15)};
    } else if (name == "identical_texts") {
        sc.seed = 24;
        sc.frame_count = 15;
        sc.noise.embedding_sigma = 0.05;
        TextSpec a = make_text("EXIT", 200, 290, 40, 12);
        a.motion = Motion::kLinear;
        a.vx = 40.0;
        TextSpec b = make_text("EXIT", 800, 310, 40, 12);
        b.motion = Motion::kLinear;
        b.vx = -40.0;
        sc.texts = {a, b};
    } else if (name == "crowd") {
        sc.seed = 25;
        sc.frame_count = 10;
        sc.noise.embedding_sigma = 0.1;
        sc.noise.center_jitter = 0.5;
        for (int i = 0; i < 20; ++i) {
            TextSpec t;
            t.transcription = "T" + std::to_string(i / 10) + std::to_string(i % 10);
            t.cx = 150.0 + 240.0 * (i % 5);
            t.cy = 100.0 + 160.0 * (i / 5);
            t.w = 40.0 + 4.0 * (i % 4);
            t.h = 12.0 + 2.0 * (i % 3);
            sc.texts.push_back(t);
        }
    } else {
        throw SpecError("unknown preset '" + name + "'; valid presets: fig3_case2, fig3_case3, "
                        "occlusion_gap, identical_texts, crowd");
    }
    return sc;
}

std::vector<std::string> preset_names() {
    return {"fig3_case2", "fig3_case3", "occlusion_gap", "identical_texts", "crowd"};
}

void training_pool(const Clip& clip, Mat& pool, std::vector<FrameBlock>& frames,
                   std::vector<long long>& tracklets) {
    int rows = 0, dim = 0;
    for (size_t f = 0; f < clip.frames.size(); ++f)
        for (size_t i = 0; i < clip.frames[f].detections.size(); ++i)
            if (clip.labels[f][i] >= 0) {
                ++rows;
                dim = static_cast<int>(clip.frames[f].detections[i].embedding.values.size());
            }
    pool = Mat(rows, dim);
    frames.clear();
    tracklets.clear();
    int row = 0;
    for (size_t f = 0; f < clip.frames.size(); ++f) {
        FrameBlock fb;
        fb.frame_index = clip.frames[f].frame_index;
        fb.col_begin = row;
        fb.col_count = 0;
        for (size_t i = 0; i < clip.frames[f].detections.size(); ++i) {
            if (clip.labels[f][i] < 0) continue;
            const auto& vals = clip.frames[f].detections[i].embedding.values;
            std::copy(vals.begin(), vals.end(), pool.row(row));
            tracklets.push_back(clip.labels[f][i]);
            ++row;
            ++fb.col_count;
        }
        frames.push_back(fb);
    }
}

}  // namespace synth
}  // namespace glots
