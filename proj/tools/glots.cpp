#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "glots/io.hpp"
#include "glots/synth.hpp"
#include "glots/tracker.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace glots;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

synth::Scenario scenario_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("scenario file is not valid JSON: " + path);
    synth::Scenario sc;
    sc.seed = j.value("seed", sc.seed);
    sc.frame_count = j.value("frames", sc.frame_count);
    sc.canvas_w = j.value("canvas_w", sc.canvas_w);
    sc.canvas_h = j.value("canvas_h", sc.canvas_h);
    sc.pan_vx = j.value("pan_vx", 0.0);
    sc.pan_vy = j.value("pan_vy", 0.0);
    sc.embed_dim = j.value("embed_dim", sc.embed_dim);
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        sc.noise.center_jitter = n.value("center_jitter", 0.0);
        sc.noise.size_jitter = n.value("size_jitter", 0.0);
        sc.noise.angle_jitter = n.value("angle_jitter", 0.0);
        sc.noise.embedding_sigma = n.value("embedding_sigma", 0.0);
        sc.noise.fp_rate = n.value("fp_rate", 0.0);
        sc.noise.miss_rate = n.value("miss_rate", 0.0);
    }
    for (const auto& t : j.value("texts", nlohmann::json::array())) {
        synth::TextSpec ts;
        ts.transcription = t.value("text", std::string());
        ts.cx = t.value("cx", 0.0);
        ts.cy = t.value("cy", 0.0);
        ts.w = t.value("w", 40.0);
        ts.h = t.value("h", 12.0);
        ts.theta = t.value("theta", 0.0);
        const std::string motion = t.value("motion", "static");
        if (motion == "linear")
            ts.motion = synth::Motion::kLinear;
        else if (motion == "jitter")
            ts.motion = synth::Motion::kJitter;
        else if (motion != "static")
            throw ValidationError("unknown motion '" + motion + "'");
        ts.vx = t.value("vx", 0.0);
        ts.vy = t.value("vy", 0.0);
        ts.birth = t.value("birth", 0);
        ts.death = t.value("death", -1);
        for (const auto& occ : t.value("occlusions", nlohmann::json::array()))
            ts.occlusions.emplace_back(occ[0].get<int>(), occ[1].get<int>());
        sc.texts.push_back(std::move(ts));
    }
    return sc;
}

RotatedBox parse_box_arg(const std::string& s) {
    std::stringstream ss(s);
    RotatedBox b;
    char c;
    if (!(ss >> b.cx >> c >> b.cy >> c >> b.w >> c >> b.h >> c >> b.theta))
        throw ValidationError("box must be cx,cy,w,h,theta: '" + s + "'");
    if (b.w <= 0 || b.h <= 0) throw ValidationError("box sides must be positive");
    return canonicalize(b);
}

int cmd_simulate(const std::string& preset, const std::string& scenario_path, long long seed,
                 const std::string& out_dir, const std::string& video_id) {
    synth::Scenario sc = preset.empty() ? scenario_from_json(scenario_path) : synth::preset(preset);
    if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
    synth::Clip clip = synth::generate(sc);
    fs::create_directories(out_dir);
    io::write_detections((fs::path(out_dir) / "detections.jsonl").string(), video_id, clip.frames);
    io::write_ground_truth((fs::path(out_dir) / "gt.jsonl").string(), video_id, clip.gt);
    std::cout << "wrote " << clip.frames.size() << " frames to " << out_dir << "\n";
    return kExitOk;
}

int cmd_track(const std::string& det_path, const std::string& config_path,
              const std::string& model_path, const std::string& out_path,
              const std::vector<std::pair<std::string, std::string>>& overrides) {
    TrackerConfig cfg;
    std::string cfg_file = config_path;
    if (cfg_file.empty())
        if (const char* env = std::getenv("GLOTS_CONFIG")) cfg_file = env;
    if (!cfg_file.empty()) cfg = io::read_config(cfg_file);
    for (const auto& [k, v] : overrides) io::apply_config_line(cfg, k, v);

    std::optional<AssocModel> model;
    if (!model_path.empty()) model = io::load_model(model_path);

    auto videos = io::read_detections(det_path);
    std::vector<std::string> ids;
    ids.reserve(videos.size());
    for (const auto& [id, _] : videos) ids.push_back(id);

    std::map<std::string, std::vector<TrackRecord>> results;
    std::vector<std::vector<TrackRecord>> slots(ids.size());
    double assoc_ms = 0.0;
    long long total_frames = 0;
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) reduction(+ : assoc_ms, total_frames)
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
        try {
            double ms = 0.0;
            slots[i] = run_video(cfg, videos.at(ids[i]), model, &ms);
            assoc_ms += ms;
            total_frames += static_cast<long long>(videos.at(ids[i]).size());
        } catch (...) {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    long long total_tracks = 0;
    for (size_t i = 0; i < ids.size(); ++i) {
        total_tracks += static_cast<long long>(slots[i].size());
        results[ids[i]] = std::move(slots[i]);
    }
    io::write_tracks(out_path, results);
    std::cout << "videos " << ids.size() << " frames " << total_frames << " tracks " << total_tracks
              << " assoc_ms_per_frame "
              << (total_frames ? assoc_ms / static_cast<double>(total_frames) : 0.0) << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& gt_path, const std::string& tracks_path, const std::string& mode,
             double iou_threshold, double max_edit_ratio, bool text_only,
             const std::string& report_path) {
    auto gt = io::read_ground_truth(gt_path);
    auto preds = io::read_tracks(tracks_path);
    std::string missing;
    for (const auto& [video, _] : preds)
        if (!gt.count(video)) missing += (missing.empty() ? "" : ", ") + video;
    if (!missing.empty())
        throw ValidationError("track videos missing from ground truth: " + missing);

    metrics::EvalConfig cfg;
    if (mode == "tracking")
        cfg.mode = metrics::EvalMode::kTracking;
    else if (mode == "spotting")
        cfg.mode = metrics::EvalMode::kSpotting;
    else
        throw ValidationError("mode must be tracking or spotting");
    cfg.iou_threshold = iou_threshold;
    cfg.max_edit_ratio = max_edit_ratio;
    cfg.spotting_require_iou = !text_only;

    metrics::MetricsReport rep = metrics::compute_report(gt, preds, cfg);
    std::cout << io::format_report(rep);
    if (!report_path.empty()) io::write_report(report_path, rep);
    return kExitOk;
}

int cmd_train_toy(const std::string& preset, long long seed, int dim, int heads, int steps,
                  double lr, const std::string& ckpt_path, const std::string& trace_path) {
    synth::Scenario sc = synth::preset(preset);
    if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
    sc.embed_dim = dim;
    synth::Clip clip = synth::generate(sc);
    Mat pool;
    std::vector<FrameBlock> frames;
    std::vector<long long> tracklets;
    synth::training_pool(clip, pool, frames, tracklets);

    AssocModel model = AssocModel::init(dim, heads, sc.seed + 1);
    // mean reduction keeps the step size meaningful for any pool size
    TrainResult r = train_toy(model, pool, frames, tracklets, steps, lr, true);
    io::save_model(ckpt_path, r.model);
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        out.precision(17);
        for (size_t i = 0; i < r.loss_trace.size(); ++i) out << i << ' ' << r.loss_trace[i] << '\n';
    }
    std::cout << "initial_loss " << r.loss_trace.front() << " final_loss " << r.loss_trace.back()
              << " steps " << steps << "\n";
    return kExitOk;
}

int cmd_dist(const std::string& box1, const std::string& box2, double alpha,
             const std::string& variant) {
    const RotatedBox b1 = parse_box_arg(box1), b2 = parse_box_arg(box2);
    GaussianVariant gv;
    if (variant == "paper")
        gv = GaussianVariant::kPaper;
    else if (variant == "squared")
        gv = GaussianVariant::kSquared;
    else
        throw ValidationError("variant must be paper or squared");
    const Gaussian2 g1 = box_to_gaussian(b1, gv), g2 = box_to_gaussian(b2, gv);
    std::cout.precision(10);
    std::cout << "g1 mu (" << g1.mx << ", " << g1.my << ") sigma [" << g1.sxx << " " << g1.sxy
              << "; " << g1.sxy << " " << g1.syy << "]\n";
    std::cout << "g2 mu (" << g2.mx << ", " << g2.my << ") sigma [" << g2.sxx << " " << g2.sxy
              << "; " << g2.sxy << " " << g2.syy << "]\n";
    std::cout << "wasserstein_d " << wasserstein_distance(g1, g2) << "\n";
    std::cout << "positional_score " << positional_score(b1, b2, alpha, gv) << "\n";
    return kExitOk;
}

int cmd_bench(int texts, int window, int frames, int dim, int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    synth::Scenario sc = synth::preset("crowd");
    sc.embed_dim = dim;
    sc.frame_count = frames;
    if (texts != 20) {
        sc.texts.resize(std::min<size_t>(sc.texts.size(), static_cast<size_t>(texts)));
        while (static_cast<int>(sc.texts.size()) < texts) {
            const size_t n = sc.texts.size();
            synth::TextSpec t;
            t.transcription = "X" + std::to_string(n);
            t.cx = 100.0 + 50.0 * static_cast<double>((n * 37) % 20);
            t.cy = 80.0 + 30.0 * static_cast<double>((n * 13) % 18);
            sc.texts.push_back(t);
        }
    }
    synth::Clip clip = synth::generate(sc);

    TrackerConfig cfg;
    cfg.window = window;
    AssocModel model = AssocModel::init(dim, 4, 99);
    Tracker tracker(cfg, model);
    std::vector<double> ms;
    for (const FrameInput& f : clip.frames) {
        const double before = tracker.association_ms();
        tracker.step(f);
        ms.push_back(tracker.association_ms() - before);
    }
    // first frame is birth-only, no association
    if (!ms.empty()) ms.erase(ms.begin());
    std::sort(ms.begin(), ms.end());
    auto pct = [&](double p) {
        if (ms.empty()) return 0.0;
        const size_t i = static_cast<size_t>(p * (ms.size() - 1));
        return ms[i];
    };
    std::cout << "frames " << ms.size() << " texts " << texts << " window " << window << " dim "
              << dim << "\n";
    std::cout << "assoc_ms p50 " << pct(0.5) << " p95 " << pct(0.95) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"video text tracking toolchain"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic clip");
    std::string sim_preset, sim_scenario, sim_out = "clip", sim_video = "v0";
    long long sim_seed = -1;
    sim->add_option("--preset", sim_preset, "preset scenario name");
    sim->add_option("--scenario", sim_scenario, "scenario JSON file");
    sim->add_option("--out", sim_out, "output directory");
    sim->add_option("--seed", sim_seed, "override scenario seed");
    sim->add_option("--video", sim_video, "video id to stamp on records");

    // track
    auto* trk = app.add_subcommand("track", "run the tracker over a detection file");
    std::string trk_det, trk_cfg, trk_model, trk_out = "tracks.jsonl";
    trk->add_option("--detections", trk_det, "detection file")->required();
    trk->add_option("--config", trk_cfg, "config file (default $GLOTS_CONFIG)");
    trk->add_option("--model", trk_model, "association model checkpoint");
    trk->add_option("--out", trk_out, "output track file");
    std::vector<std::pair<std::string, std::string>> overrides;
    int trk_window = -1;
    double trk_alpha = NAN, trk_thresh = NAN;
    std::string trk_positional, trk_agg, trk_variant;
    trk->add_option("--window", trk_window, "sliding window size");
    trk->add_option("--alpha", trk_alpha, "positional score alpha");
    trk->add_option("--threshold", trk_thresh, "new-track threshold");
    trk->add_option("--positional", trk_positional, "wasserstein|iou|none");
    trk->add_option("--tracklet-agg", trk_agg, "mean|sum");
    trk->add_option("--gaussian-variant", trk_variant, "paper|squared");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate tracks against ground truth");
    std::string ev_gt, ev_tracks, ev_mode = "tracking", ev_report;
    double ev_iou = 0.5, ev_edit = 0.0;
    bool ev_text_only = false;
    ev->add_option("--gt", ev_gt, "ground truth file")->required();
    ev->add_option("--tracks", ev_tracks, "track file")->required();
    ev->add_option("--mode", ev_mode, "tracking|spotting");
    ev->add_option("--iou-threshold", ev_iou, "IoU match threshold");
    ev->add_option("--max-edit-ratio", ev_edit, "spotting: tolerated edit-distance ratio");
    ev->add_flag("--text-only", ev_text_only, "spotting: skip the spatial IoU requirement");
    ev->add_option("--report", ev_report, "also write a key-value report file");

    // train-toy
    auto* tt = app.add_subcommand("train-toy", "fit the association model on a synthetic clip");
    std::string tt_preset = "crowd", tt_ckpt = "model.ckpt", tt_trace;
    long long tt_seed = -1;
    int tt_dim = 64, tt_heads = 4, tt_steps = 200;
    double tt_lr = 0.5;
    tt->add_option("--preset", tt_preset, "training scenario preset");
    tt->add_option("--seed", tt_seed, "override scenario seed");
    tt->add_option("--dim", tt_dim, "embedding width");
    tt->add_option("--heads", tt_heads, "attention heads");
    tt->add_option("--steps", tt_steps, "gradient steps");
    tt->add_option("--lr", tt_lr, "learning rate");
    tt->add_option("--out", tt_ckpt, "checkpoint output path");
    tt->add_option("--trace", tt_trace, "loss trace output path");

    // dist
    auto* ds = app.add_subcommand("dist", "debug Wasserstein distance between two boxes");
    std::string ds_b1, ds_b2, ds_variant = "paper";
    double ds_alpha = 1.0;
    ds->add_option("box1", ds_b1, "cx,cy,w,h,theta")->required();
    ds->add_option("box2", ds_b2, "cx,cy,w,h,theta")->required();
    ds->add_option("--alpha", ds_alpha, "score hyper-parameter");
    ds->add_option("--variant", ds_variant, "paper|squared");

    // bench
    auto* bn = app.add_subcommand("bench", "association latency over a generated crowd clip");
    int bn_texts = 20, bn_window = 8, bn_frames = 40, bn_dim = 64, bn_threads = 0;
    bn->add_option("--texts", bn_texts, "concurrent texts");
    bn->add_option("--window", bn_window, "sliding window size");
    bn->add_option("--frames", bn_frames, "clip length");
    bn->add_option("--dim", bn_dim, "embedding width");
    bn->add_option("--threads", bn_threads, "OpenMP threads (0 = default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            if (sim_preset.empty() == sim_scenario.empty()) {
                std::cerr << "simulate: give exactly one of --preset or --scenario\n";
                return kExitUsage;
            }
            return cmd_simulate(sim_preset, sim_scenario, sim_seed, sim_out, sim_video);
        }
        if (trk->parsed()) {
            if (trk_window > 0) overrides.emplace_back("window", std::to_string(trk_window));
            if (!std::isnan(trk_alpha)) overrides.emplace_back("alpha", std::to_string(trk_alpha));
            if (!std::isnan(trk_thresh))
                overrides.emplace_back("new_track_threshold", std::to_string(trk_thresh));
            if (!trk_positional.empty()) overrides.emplace_back("positional", trk_positional);
            if (!trk_agg.empty()) overrides.emplace_back("tracklet_agg", trk_agg);
            if (!trk_variant.empty()) overrides.emplace_back("gaussian_variant", trk_variant);
            return cmd_track(trk_det, trk_cfg, trk_model, trk_out, overrides);
        }
        if (ev->parsed())
            return cmd_eval(ev_gt, ev_tracks, ev_mode, ev_iou, ev_edit, ev_text_only, ev_report);
        if (tt->parsed())
            return cmd_train_toy(tt_preset, tt_seed, tt_dim, tt_heads, tt_steps, tt_lr, tt_ckpt,
                                 tt_trace);
        if (ds->parsed()) return cmd_dist(ds_b1, ds_b2, ds_alpha, ds_variant);
        if (bn->parsed()) return cmd_bench(bn_texts, bn_window, bn_frames, bn_dim, bn_threads);
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
