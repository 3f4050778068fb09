#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "glots/io.hpp"
#include "glots/rng.hpp"
#include "glots/synth.hpp"

using namespace glots;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("io_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) const {
        std::ofstream out(path);
        out << content;
    }
    std::string read() const {
        std::ifstream in(path);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
};

}  // namespace

TEST_CASE("detections survive a write/read round trip") {
    synth::Scenario sc = synth::preset("fig3_case2");
    sc.embed_dim = 8;
    const synth::Clip clip = synth::generate(sc);

    TempFile f("det.jsonl");
    io::write_detections(f.path, "vid", clip.frames);
    const auto back = io::read_detections(f.path);
    REQUIRE(back.count("vid") == 1);
    const auto& frames = back.at("vid");
    REQUIRE(frames.size() == clip.frames.size());
    for (size_t i = 0; i < frames.size(); ++i) {
        CHECK(frames[i].frame_index == clip.frames[i].frame_index);
        REQUIRE(frames[i].detections.size() == clip.frames[i].detections.size());
        for (size_t j = 0; j < frames[i].detections.size(); ++j) {
            const Detection& a = frames[i].detections[j];
            const Detection& b = clip.frames[i].detections[j];
            CHECK(a.confidence == b.confidence);
            CHECK(a.transcription == b.transcription);
            CHECK(a.embedding.values == b.embedding.values);
            for (int v = 0; v < 4; ++v) {
                CHECK(a.polygon.v[v].x == b.polygon.v[v].x);
                CHECK(a.polygon.v[v].y == b.polygon.v[v].y);
            }
        }
    }
    // doubles print at round-trip precision: rewriting is byte-identical
    const std::string first = f.read();
    io::write_detections(f.path, "vid", frames);
    CHECK(f.read() == first);
}

TEST_CASE("ground truth survives a round trip") {
    metrics::GtSequence gt;
    gt[0] = {{3, box_to_polygon({100, 100, 40, 12, 0.1}), "CAFE", false},
             {4, box_to_polygon({300, 200, 50, 14, 0.0}), "", true}};
    gt[2] = {{3, box_to_polygon({110, 100, 40, 12, 0.1}), "CAFE", false}};

    TempFile f("gt.jsonl");
    io::write_ground_truth(f.path, "vid", gt);
    const auto back = io::read_ground_truth(f.path);
    const auto& seq = back.at("vid");
    REQUIRE(seq.size() == 2);
    REQUIRE(seq.at(0).size() == 2);
    CHECK(seq.at(0)[0].track_id == 3);
    CHECK(seq.at(0)[0].transcription == "CAFE");
    CHECK(seq.at(0)[1].ignore);
    CHECK(seq.at(2)[0].polygon.v[0].x == gt.at(2)[0].polygon.v[0].x);
}

TEST_CASE("track output is sorted by frame then track id") {
    TrackRecord r0, r1;
    r0.tracklet_id = 1;
    r0.entries.push_back({0, box_to_polygon({100, 100, 40, 12, 0}), "AA", 1.0, 1.0});
    r0.entries.push_back({1, box_to_polygon({110, 100, 40, 12, 0}), "AA", 1.0, 0.9});
    r1.tracklet_id = 0;
    r1.entries.push_back({1, box_to_polygon({500, 300, 40, 12, 0}), "BB", 1.0, 1.0});

    TempFile f("trk.jsonl");
    io::write_tracks(f.path, {{"vid", {r0, r1}}});
    const auto back = io::read_tracks(f.path);
    const auto& seq = back.at("vid");
    REQUIRE(seq.at(1).size() == 2);
    CHECK(seq.at(1)[0].track_id == 0);  // lower id first within the frame
    CHECK(seq.at(1)[1].track_id == 1);
    CHECK(seq.at(0)[0].transcription == "AA");
}

TEST_CASE("parse errors carry the offending line number") {
    TempFile f("bad.jsonl");
    f.write(R"({"video":"v","frame":0,"track":0,"poly":[0,0,1,0,1,1,0,1],"text":""})"
            "\nnot json\n");
    try {
        io::read_ground_truth(f.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find(f.path) != std::string::npos);
    }

    TempFile g("badpoly.jsonl");
    g.write(R"({"video":"v","frame":0,"track":0,"poly":[0,0,1,0],"text":""})"
            "\n");
    try {
        io::read_ground_truth(g.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }

    CHECK_THROWS_AS(io::read_detections("does_not_exist.jsonl"), std::ios_base::failure);
}

TEST_CASE("config files round trip and reject bad input") {
    TrackerConfig cfg;
    cfg.window = 5;
    cfg.alpha = 0.25;
    cfg.new_track_threshold = 0.4;
    cfg.tracklet_agg = TrackletAgg::kSum;
    cfg.gaussian_variant = GaussianVariant::kSquared;
    cfg.clamp_positional = false;
    cfg.positional = PositionalMode::kIoU;
    cfg.confidence_floor = 0.1;

    TempFile f("cfg.txt");
    io::write_config(f.path, cfg);
    const TrackerConfig back = io::read_config(f.path);
    CHECK(back.window == 5);
    CHECK(back.alpha == 0.25);
    CHECK(back.new_track_threshold == 0.4);
    CHECK(back.tracklet_agg == TrackletAgg::kSum);
    CHECK(back.gaussian_variant == GaussianVariant::kSquared);
    CHECK(back.clamp_positional == false);
    CHECK(back.positional == PositionalMode::kIoU);
    CHECK(back.confidence_floor == 0.1);

    TempFile g("cfg2.txt");
    g.write("window = 6  # comment\n\n# full-line comment\nalpha=0.5\n");
    const TrackerConfig c2 = io::read_config(g.path);
    CHECK(c2.window == 6);
    CHECK(c2.alpha == 0.5);

    TrackerConfig scratch;
    CHECK_THROWS_AS(io::apply_config_line(scratch, "no_such_key", "1"), ValidationError);
    CHECK_THROWS_AS(io::apply_config_line(scratch, "tracklet_agg", "median"), ValidationError);

    TempFile h("cfg3.txt");
    h.write("window = 1\n");
    CHECK_THROWS_AS(io::read_config(h.path), ValidationError);

    TempFile k("cfg4.txt");
    k.write("alpha = banana\n");
    CHECK_THROWS_AS(io::read_config(k.path), ParseError);
}

TEST_CASE("model checkpoints restore every parameter exactly") {
    AssocModel model = AssocModel::init(8, 2, 99);
    // trained checkpoints hold arbitrary values, including the empty logit
    Rng rng(1);
    model.empty_logit = rng.normal();
    for (auto& [name, m] : model.mats())
        for (double& x : m->a) x += 0.001 * rng.normal();

    TempFile f("model.ckpt");
    io::save_model(f.path, model);
    const AssocModel back = io::load_model(f.path);
    CHECK(back.dim == model.dim);
    CHECK(back.heads == model.heads);
    CHECK(back.ff == model.ff);
    CHECK(back.empty_logit == model.empty_logit);
    const auto a = model.mats();
    const auto b = back.mats();
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].second->a == b[i].second->a);

    TempFile g("bogus.ckpt");
    g.write("something else\n");
    CHECK_THROWS_AS(io::load_model(g.path), ParseError);
}

TEST_CASE("report formatting lists totals and per-video lines") {
    metrics::MetricsReport rep;
    rep.mota = 0.75;
    rep.idf1 = 0.5;
    rep.fp = 1;
    rep.fn = 2;
    metrics::VideoCounts vc;
    vc.video = "clip1";
    vc.fn = 2;
    rep.per_video.push_back(vc);
    const std::string text = io::format_report(rep);
    CHECK(text.find("MOTA 0.75") != std::string::npos);
    CHECK(text.find("IDF1 0.5") != std::string::npos);
    CHECK(text.find("FN 2") != std::string::npos);
    CHECK(text.find("VIDEO clip1") != std::string::npos);
}
