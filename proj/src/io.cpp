#include "glots/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace glots {
namespace io {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
    return out;
}

Polygon4 poly_from_json(const json& arr, const std::string& path, long line) {
    if (!arr.is_array() || arr.size() != 8)
        throw ParseError(path, line, "poly must hold 8 numbers");
    Polygon4 p;
    for (int i = 0; i < 4; ++i) {
        p.v[i].x = arr[2 * i].get<double>();
        p.v[i].y = arr[2 * i + 1].get<double>();
    }
    if (polygon_area(p) <= 0.0) throw ParseError(path, line, "degenerate polygon");
    return p;
}

json poly_to_json(const Polygon4& p) {
    json arr = json::array();
    for (const Point& v : p.v) {
        arr.push_back(v.x);
        arr.push_back(v.y);
    }
    return arr;
}

json parse_line(const std::string& s, const std::string& path, long line) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(path, line, "invalid record");
    return j;
}

}  // namespace

std::map<std::string, std::vector<FrameInput>> read_detections(const std::string& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, std::map<int, FrameInput>> by_frame;
    std::string s;
    long line = 0;
    while (std::getline(in, s)) {
        ++line;
        if (s.empty()) continue;
        json j = parse_line(s, path, line);
        try {
            const std::string video = j.at("video").get<std::string>();
            const int frame = j.at("frame").get<int>();
            Detection det;
            det.polygon = poly_from_json(j.at("poly"), path, line);
            det.box = min_area_rotated_box(det.polygon);
            det.confidence = j.value("conf", 1.0);
            det.transcription = j.value("text", std::string());
            det.embedding.frame_index = frame;
            det.embedding.detection_index = j.value("det", 0);
            if (j.contains("emb")) det.embedding.values = j.at("emb").get<std::vector<double>>();
            FrameInput& fi = by_frame[video][frame];
            fi.frame_index = frame;
            fi.detections.push_back(std::move(det));
        } catch (const json::exception& e) {
            throw ParseError(path, line, e.what());
        }
    }
    std::map<std::string, std::vector<FrameInput>> out;
    for (auto& [video, frames] : by_frame) {
        auto& vec = out[video];
        for (auto& [_, fi] : frames) vec.push_back(std::move(fi));
    }
    return out;
}

void write_detections(const std::string& path, const std::string& video_id,
                      const std::vector<FrameInput>& frames) {
    std::ofstream out = open_out(path);
    for (const FrameInput& fi : frames) {
        for (size_t i = 0; i < fi.detections.size(); ++i) {
            const Detection& det = fi.detections[i];
            json j;
            j["video"] = video_id;
            j["frame"] = fi.frame_index;
            j["det"] = static_cast<int>(i);
            j["poly"] = poly_to_json(det.polygon);
            j["conf"] = det.confidence;
            if (!det.embedding.values.empty()) j["emb"] = det.embedding.values;
            if (!det.transcription.empty()) j["text"] = det.transcription;
            out << j.dump() << '\n';
        }
    }
}

std::map<std::string, metrics::GtSequence> read_ground_truth(const std::string& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, metrics::GtSequence> out;
    std::string s;
    long line = 0;
    while (std::getline(in, s)) {
        ++line;
        if (s.empty()) continue;
        json j = parse_line(s, path, line);
        try {
            metrics::GtEntry e;
            e.track_id = j.at("track").get<long long>();
            e.polygon = poly_from_json(j.at("poly"), path, line);
            e.transcription = j.value("text", std::string());
            e.ignore = j.value("ignore", false);
            out[j.at("video").get<std::string>()][j.at("frame").get<int>()].push_back(std::move(e));
        } catch (const json::exception& e) {
            throw ParseError(path, line, e.what());
        }
    }
    return out;
}

void write_ground_truth(const std::string& path, const std::string& video_id,
                        const metrics::GtSequence& gt) {
    std::ofstream out = open_out(path);
    for (const auto& [frame, entries] : gt) {
        for (const metrics::GtEntry& e : entries) {
            json j;
            j["video"] = video_id;
            j["frame"] = frame;
            j["track"] = e.track_id;
            j["poly"] = poly_to_json(e.polygon);
            j["text"] = e.transcription;
            j["ignore"] = e.ignore;
            out << j.dump() << '\n';
        }
    }
}

std::map<std::string, metrics::PredSequence> read_tracks(const std::string& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, metrics::PredSequence> out;
    std::string s;
    long line = 0;
    while (std::getline(in, s)) {
        ++line;
        if (s.empty()) continue;
        json j = parse_line(s, path, line);
        try {
            metrics::PredEntry e;
            e.track_id = j.at("track").get<long long>();
            e.polygon = poly_from_json(j.at("poly"), path, line);
            e.transcription = j.value("text", std::string());
            out[j.at("video").get<std::string>()][j.at("frame").get<int>()].push_back(std::move(e));
        } catch (const json::exception& e) {
            throw ParseError(path, line, e.what());
        }
    }
    return out;
}

void write_tracks(const std::string& path,
                  const std::map<std::string, std::vector<TrackRecord>>& per_video) {
    std::ofstream out = open_out(path);
    for (const auto& [video, records] : per_video) {
        // frame-major output: collect and sort by (frame, track)
        std::vector<std::tuple<int, long long, const TrackEntry*, const TrackRecord*>> rows;
        for (const TrackRecord& rec : records)
            for (const TrackEntry& e : rec.entries)
                rows.emplace_back(e.frame_index, rec.tracklet_id, &e, &rec);
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return std::tie(std::get<0>(a), std::get<1>(a)) <
                   std::tie(std::get<0>(b), std::get<1>(b));
        });
        for (const auto& [frame, track, e, rec] : rows) {
            json j;
            j["video"] = video;
            j["frame"] = frame;
            j["track"] = track;
            j["poly"] = poly_to_json(e->polygon);
            j["text"] = transcription_vote(*rec);
            j["score"] = e->score;
            out << j.dump() << '\n';
        }
    }
}

void apply_config_line(TrackerConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "window") {
        cfg.window = std::stoi(value);
    } else if (key == "alpha") {
        cfg.alpha = std::stod(value);
    } else if (key == "new_track_threshold") {
        cfg.new_track_threshold = std::stod(value);
    } else if (key == "tracklet_agg") {
        if (value == "mean")
            cfg.tracklet_agg = TrackletAgg::kMean;
        else if (value == "sum")
            cfg.tracklet_agg = TrackletAgg::kSum;
        else
            throw ValidationError("tracklet_agg must be mean or sum");
    } else if (key == "gaussian_variant") {
        if (value == "paper")
            cfg.gaussian_variant = GaussianVariant::kPaper;
        else if (value == "squared")
            cfg.gaussian_variant = GaussianVariant::kSquared;
        else
            throw ValidationError("gaussian_variant must be paper or squared");
    } else if (key == "clamp_positional") {
        cfg.clamp_positional = value == "1" || value == "true";
    } else if (key == "positional") {
        if (value == "wasserstein")
            cfg.positional = PositionalMode::kWasserstein;
        else if (value == "iou")
            cfg.positional = PositionalMode::kIoU;
        else if (value == "none")
            cfg.positional = PositionalMode::kNone;
        else
            throw ValidationError("positional must be wasserstein, iou or none");
    } else if (key == "confidence_floor") {
        cfg.confidence_floor = std::stod(value);
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

TrackerConfig read_config(const std::string& path) {
    std::ifstream in = open_in(path);
    TrackerConfig cfg;
    std::string s;
    long line = 0;
    while (std::getline(in, s)) {
        ++line;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s.erase(hash);
        const auto eq = s.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
        };
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) continue;
        try {
            apply_config_line(cfg, key, value);
        } catch (const std::invalid_argument&) {
            throw ParseError(path, line, "bad value for '" + key + "'");
        }
    }
    if (cfg.window < 2) throw ValidationError("window must be >= 2");
    return cfg;
}

void write_config(const std::string& path, const TrackerConfig& cfg) {
    std::ofstream out = open_out(path);
    out << "window = " << cfg.window << '\n';
    out << "alpha = " << cfg.alpha << '\n';
    out << "new_track_threshold = " << cfg.new_track_threshold << '\n';
    out << "tracklet_agg = " << (cfg.tracklet_agg == TrackletAgg::kMean ? "mean" : "sum") << '\n';
    out << "gaussian_variant = "
        << (cfg.gaussian_variant == GaussianVariant::kPaper ? "paper" : "squared") << '\n';
    out << "clamp_positional = " << (cfg.clamp_positional ? 1 : 0) << '\n';
    const char* pos = cfg.positional == PositionalMode::kWasserstein ? "wasserstein"
                      : cfg.positional == PositionalMode::kIoU       ? "iou"
                                                                     : "none";
    out << "positional = " << pos << '\n';
    out << "confidence_floor = " << cfg.confidence_floor << '\n';
}

void save_model(const std::string& path, const AssocModel& model) {
    std::ofstream out = open_out(path);
    out.precision(17);
    out << "glots-ckpt v1 " << model.dim << ' ' << model.heads << ' ' << model.ff << '\n';
    out << "empty_logit " << model.empty_logit << '\n';
    for (const auto& [name, m] : model.mats()) {
        out << "mat " << name << ' ' << m->rows << ' ' << m->cols << '\n';
        for (int r = 0; r < m->rows; ++r) {
            for (int c = 0; c < m->cols; ++c) out << (c ? " " : "") << (*m)(r, c);
            out << '\n';
        }
    }
}

AssocModel load_model(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string magic, version;
    int dim, heads, ff;
    if (!(in >> magic >> version >> dim >> heads >> ff) || magic != "glots-ckpt" || version != "v1")
        throw ParseError(path, 1, "not a glots-ckpt v1 file");
    AssocModel model = AssocModel::init(dim, heads, 0);
    if (model.ff != ff) throw ParseError(path, 1, "feed-forward width mismatch");
    std::string tag;
    if (!(in >> tag >> model.empty_logit) || tag != "empty_logit")
        throw ParseError(path, 2, "missing empty_logit");
    auto views = model.mats();
    for (auto& [name, m] : views) {
        std::string kind, got;
        int rows, cols;
        if (!(in >> kind >> got >> rows >> cols) || kind != "mat" || got != name ||
            rows != m->rows || cols != m->cols)
            throw ParseError(path, 0, "malformed weight block for " + name);
        for (double& x : m->a)
            if (!(in >> x)) throw ParseError(path, 0, "truncated weights for " + name);
    }
    return model;
}

std::string format_report(const metrics::MetricsReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "MOTA " << rep.mota << '\n';
    os << "MOTP " << rep.motp << '\n';
    os << "IDF1 " << rep.idf1 << '\n';
    os << "MM " << rep.mm << '\n';
    os << "ML " << rep.ml << '\n';
    os << "FP " << rep.fp << '\n';
    os << "FN " << rep.fn << '\n';
    os << "IDSW " << rep.idsw << '\n';
    os << "GT " << rep.gt << '\n';
    os << "MATCHES " << rep.matches << '\n';
    for (const auto& vc : rep.per_video) {
        os << "VIDEO " << vc.video << " gt " << vc.gt << " fp " << vc.fp << " fn " << vc.fn
           << " idsw " << vc.idsw << '\n';
    }
    return os.str();
}

void write_report(const std::string& path, const metrics::MetricsReport& rep) {
    std::ofstream out = open_out(path);
    out << format_report(rep);
}

}  // namespace io
}  // namespace glots
