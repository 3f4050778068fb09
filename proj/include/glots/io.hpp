#pragma once

#include <map>
#include <string>
#include <vector>

#include "glots/assoc.hpp"
#include "glots/metrics.hpp"
#include "glots/synth.hpp"
#include "glots/tracker.hpp"

namespace glots {
namespace io {

// All list files are line-delimited JSON records, one object per line.

// Detection records: video, frame, det, poly[8], conf, optional emb, text.
std::map<std::string, std::vector<FrameInput>> read_detections(const std::string& path);
void write_detections(const std::string& path, const std::string& video_id,
                      const std::vector<FrameInput>& frames);

// Ground-truth records: video, frame, track, poly[8], text, ignore.
std::map<std::string, metrics::GtSequence> read_ground_truth(const std::string& path);
void write_ground_truth(const std::string& path, const std::string& video_id,
                        const metrics::GtSequence& gt);

// Track records: video, frame, track, poly[8], text, score.
std::map<std::string, metrics::PredSequence> read_tracks(const std::string& path);
void write_tracks(const std::string& path,
                  const std::map<std::string, std::vector<TrackRecord>>& per_video);

// Simple key = value config file mirroring TrackerConfig.
TrackerConfig read_config(const std::string& path);
void write_config(const std::string& path, const TrackerConfig& cfg);
void apply_config_line(TrackerConfig& cfg, const std::string& key, const std::string& value);

// Model checkpoint: text header (version, dims) + row-major weight dumps.
void save_model(const std::string& path, const AssocModel& model);
AssocModel load_model(const std::string& path);

// Metrics report as "KEY value" lines.
void write_report(const std::string& path, const metrics::MetricsReport& rep);
std::string format_report(const metrics::MetricsReport& rep);

}  // namespace io
}  // namespace glots
