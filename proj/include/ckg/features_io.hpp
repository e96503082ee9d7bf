#pragma once

// Frame and scene I/O for the visual feature pipeline: binary P6 PPM codec,
// per-scene frame discovery, JSONL scene manifests, and the features CSV.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckg/csv.hpp"
#include "ckg/errors.hpp"
#include "ckg/features.hpp"
#include "ckg/text.hpp"

namespace ckg {

inline constexpr const char* kFeaturesHeader =
    "scene_id,frame_count_sampled,motion,brightness,contrast,saturation,tvi";

namespace detail {

// Reads one whitespace-delimited header token, skipping '#' comments.
inline std::string ppm_token(std::istream& in, const std::string& path) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    if (token.empty()) throw IoFailure("truncated PPM header in " + path);
    return token;
}

inline int ppm_int(std::istream& in, const std::string& path, const char* what) {
    const std::string token = ppm_token(in, path);
    int value = 0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end || value <= 0) {
        throw IoFailure(std::string("invalid PPM ") + what + " \"" + token + "\" in " + path);
    }
    return value;
}

}  // namespace detail

inline Frame read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open PPM file " + path);
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (!in || magic != "P6") throw IoFailure("not a binary P6 PPM file: " + path);

    Frame frame;
    frame.width = detail::ppm_int(in, path, "width");
    frame.height = detail::ppm_int(in, path, "height");
    const int maxval = detail::ppm_int(in, path, "maxval");
    if (maxval != 255) {
        throw IoFailure("unsupported PPM maxval " + std::to_string(maxval) + " in " + path);
    }
    // The token reader consumed exactly one delimiter byte after maxval, so
    // binary pixel data starts at the current stream position.
    const std::size_t expected = static_cast<std::size_t>(frame.width) *
                                 static_cast<std::size_t>(frame.height) * 3;
    frame.pixels.resize(expected);
    in.read(reinterpret_cast<char*>(frame.pixels.data()),
            static_cast<std::streamsize>(expected));
    if (static_cast<std::size_t>(in.gcount()) != expected) {
        throw IoFailure("truncated pixel data in " + path);
    }
    return frame;
}

inline void write_ppm(const std::string& path, const Frame& frame) {
    detail::check_frame(frame);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw IoFailure("failed writing pixel data to " + path);
}

// Paths of frame_*.ppm files in a scene directory, sorted by file name. The
// frame_%06d naming makes lexicographic order equal frame order.
inline std::vector<std::string> list_scene_frames(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoFailure("not a directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() > 10 && name.rfind("frame_", 0) == 0 &&
            name.compare(name.size() - 4, 4, ".ppm") == 0) {
            paths.push_back(entry.path().string());
        }
    }
    if (ec) throw IoFailure("cannot list directory " + dir + ": " + ec.message());
    std::sort(paths.begin(), paths.end());
    return paths;
}

struct SceneManifestEntry {
    std::string scene_id;
    std::string frame_dir;
};

// JSONL manifest, one {"scene_id": ..., "frame_dir": ...} object per line.
inline std::vector<SceneManifestEntry> read_scene_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open manifest " + path);
    std::vector<SceneManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("scene_id") ||
            !doc["scene_id"].is_string() || !doc.contains("frame_dir") ||
            !doc["frame_dir"].is_string()) {
            throw SchemaViolation("manifest line " + std::to_string(line_no) +
                                  ": expected {\"scene_id\", \"frame_dir\"} strings");
        }
        entries.push_back({doc["scene_id"].get<std::string>(),
                           doc["frame_dir"].get<std::string>()});
    }
    return entries;
}

struct FeatureExtractionConfig {
    std::size_t stride = 5;
    int blur_kernel = 5;
    double blur_sigma = 1.0;
};

// Full per-scene pipeline. Sampling applies to the ordered file list before
// any decoding, so skipped frames are never read from disk.
inline SceneVisualFeatures extract_scene_features(const std::string& scene_id,
                                                  const std::string& frame_dir,
                                                  const FeatureExtractionConfig& config = {}) {
    const std::vector<std::string> all_paths = list_scene_frames(frame_dir);
    if (all_paths.empty()) throw EmptyScene("scene \"" + scene_id + "\" has no frames in " + frame_dir);
    const std::vector<std::string> sampled_paths = sample_frames(all_paths, config.stride);
    std::vector<Frame> frames;
    frames.reserve(sampled_paths.size());
    for (const std::string& path : sampled_paths) frames.push_back(read_ppm(path));
    return aggregate_scene(scene_id,
                           per_frame_metrics(frames, config.blur_kernel, config.blur_sigma));
}

inline void write_features_csv(std::ostream& out,
                               const std::vector<SceneVisualFeatures>& rows) {
    out << kFeaturesHeader << '\n';
    char buf[160];
    for (const SceneVisualFeatures& row : rows) {
        std::snprintf(buf, sizeof buf, ",%zu,%.6f,%.6f,%.6f,%.6f,%.6f",
                      row.frame_count_sampled, row.motion, row.brightness, row.contrast,
                      row.saturation, row.tvi);
        out << csv_escape(row.scene_id) << buf << '\n';
    }
}

inline void write_features_csv(const std::string& path,
                               const std::vector<SceneVisualFeatures>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    write_features_csv(out, rows);
    if (!out) throw IoFailure("failed writing " + path);
}

}  // namespace ckg
