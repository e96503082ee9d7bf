#pragma once

// Shared fixtures for the test suite: temp directories, random graph
// generation, and tiny frame constructors.

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ckg/features.hpp"
#include "ckg/graph.hpp"

namespace testutil {

class TempDir {
  public:
    TempDir() {
        auto pattern =
            (std::filesystem::temp_directory_path() / "ckg_test_XXXXXX").string();
        if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

// Label/relation pools mixing kinetic terms, CSV-hostile punctuation, and
// multi-word phrases.
inline const std::vector<std::string>& label_words() {
    static const std::vector<std::string> words{
        "tempo",    "drum",     "bass",  "camera", "light",   "flash",  "genre",
        "pop",      "increase", "drop",  "shift",  "chorus",  "vocal",  "fade",
        "cut",      "zoom",     "beat",  "melody", "volume",  "bright", "scene",
        "motion\"", "pan,tilt", "echo",  "reverb", "snare"};
    return words;
}

inline const std::vector<std::string>& relation_pool() {
    static const std::vector<std::string> relations{
        "triggers",           "causes increase in",  "leads to drop of",
        "synchronizes with",  "precedes",            "causes shift toward",
        "dampens",            "makes louder",        "accompanies",
        "resolves into"};
    return relations;
}

inline std::string random_label(std::mt19937_64& rng, int max_words = 3) {
    std::uniform_int_distribution<int> word_count(1, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, label_words().size() - 1);
    std::string label;
    const int n = word_count(rng);
    for (int i = 0; i < n; ++i) {
        if (i) label += ' ';
        label += label_words()[pick(rng)];
    }
    return label;
}

// Random multigraph-style ingest: duplicate triplets merge into
// multiplicities, labels may collide after canonicalization.
inline ckg::CausalGraph random_graph(std::mt19937_64& rng, int max_nodes = 30,
                                     int max_edges = 80) {
    std::uniform_int_distribution<int> node_count(2, max_nodes);
    const int n = node_count(rng);
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        labels.push_back(random_label(rng) + " " + std::to_string(i % 7));
    }
    std::uniform_int_distribution<int> edge_count(0, max_edges);
    std::uniform_int_distribution<std::size_t> node_pick(0, labels.size() - 1);
    std::uniform_int_distribution<std::size_t> rel_pick(0, relation_pool().size() - 1);
    ckg::CausalGraph graph;
    const int e = edge_count(rng);
    for (int i = 0; i < e; ++i) {
        graph.add_triplet({labels[node_pick(rng)], relation_pool()[rel_pick(rng)],
                           labels[node_pick(rng)], ""});
    }
    return graph;
}

inline ckg::Frame solid_frame(int width, int height, std::uint8_t r, std::uint8_t g,
                              std::uint8_t b) {
    ckg::Frame frame{width, height, {}};
    frame.pixels.reserve(static_cast<std::size_t>(width) * height * 3);
    for (int i = 0; i < width * height; ++i) {
        frame.pixels.push_back(r);
        frame.pixels.push_back(g);
        frame.pixels.push_back(b);
    }
    return frame;
}

inline ckg::Frame gray_frame(int width, int height, std::uint8_t value) {
    return solid_frame(width, height, value, value, value);
}

}  // namespace testutil
