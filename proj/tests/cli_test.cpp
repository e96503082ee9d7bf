#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ckg/features_io.hpp"
#include "helpers.hpp"

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        cli_ = std::getenv("CKG_CLI_PATH");
#ifdef CKG_CLI_PATH
        if (cli_ == nullptr) cli_ = CKG_CLI_PATH;
#endif
        if (cli_ == nullptr) GTEST_SKIP() << "CKG_CLI_PATH not set";
    }

    RunResult run(const std::string& args) {
        const std::string out_path = scratch_.file("stdout.txt");
        const std::string err_path = scratch_.file("stderr.txt");
        const std::string command =
            std::string("\"") + cli_ + "\" " + args + " > " + out_path + " 2> " + err_path;
        const int status = std::system(command.c_str());
        RunResult result;
        result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        result.out = slurp(out_path);
        result.err = slurp(err_path);
        return result;
    }

    const char* cli_ = nullptr;
    testutil::TempDir scratch_;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string write_triplets(testutil::TempDir& dir) {
    const std::string path = dir.file("triplets.jsonl");
    write_file(path,
               R"({"source": "tempo", "relation": "causes increase in", "target": "crowd energy"})"
               "\n"
               R"({"source": "tempo", "relation": "supports", "target": "fast cutting"})"
               "\n"
               R"({"source": "tempo", "relation": "causes increase in", "target": "crowd energy"})"
               "\n"
               "{\"source\": \"strobe\"}\n"
               R"({"source": "strobe", "relation": "triggers", "target": "crowd energy"})"
               "\n");
    return path;
}

TEST_F(CliTest, NoArgumentsIsUsageError) {
    const auto result = run("");
    EXPECT_EQ(result.code, 1);
    EXPECT_TRUE(result.out.empty());
    EXPECT_FALSE(result.err.empty());
}

TEST_F(CliTest, UnknownFlagsAndSubcommandsAreUsageErrors) {
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("stats --graph x --bogus").code, 1);
}

TEST_F(CliTest, MissingInputIsDataError) {
    testutil::TempDir dir;
    const auto result =
        run("build-graph --in " + dir.file("absent.jsonl") + " --out-dir " + dir.path().string());
    EXPECT_EQ(result.code, 2);
    EXPECT_FALSE(result.err.empty());
}

TEST_F(CliTest, GraphPipelineEndToEnd) {
    testutil::TempDir dir;
    const std::string triplets = write_triplets(dir);
    const std::string graph_dir = dir.path().string() + "/graph";

    const auto build = run("build-graph --in " + triplets + " --out-dir " + graph_dir);
    ASSERT_EQ(build.code, 0) << build.err;
    const auto report = nlohmann::json::parse(slurp(graph_dir + "/ingest_report.json"));
    EXPECT_EQ(report["accepted"].get<int>(), 3);
    EXPECT_EQ(report["merged_duplicates"].get<int>(), 1);
    EXPECT_EQ(report["rejected"].get<int>(), 1);

    const auto stats = run("stats --graph " + graph_dir + " --top 2");
    ASSERT_EQ(stats.code, 0) << stats.err;
    const auto summary = nlohmann::json::parse(stats.out);
    EXPECT_EQ(summary["node_count"].get<int>(), 4);
    EXPECT_EQ(summary["edge_count"].get<int>(), 3);
    EXPECT_EQ(summary["top_initiators"][0]["label"], "tempo");
    EXPECT_EQ(summary["community_count"].get<int>(), 1);

    const auto retrieved = run("retrieve --graph " + graph_dir + "/entities.csv " + graph_dir +
                               "/relationships.csv --question \"why the tempo change\" --k 2");
    ASSERT_EQ(retrieved.code, 0) << retrieved.err;
    EXPECT_NE(retrieved.out.find("- [score="), std::string::npos);
    EXPECT_NE(retrieved.out.find("tempo --(causes increase in)--> crowd energy"),
              std::string::npos);

    const auto nothing = run("retrieve --graph " + graph_dir + "/entities.csv " + graph_dir +
                             "/relationships.csv --question \"zither solos\" --k 2");
    ASSERT_EQ(nothing.code, 0);
    EXPECT_NE(nothing.out.find("no causal facts retrieved"), std::string::npos);

    EXPECT_EQ(run("retrieve --graph " + graph_dir + "/entities.csv " + graph_dir +
                  "/relationships.csv --question q --centrality sideways")
                  .code,
              1);
}

TEST_F(CliTest, FeaturesAndCorrelateProduceCsv) {
    testutil::TempDir dir;
    const std::string frames = dir.path().string() + "/frames_a";
    ASSERT_TRUE(std::filesystem::create_directory(frames));
    ckg::write_ppm(frames + "/frame_000000.ppm", testutil::gray_frame(4, 4, 0));
    ckg::write_ppm(frames + "/frame_000001.ppm", testutil::gray_frame(4, 4, 255));
    const std::string manifest = dir.file("scenes.jsonl");
    write_file(manifest, R"({"scene_id": "sc_a", "frame_dir": "frames_a"})" "\n");

    const std::string features_csv = dir.file("features.csv");
    const auto features =
        run("features --scenes " + manifest + " --out " + features_csv + " --stride 1");
    ASSERT_EQ(features.code, 0) << features.err;
    const std::string table = slurp(features_csv);
    EXPECT_NE(table.find("scene_id,frame_count_sampled,motion"), std::string::npos);
    EXPECT_NE(table.find("sc_a,2,1.000000"), std::string::npos);

    const std::string merged = dir.file("merged.csv");
    write_file(merged,
               "scene_id,motion,tempo\n"
               "s1,0.1,100\n"
               "s2,0.2,110\n"
               "s3,0.3,125\n");
    const auto corr = run("correlate --table " + merged + " --visual motion --audio tempo --out -");
    ASSERT_EQ(corr.code, 0) << corr.err;
    EXPECT_EQ(corr.out, "feature,tempo\nmotion,1.000000\n");
}

TEST_F(CliTest, EvalReportsAndAudits) {
    testutil::TempDir dir;
    const std::string mcq = dir.file("mcq.jsonl");
    write_file(
        mcq,
        R"({"item_id": "q1", "transition_id": "t1", "category": "prediction", "question": "What next?", "options": ["w", "x", "y", "z"], "correct_index": 0})"
        "\n"
        R"({"item_id": "q2", "transition_id": "t1", "category": "counterfactual", "question": "What if?", "options": ["w", "x", "y", "z"], "correct_index": 1})"
        "\n");
    const std::string evidence = dir.file("evidence.jsonl");
    write_file(evidence,
               R"({"transition_id": "t1", "scene_a": {"motion": 0.2, "tempo": 100.0}, )"
               R"("scene_b": {"motion": 0.4, "tempo": 130.0}, "deltas": {"tempo": 30.0}})"
               "\n");

    const std::string audit_csv = dir.file("audit.csv");
    const auto result = run("eval --mcq " + mcq + " --evidence " + evidence +
                            " --client fixed:A --audit " + audit_csv);
    ASSERT_EQ(result.code, 0) << result.err;
    const auto report = nlohmann::json::parse(result.out);
    EXPECT_EQ(report["overall"]["asked"].get<int>(), 2);
    EXPECT_DOUBLE_EQ(report["overall"]["accuracy"].get<double>(), 0.5);
    EXPECT_EQ(report["per_category"]["prediction"]["correct"].get<int>(), 1);
    const std::string audit = slurp(audit_csv);
    EXPECT_NE(audit.find("item_id,category,chosen"), std::string::npos);
    EXPECT_NE(audit.find("q2,counterfactual,A,B,false,ok"), std::string::npos);

    // Grounded run against a real graph directory.
    const std::string graph_dir = dir.path().string() + "/graph";
    const std::string triplets = write_triplets(dir);
    ASSERT_EQ(run("build-graph --in " + triplets + " --out-dir " + graph_dir).code, 0);
    const auto grounded = run("eval --mcq " + mcq + " --evidence " + evidence + " --graph " +
                              graph_dir + " --k 3 --client perfect");
    ASSERT_EQ(grounded.code, 0) << grounded.err;
    const auto grounded_report = nlohmann::json::parse(grounded.out);
    EXPECT_DOUBLE_EQ(grounded_report["overall"]["accuracy"].get<double>(), 1.0);
    EXPECT_TRUE(grounded_report["config"]["use_ckg"].get<bool>());

    EXPECT_EQ(run("eval --mcq " + mcq + " --evidence " + evidence + " --client fixed:Z").code, 1);
    // http without --base-url is an argument problem, not a transport one.
    EXPECT_EQ(run("eval --mcq " + mcq + " --evidence " + evidence + " --client http").code, 1);
    // A rejected endpoint URL surfaces as a transport error.
    EXPECT_EQ(run("eval --mcq " + mcq + " --evidence " + evidence +
                  " --client http --base-url ftp://host --model m")
                  .code,
              3);
    // Per-item transport failures do not abort the run; they are reported.
    const auto offline = run("eval --mcq " + mcq + " --evidence " + evidence +
                             " --client http --base-url http://127.0.0.1:9 --model m"
                             " --retries 0 --timeout 1");
    ASSERT_EQ(offline.code, 0) << offline.err;
    EXPECT_EQ(nlohmann::json::parse(offline.out)["client_failures"].get<int>(), 2);
}

TEST_F(CliTest, ParallelismDoesNotChangeOutputs) {
    testutil::TempDir dir;
    for (int scene = 0; scene < 3; ++scene) {
        const std::string frames = dir.path().string() + "/frames_" + std::to_string(scene);
        ASSERT_TRUE(std::filesystem::create_directory(frames));
        for (int i = 0; i < 4; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "/frame_%06d.ppm", i);
            ckg::write_ppm(frames + name,
                           testutil::gray_frame(3, 3, static_cast<std::uint8_t>(60 * i + scene)));
        }
    }
    const std::string manifest = dir.file("scenes.jsonl");
    std::ostringstream lines;
    for (int scene = 0; scene < 3; ++scene) {
        lines << R"({"scene_id": "sc)" << scene << R"(", "frame_dir": "frames_)" << scene
              << "\"}\n";
    }
    write_file(manifest, lines.str());

    const std::string lone = dir.file("features_1.csv");
    const std::string crowd = dir.file("features_8.csv");
    ASSERT_EQ(run("features --scenes " + manifest + " --out " + lone + " --stride 1 --jobs 1").code,
              0);
    ASSERT_EQ(
        run("features --scenes " + manifest + " --out " + crowd + " --stride 1 --jobs 8").code, 0);
    EXPECT_EQ(slurp(lone), slurp(crowd));

    const std::string mcq = dir.file("mcq.jsonl");
    std::ostringstream mcq_lines;
    for (int i = 0; i < 24; ++i) {
        mcq_lines << R"({"item_id": "q)" << i
                  << R"(", "transition_id": "t1", "category": "prediction", "question": "Q)" << i
                  << R"(?", "options": ["w", "x", "y", "z"], "correct_index": )" << i % 4 << "}\n";
    }
    write_file(mcq, mcq_lines.str());
    const std::string evidence = dir.file("evidence.jsonl");
    write_file(evidence,
               R"({"transition_id": "t1", "scene_a": {"motion": 0.2}, )"
               R"("scene_b": {"motion": 0.4}, "deltas": {"motion": 0.2}})"
               "\n");

    const auto seq = run("eval --mcq " + mcq + " --evidence " + evidence +
                         " --client random --seed 11 --jobs 1");
    const auto par = run("eval --mcq " + mcq + " --evidence " + evidence +
                         " --client random --seed 11 --jobs 8");
    ASSERT_EQ(seq.code, 0);
    ASSERT_EQ(par.code, 0);
    auto seq_json = nlohmann::json::parse(seq.out);
    auto par_json = nlohmann::json::parse(par.out);
    seq_json["config"].erase("jobs");
    par_json["config"].erase("jobs");
    EXPECT_EQ(seq_json.dump(), par_json.dump());
}

}  // namespace
