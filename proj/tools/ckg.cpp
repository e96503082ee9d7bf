// Command-line entry point for the causal knowledge graph toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime/transport
// error. stdout carries machine-parseable JSON or CSV only; diagnostics go
// to stderr.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ckg/ckg.hpp"
#include "ckg/http_client.hpp"

namespace {

namespace fs = std::filesystem;

ckg::CausalGraph load_graph_dir(const std::string& dir) {
    return ckg::load_graph(fs::path(dir) / "entities.csv", fs::path(dir) / "relationships.csv");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ckg::IoFailure("cannot open " + out_path + " for writing");
    out << text;
    if (!out) throw ckg::IoFailure("failed writing " + out_path);
}

struct BuildGraphArgs {
    std::string in_path;
    std::string out_dir;
};

void run_build_graph(const BuildGraphArgs& args) {
    const auto [graph, report] = ckg::build_graph_from_jsonl(args.in_path);
    fs::create_directories(args.out_dir);
    ckg::serialize_graph(graph, fs::path(args.out_dir) / "entities.csv",
                         fs::path(args.out_dir) / "relationships.csv");
    const std::string report_json = ckg::ingest_report_to_json(report).dump(2) + "\n";
    emit(report_json, (fs::path(args.out_dir) / "ingest_report.json").string());
    std::cout << report_json;
}

struct StatsArgs {
    std::string graph_dir;
    std::size_t top_n = 5;
};

void run_stats(const StatsArgs& args) {
    const ckg::CausalGraph graph = load_graph_dir(args.graph_dir);
    const ckg::GraphSummary summary = ckg::graph_summary(graph, args.top_n);
    std::cout << ckg::summary_to_json(summary).dump(2) << "\n";
}

struct RetrieveArgs {
    std::vector<std::string> graph_files;
    std::string question;
    int k = 25;
    std::string lexicon_path;
    double boost = 1.5;
    std::string centrality = "total";
};

void run_retrieve(const RetrieveArgs& args) {
    const ckg::CausalGraph graph = ckg::load_graph(args.graph_files[0], args.graph_files[1]);
    ckg::RetrievalConfig config;
    config.k = args.k;
    config.boost_factor = args.boost;
    if (args.centrality == "out") {
        config.centrality = ckg::CentralityMode::out_degree;
    } else if (args.centrality != "total") {
        throw std::invalid_argument("--centrality must be total or out");
    }
    if (!args.lexicon_path.empty()) config.kinetic_lexicon = ckg::load_lexicon(args.lexicon_path);
    ckg::validate_config(config);
    std::cout << ckg::render_context(ckg::retrieve(graph, args.question, config)) << "\n";
}

struct FeaturesArgs {
    std::string manifest_path;
    std::string out_path;
    std::size_t stride = 5;
    int kernel = 5;
    double sigma = 1.0;
    int jobs = 1;
};

void run_features(const FeaturesArgs& args) {
    const auto entries = ckg::read_scene_manifest(args.manifest_path);
    const fs::path base = fs::path(args.manifest_path).parent_path();
    ckg::FeatureExtractionConfig config{args.stride, args.kernel, args.sigma};

    std::vector<ckg::SceneVisualFeatures> rows(entries.size());
    auto run_scene = [&](std::size_t index) {
        fs::path dir(entries[index].frame_dir);
        if (dir.is_relative()) dir = base / dir;
        rows[index] = ckg::extract_scene_features(entries[index].scene_id, dir.string(), config);
    };
    const int jobs = std::max(1, args.jobs);
    if (jobs == 1 || entries.size() < 2) {
        for (std::size_t i = 0; i < entries.size(); ++i) run_scene(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::atomic<bool> failed{false};
        std::string first_error;
        std::mutex error_mutex;
        for (int w = 0; w < std::min<int>(jobs, static_cast<int>(entries.size())); ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
                    try {
                        run_scene(i);
                    } catch (const std::exception& error) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!failed.exchange(true)) first_error = error.what();
                    }
                }
            });
        }
        for (std::thread& worker : workers) worker.join();
        if (failed) throw ckg::IoFailure(first_error);
    }

    std::ostringstream csv;
    ckg::write_features_csv(csv, rows);
    emit(csv.str(), args.out_path);
    if (!args.out_path.empty() && args.out_path != "-") {
        std::cout << "{\"scenes\": " << rows.size() << ", \"out\": " << nlohmann::json(args.out_path)
                  << "}\n";
    }
}

struct CorrelateArgs {
    std::string table_path;
    std::vector<std::string> visual_cols;
    std::vector<std::string> audio_cols;
    std::string out_path;
    std::string counts_path;
};

void run_correlate(const CorrelateArgs& args) {
    const ckg::FeatureTable table = ckg::FeatureTable::from_csv_file(args.table_path);
    const ckg::CorrelationMatrix matrix =
        ckg::correlation_matrix(table, args.visual_cols, args.audio_cols);
    std::ostringstream csv;
    ckg::write_matrix_csv(csv, matrix);
    emit(csv.str(), args.out_path);
    if (!args.out_path.empty() && args.out_path != "-") {
        std::cout << csv.str();
    }
    if (!args.counts_path.empty()) {
        std::ostringstream counts;
        ckg::write_pair_counts_csv(counts, matrix);
        emit(counts.str(), args.counts_path);
    }
}

struct EvalArgs {
    std::string mcq_path;
    std::string evidence_path;
    std::string graph_dir;
    int k = 25;
    std::string client_spec = "random";
    std::uint64_t seed = 0;
    int jobs = 1;
    int retries = 2;
    bool no_mask = false;
    std::string template_id = "default";
    std::string out_path;
    std::string audit_path;
    std::string base_url;
    std::string model;
    std::string api_key_env = "CKG_API_KEY";
    int timeout = 60;
};

std::unique_ptr<ckg::ModelClient> make_client(const EvalArgs& args,
                                              const std::vector<ckg::MCQItem>& items) {
    if (args.client_spec == "perfect") return std::make_unique<ckg::PerfectOracleClient>(items);
    if (args.client_spec == "random") return std::make_unique<ckg::UniformRandomClient>(args.seed);
    if (args.client_spec.rfind("fixed:", 0) == 0 && args.client_spec.size() == 7) {
        return std::make_unique<ckg::FixedLetterClient>(args.client_spec[6]);
    }
    if (args.client_spec == "http") {
        ckg::RemoteClientConfig config;
        config.base_url = args.base_url;
        config.model = args.model;
        config.api_key_env = args.api_key_env;
        config.timeout_seconds = args.timeout;
        if (config.base_url.empty()) {
            throw std::invalid_argument("--client http requires --base-url");
        }
        return std::make_unique<ckg::RemoteHttpClient>(config);
    }
    throw std::invalid_argument("unknown client \"" + args.client_spec +
                                "\"; expected perfect, random, fixed:<A-D>, or http");
}

void run_eval(const EvalArgs& args) {
    const ckg::McqLoadResult loaded = ckg::load_mcq(args.mcq_path);
    for (const ckg::RejectedRecord& rejection : loaded.rejections) {
        std::cerr << "ckg: eval: skipping MCQ line " << rejection.line << ": " << rejection.reason
                  << "\n";
    }
    const auto evidence = ckg::load_evidence(args.evidence_path);

    ckg::EvalConfig config;
    config.use_ckg = !args.graph_dir.empty();
    config.retrieval.k = args.k;
    config.mask_scene_b_audio = !args.no_mask;
    config.prompt_template_id = args.template_id;
    config.seed = args.seed;
    config.retry_limit = args.retries;
    config.jobs = args.jobs;

    std::optional<ckg::CausalGraph> graph;
    if (config.use_ckg) graph = load_graph_dir(args.graph_dir);

    const auto client = make_client(args, loaded.items);
    const ckg::EvalReport report =
        ckg::evaluate(loaded.items, evidence, *client, graph ? &*graph : nullptr, config);

    const std::string report_json = ckg::report_to_json(report).dump(2) + "\n";
    if (!args.out_path.empty() && args.out_path != "-") emit(report_json, args.out_path);
    std::cout << report_json;
    if (!args.audit_path.empty()) ckg::write_audit_csv(args.audit_path, report.outcomes);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal knowledge graph toolkit"};
    app.require_subcommand(1);

    BuildGraphArgs build_args;
    CLI::App* build = app.add_subcommand("build-graph", "ingest triplets into graph CSVs");
    build->add_option("--in", build_args.in_path, "triplet JSONL file")->required();
    build->add_option("--out-dir", build_args.out_dir, "output directory")->required();
    build->callback([&] { run_build_graph(build_args); });

    StatsArgs stats_args;
    CLI::App* stats = app.add_subcommand("stats", "print graph summary JSON");
    stats->add_option("--graph", stats_args.graph_dir, "graph directory")->required();
    stats->add_option("--top", stats_args.top_n, "how many top initiators to report");
    stats->callback([&] { run_stats(stats_args); });

    RetrieveArgs retrieve_args;
    CLI::App* retrieve = app.add_subcommand("retrieve", "print retrieved causal context");
    retrieve->add_option("--graph", retrieve_args.graph_files, "entities.csv relationships.csv")
        ->expected(2)
        ->required();
    retrieve->add_option("--question", retrieve_args.question, "question text")->required();
    retrieve->add_option("--k", retrieve_args.k, "facts to keep");
    retrieve->add_option("--lexicon", retrieve_args.lexicon_path, "kinetic lexicon file");
    retrieve->add_option("--boost", retrieve_args.boost, "kinetic boost factor");
    retrieve->add_option("--centrality", retrieve_args.centrality, "total or out");
    retrieve->callback([&] { run_retrieve(retrieve_args); });

    FeaturesArgs features_args;
    CLI::App* features = app.add_subcommand("features", "extract per-scene visual features");
    features->add_option("--scenes", features_args.manifest_path, "scene manifest JSONL")
        ->required();
    features->add_option("--out", features_args.out_path, "output CSV path (- for stdout)");
    features->add_option("--stride", features_args.stride, "frame sampling stride");
    features->add_option("--kernel", features_args.kernel, "Gaussian kernel size (odd)");
    features->add_option("--sigma", features_args.sigma, "Gaussian sigma");
    features->add_option("--jobs", features_args.jobs, "parallel scenes");
    features->callback([&] { run_features(features_args); });

    CorrelateArgs correlate_args;
    CLI::App* correlate = app.add_subcommand("correlate", "Spearman correlation matrix CSV");
    correlate->add_option("--table", correlate_args.table_path, "merged per-scene CSV")
        ->required();
    correlate->add_option("--visual", correlate_args.visual_cols, "visual columns")
        ->delimiter(',')
        ->required();
    correlate->add_option("--audio", correlate_args.audio_cols, "audio columns")
        ->delimiter(',')
        ->required();
    correlate->add_option("--out", correlate_args.out_path, "matrix CSV path (- for stdout)");
    correlate->add_option("--counts", correlate_args.counts_path, "pair-count CSV path");
    correlate->callback([&] { run_correlate(correlate_args); });

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "run an MCQ evaluation");
    eval->add_option("--mcq", eval_args.mcq_path, "MCQ JSONL file")->required();
    eval->add_option("--evidence", eval_args.evidence_path, "evidence JSONL file")->required();
    eval->add_option("--graph", eval_args.graph_dir, "graph directory (enables grounding)");
    eval->add_option("--k", eval_args.k, "retrieval depth when grounded");
    eval->add_option("--client", eval_args.client_spec, "perfect, random, fixed:<A-D>, or http");
    eval->add_option("--seed", eval_args.seed, "seed for stochastic clients");
    eval->add_option("--jobs", eval_args.jobs, "parallel client calls");
    eval->add_option("--retries", eval_args.retries, "retries after a client failure");
    eval->add_flag("--no-mask", eval_args.no_mask, "disable scene-B audio masking");
    eval->add_option("--template", eval_args.template_id, "prompt template id");
    eval->add_option("--out", eval_args.out_path, "also write report JSON here");
    eval->add_option("--audit", eval_args.audit_path, "per-item audit CSV path");
    eval->add_option("--base-url", eval_args.base_url, "http client endpoint base URL");
    eval->add_option("--model", eval_args.model, "http client model name");
    eval->add_option("--api-key-env", eval_args.api_key_env, "env var holding the auth token");
    eval->add_option("--timeout", eval_args.timeout, "http timeout seconds");
    eval->callback([&] { run_eval(eval_args); });

    if (argc <= 1) {
        std::cerr << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ckg::ClientFailure& e) {
        std::cerr << "ckg: transport error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ckg: usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "ckg: data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ckg: error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
