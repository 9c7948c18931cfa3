// SPDX-License-Identifier: Apache-2.0
//
// semseg command-line tool: ingest raw telemetry, analyze feature
// separability, evaluate predictive risk across feature spaces, and
// generate synthetic fixtures. Diagnostics go to stderr; reports go
// to files. Exit codes: 0 success, 1 usage error, 2 data error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semseg/errors.hpp"
#include "semseg/frame.hpp"
#include "semseg/ingest.hpp"
#include "semseg/json_io.hpp"
#include "semseg/pipeline.hpp"
#include "semseg/prediction.hpp"
#include "semseg/synth.hpp"
#include "semseg/taxonomy.hpp"
#include "semseg/version.hpp"

namespace {

using json = nlohmann::json;

// Wall-clock timings for the manifest. The manifest is the one
// emitted file that varies across runs; every report is byte-stable.
class StageClock {
  public:
    void start(const std::string& stage) {
        current_ = stage;
        begin_ = std::chrono::steady_clock::now();
    }
    void stop() {
        auto elapsed = std::chrono::steady_clock::now() - begin_;
        timings_[current_] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    }
    json to_json() const {
        json doc = json::object();
        for (const auto& [stage, ms] : timings_) doc[stage] = ms;
        return doc;
    }

  private:
    std::string current_;
    std::chrono::steady_clock::time_point begin_;
    std::map<std::string, std::int64_t> timings_;
};

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex_digest(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_text, std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const StageClock& clock) {
    json doc;
    doc["command"] = command;
    doc["config_digest"] = hex_digest(fnv1a(config_text));
    doc["seed"] = seed;
    doc["inputs"] = inputs;
    doc["versions"] = {{"semseg", semseg::kVersion}};
    doc["stages_ms"] = clock.to_json();
    semseg::write_text_file(path, semseg::dump_report(doc));
}

// List arguments accept comma-separated values; integer lists also
// accept inclusive "a..b" ranges, so "--splits 2..9" means 2,3,...,9.
std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        if (ch == ',') {
            tokens.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    tokens.push_back(current);
    return tokens;
}

std::int64_t parse_int_token(const std::string& token) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw semseg::ConfigError("not an integer: '" + token + "'");
    }
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> values;
    for (const auto& token : split_commas(text)) {
        auto dots = token.find("..");
        if (dots != std::string::npos) {
            std::int64_t lo = parse_int_token(token.substr(0, dots));
            std::int64_t hi = parse_int_token(token.substr(dots + 2));
            if (hi < lo)
                throw semseg::ConfigError("empty range: '" + token + "'");
            for (std::int64_t v = lo; v <= hi; ++v) values.push_back(v);
        } else {
            values.push_back(parse_int_token(token));
        }
    }
    if (values.empty()) throw semseg::ConfigError("empty list");
    return values;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> values;
    for (std::int64_t v : parse_int_list(text)) {
        if (v < 0) throw semseg::ConfigError("negative value in list");
        values.push_back(static_cast<std::size_t>(v));
    }
    return values;
}

std::vector<semseg::ModelKind> parse_model_list(const std::string& text) {
    std::vector<semseg::ModelKind> models;
    for (const auto& token : split_commas(text))
        models.push_back(semseg::model_kind_from_string(token));
    return models;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw semseg::IoError("cannot create directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

struct IngestArgs {
    std::string in;
    std::string out;
    std::string summary;
    double max_missing = 0.5;
};

void run_ingest(const IngestArgs& args) {
    auto loaded = semseg::load_long_metrics(args.in);
    auto pivoted = semseg::pivot_to_wide(loaded.records);
    auto cleaned = semseg::clean_frame(pivoted.frame, args.max_missing);
    semseg::write_wide_csv(cleaned.frame, args.out);

    json summary = semseg::cleaning_summary_to_json(cleaned.summary);
    summary["skipped_rows"] = loaded.skipped;
    summary["duplicate_cells"] = pivoted.duplicates;
    summary["rows"] = cleaned.frame.n_rows();
    summary["columns"] = cleaned.frame.n_cols();
    std::string summary_path = args.summary;
    if (summary_path.empty()) {
        std::filesystem::path p(args.out);
        p.replace_extension(".summary.json");
        summary_path = p.string();
    }
    semseg::write_text_file(summary_path, semseg::dump_report(summary));
    std::cerr << "ingest: " << cleaned.frame.n_rows() << " rows, "
              << cleaned.frame.n_cols() << " columns ("
              << loaded.skipped << " rows skipped, "
              << cleaned.summary.dropped.size() << " columns dropped)\n";
}

struct AnalyzeArgs {
    std::string in;
    std::string taxonomy;
    std::string out_dir;
    double tau_red = 0.95;
    std::size_t window = 12;
    std::size_t shift_repeats = 20;
    std::uint64_t seed = 0;
};

void run_analyze(const AnalyzeArgs& args) {
    StageClock clock;
    clock.start("load");
    auto frame = semseg::read_wide_csv(args.in);
    auto taxonomy = semseg::parse_taxonomy(args.taxonomy);
    clock.stop();

    semseg::AnalyzeOptions options;
    options.tau_red = args.tau_red;
    options.baseline.window_w = args.window;
    options.shift_repeats = args.shift_repeats;
    options.seed = args.seed;

    clock.start("analyze");
    auto result = semseg::run_analysis(frame, taxonomy, options);
    clock.stop();

    clock.start("write");
    ensure_dir(args.out_dir);
    json separability =
        semseg::correlation_report_to_json(result.prune.pre_report);
    separability["shift"] = semseg::shift_result_to_json(result.shift);
    separability["unmatched_columns"] = result.space.unmatched;
    semseg::write_text_file(join(args.out_dir, "separability.json"),
                            semseg::dump_report(separability));
    semseg::write_text_file(
        join(args.out_dir, "pruning.json"),
        semseg::dump_report(semseg::prune_result_to_json(result.prune)));
    semseg::write_omega_csv(result.prune.pre_report,
                            join(args.out_dir, "fig2_omegas.csv"));
    clock.stop();

    std::string config_text =
        "analyze|tau=" + std::to_string(args.tau_red) +
        "|window=" + std::to_string(args.window) +
        "|repeats=" + std::to_string(args.shift_repeats) +
        "|seed=" + std::to_string(args.seed);
    write_manifest(join(args.out_dir, "manifest.json"), "analyze", config_text,
                   args.seed, {args.in, args.taxonomy}, clock);
    if (!result.space.unmatched.empty())
        std::cerr << "analyze: " << result.space.unmatched.size()
                  << " columns matched no segment\n";
    std::cerr << "analyze: reports written to " << args.out_dir << "\n";
}

struct EvaluateArgs {
    std::string in;
    std::string taxonomy;
    std::string faults;
    std::string out_dir;
    std::string splits = "2..9";
    std::string deltas = "300,600";
    std::string windows = "300,600,900,1200";
    std::string models = "logistic,forest,boosted";
    double theta_q = 0.90;
    double tau_red = 0.95;
    std::size_t window = 12;
    std::uint64_t seed = 0;
};

void run_evaluate(const EvaluateArgs& args) {
    StageClock clock;
    clock.start("load");
    auto frame = semseg::read_wide_csv(args.in);
    auto taxonomy = semseg::parse_taxonomy(args.taxonomy);
    auto faults = semseg::load_fault_log(args.faults);
    clock.stop();

    semseg::AnalyzeOptions options;
    options.tau_red = args.tau_red;
    options.baseline.window_w = args.window;
    options.seed = args.seed;

    semseg::EvalConfig config;
    config.splits_list = parse_size_list(args.splits);
    config.deltas = parse_int_list(args.deltas);
    config.windows = parse_int_list(args.windows);
    config.models = parse_model_list(args.models);
    config.theta_quantile = args.theta_q;
    config.seed = args.seed;

    clock.start("evaluate");
    auto result = semseg::run_evaluation(frame, taxonomy, faults, options, config);
    clock.stop();

    clock.start("write");
    ensure_dir(args.out_dir);
    semseg::write_text_file(
        join(args.out_dir, "risk_report.json"),
        semseg::dump_report(semseg::risk_report_to_json(result.report)));
    semseg::write_risk_report_csv(result.report,
                                  join(args.out_dir, "risk_report.csv"));
    semseg::write_gap_csv(result.report, join(args.out_dir, "fig3_gap.csv"));
    semseg::write_risk_auc_csv(result.report,
                               join(args.out_dir, "fig4_risk_auc.csv"));
    semseg::write_condcorr_csv(result.report,
                               join(args.out_dir, "fig5_condcorr.csv"));
    clock.stop();

    std::string config_text =
        "evaluate|splits=" + args.splits + "|deltas=" + args.deltas +
        "|windows=" + args.windows + "|models=" + args.models +
        "|theta=" + std::to_string(args.theta_q) +
        "|tau=" + std::to_string(args.tau_red) +
        "|window=" + std::to_string(args.window) +
        "|seed=" + std::to_string(args.seed);
    write_manifest(join(args.out_dir, "manifest.json"), "evaluate", config_text,
                   args.seed, {args.in, args.taxonomy, args.faults}, clock);
    for (const auto& warning : result.report.warnings)
        std::cerr << "evaluate: warning: " << warning << "\n";
    std::cerr << "evaluate: " << result.report.cells.size()
              << " cells written to " << args.out_dir << "\n";
}

struct SynthArgs {
    std::string out_dir;
    std::size_t samples;
    std::int64_t cadence;
    std::size_t residual;
    std::size_t duplicates;
    double fault_threshold;
    std::uint64_t seed;

    SynthArgs() {
        auto d = semseg::SynthConfig::defaults();
        samples = d.n_samples;
        cadence = d.cadence;
        residual = d.n_residual;
        duplicates = d.planted_duplicates;
        fault_threshold = d.fault_threshold;
        seed = d.seed;
    }
};

void run_synth(const SynthArgs& args) {
    semseg::SynthConfig config = semseg::SynthConfig::defaults();
    config.n_samples = args.samples;
    config.cadence = args.cadence;
    config.n_residual = args.residual;
    config.planted_duplicates = args.duplicates;
    config.fault_threshold = args.fault_threshold;
    config.seed = args.seed;

    auto result = semseg::generate_telemetry(config);
    ensure_dir(args.out_dir);
    semseg::write_long_csv(semseg::frame_to_long(result.frame),
                           join(args.out_dir, "telemetry.csv"));
    semseg::write_fault_log(result.faults, join(args.out_dir, "faults.csv"));
    semseg::write_text_file(
        join(args.out_dir, "ground_truth.json"),
        semseg::dump_report(semseg::taxonomy_to_json(result.taxonomy)));
    std::cerr << "synth: " << result.frame.n_rows() << " samples, "
              << result.frame.n_cols() << " metrics, "
              << result.faults.events.size() << " faults -> " << args.out_dir
              << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic feature segmentation for predictive maintenance"};
    app.require_subcommand(1);
    app.set_version_flag("--version", semseg::kVersion);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand(
        "ingest", "Pivot long-format telemetry to a clean wide matrix");
    ingest->add_option("--in", ingest_args.in, "Long-format CSV input")
        ->required();
    ingest->add_option("--out", ingest_args.out, "Wide CSV output")->required();
    ingest->add_option("--summary", ingest_args.summary,
                       "Cleaning summary JSON path (default: <out>.summary.json)");
    ingest
        ->add_option("--max-missing", ingest_args.max_missing,
                     "Drop columns whose missing fraction exceeds this")
        ->check(CLI::Range(0.0, 1.0));

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand(
        "analyze", "Segment features and report separability and pruning");
    analyze->add_option("--in", analyze_args.in, "Wide CSV input")->required();
    analyze->add_option("--taxonomy", analyze_args.taxonomy, "Taxonomy JSON")
        ->required();
    analyze->add_option("--out-dir", analyze_args.out_dir, "Report directory")
        ->required();
    analyze->add_option("--tau-red", analyze_args.tau_red,
                        "Redundancy pruning threshold");
    analyze->add_option("--window", analyze_args.window,
                        "Rolling-baseline window (samples)");
    analyze->add_option("--shift-repeats", analyze_args.shift_repeats,
                        "Circular-shift test repeats");
    analyze->add_option("--seed", analyze_args.seed, "Random seed")
        ->envname("SEMSEG_SEED");

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Sweep predictive-risk evaluation across feature spaces");
    evaluate->add_option("--in", evaluate_args.in, "Wide CSV input")->required();
    evaluate->add_option("--taxonomy", evaluate_args.taxonomy, "Taxonomy JSON")
        ->required();
    evaluate->add_option("--faults", evaluate_args.faults, "Fault log CSV")
        ->required();
    evaluate->add_option("--out-dir", evaluate_args.out_dir, "Report directory")
        ->required();
    evaluate->add_option("--splits", evaluate_args.splits,
                         "Split counts, e.g. 2..9 or 2,4,8");
    evaluate->add_option("--deltas", evaluate_args.deltas,
                         "Label horizons in seconds");
    evaluate->add_option("--windows", evaluate_args.windows,
                         "Aggregation windows in seconds");
    evaluate->add_option("--models", evaluate_args.models,
                         "Model list: logistic,forest,boosted");
    evaluate
        ->add_option("--theta-q", evaluate_args.theta_q,
                     "High-risk conditioning quantile")
        ->check(CLI::Range(0.0, 1.0));
    evaluate->add_option("--tau-red", evaluate_args.tau_red,
                         "Redundancy pruning threshold");
    evaluate->add_option("--window", evaluate_args.window,
                         "Rolling-baseline window (samples)");
    evaluate->add_option("--seed", evaluate_args.seed, "Random seed")
        ->envname("SEMSEG_SEED");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic telemetry fixture with faults");
    synth->add_option("--out", synth_args.out_dir, "Output directory")
        ->required();
    synth->add_option("--samples", synth_args.samples, "Sample count");
    synth->add_option("--cadence", synth_args.cadence, "Seconds between samples");
    synth->add_option("--residual", synth_args.residual,
                      "Residual feature count");
    synth->add_option("--duplicates", synth_args.duplicates,
                      "Planted duplicate columns");
    synth->add_option("--fault-threshold", synth_args.fault_threshold,
                      "Latent level that triggers a fault");
    synth->add_option("--seed", synth_args.seed, "Random seed")
        ->envname("SEMSEG_SEED");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) run_ingest(ingest_args);
        if (*analyze) run_analyze(analyze_args);
        if (*evaluate) run_evaluate(evaluate_args);
        if (*synth) run_synth(synth_args);
    } catch (const semseg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const semseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
