// Command-line front end: label-space export, dataset generation, dataset
// statistics, training, prediction and evaluation.
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O or data error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sysdse/data.hpp"
#include "sysdse/encoder.hpp"
#include "sysdse/labels.hpp"
#include "sysdse/metrics.hpp"
#include "sysdse/model.hpp"
#include "sysdse/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sysdse;

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public Error {
public:
    using Error::Error;
};

struct TableFlags {
    int case_id = 1;
    Case1Params c1;
    Case2Params c2;
    std::string platform_path;
    std::string labels_path;

    void add(CLI::App* app, bool with_labels_file) {
        app->add_option("--case", case_id, "Case study: 1 array+dataflow, 2 buffer sizes, 3 schedule")
            ->check(CLI::IsMember({1, 2, 3}));
        app->add_option("--min-exp", c1.min_exp, "Case 1: minimum array side exponent");
        app->add_option("--max-mac-exp", c1.max_mac_exp, "Case 1: maximum MAC exponent");
        app->add_option("--min-kb", c2.min_kb, "Case 2: smallest buffer size in KB");
        app->add_option("--max-kb", c2.max_kb, "Case 2: largest buffer size in KB");
        app->add_option("--step-kb", c2.step_kb, "Case 2: buffer size step in KB");
        app->add_option("--platform", platform_path, "Case 3: platform JSON (default: 128x128, 32x32, 256x16, 16x256)");
        if (with_labels_file) {
            app->add_option("--labels", labels_path, "Label table JSON; overrides the table flags");
        }
    }
};

json read_json_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("failed writing " + path.string());
}

AnyTable build_table(const TableFlags& t) {
    if (!t.labels_path.empty()) {
        AnyTable table = table_from_json(read_json_file(t.labels_path));
        if (case_id(table) != t.case_id) {
            throw UsageError("label file is for case " + std::to_string(case_id(table)) + ", not case " +
                             std::to_string(t.case_id));
        }
        return table;
    }
    switch (t.case_id) {
        case 1: return enumerate_case1_labels(t.c1.min_exp, t.c1.max_mac_exp);
        case 2: return enumerate_case2_labels(t.c2.min_kb, t.c2.max_kb, t.c2.step_kb);
        default: {
            Platform p = t.platform_path.empty() ? Platform::default_platform()
                                                 : platform_from_json(read_json_file(t.platform_path));
            return enumerate_case3_labels(p);
        }
    }
}

void add_sampling_flags(CLI::App* app, GenParams& g) {
    app->add_option("--m-max", g.ranges.m_max, "Largest sampled M");
    app->add_option("--n-max", g.ranges.n_max, "Largest sampled N");
    app->add_option("--k-max", g.ranges.k_max, "Largest sampled K");
    app->add_option("--mac-exp-min", g.mac_exp_min, "Case 1: smallest sampled MAC exponent");
    app->add_option("--mac-exp-max", g.mac_exp_max, "Case 1: largest sampled MAC exponent");
    app->add_option("--bw-min", g.bw_min, "Case 2: smallest sampled bandwidth (bytes/cycle)");
    app->add_option("--bw-max", g.bw_max, "Case 2: largest sampled bandwidth (bytes/cycle)");
    app->add_option("--budget-min", g.budget_min_kb, "Case 2: smallest sampled capacity budget (KB)");
    app->add_option("--budget-max", g.budget_max_kb, "Case 2: largest sampled capacity budget (KB)");
    app->add_option("--budget-step", g.budget_step_kb, "Case 2: budget grid step (KB)");
}

// Case 2 draws array configurations from the case-1 space given by the table flags.
GenParams resolve_gen(GenParams g, const TableFlags& t) {
    g.array_space = t.c1;
    return g;
}

unsigned resolve_threads(unsigned flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("SYSTOLIC_DSE_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("SYSTOLIC_DSE_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

json resolved_options(const CLI::App* app) {
    json params = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name.empty() || name == "help") continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            params[name] = res.size() == 1 ? json(res.front()) : json(res);
        } else {
            params[name] = opt->get_default_str();
        }
    }
    return params;
}

void write_manifest(const fs::path& artifact, const CLI::App* sub, const json& extra,
                    std::chrono::steady_clock::time_point start) {
    json m;
    m["tool"] = "sysdse";
    m["version"] = kVersion;
    m["subcommand"] = sub->get_name();
    m["params"] = resolved_options(sub);
    for (const auto& [k, v] : extra.items()) m[k] = v;
    m["duration_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fs::path path = artifact;
    path += ".manifest.json";
    write_text(path, m.dump(2) + "\n");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    for (const auto& tok : split(s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("'" + tok + "' is not an integer");
        }
    }
    return out;
}

// Reads a dataset, reporting a schema mismatch as a usage error.
Dataset load_dataset(const fs::path& path, const AnyTable& table) {
    const CsvSchema schema = schema_for(table);
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string header;
    std::getline(f, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::string expected;
    for (const auto& c : schema.columns) expected += c + ",";
    expected += "label";
    if (header != expected) {
        throw UsageError(path.string() + " does not match case " + std::to_string(schema.case_id) + " (header '" +
                         header + "', expected '" + expected + "')");
    }
    return read_csv(path, schema);
}

AnyTable table_of_model(const RecommenderModel& m) {
    if (!m.label_space.contains("case")) throw CheckpointError("checkpoint carries no label space");
    return table_from_params(m.label_space.at("case").get<int>(), m.label_space.value("params", json::object()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Systolic-array design-space exploration: cost oracles, datasets and a learned recommender"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "TOML/INI file of option values; flags take precedence");
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    const auto start = std::chrono::steady_clock::now();

    // labels
    TableFlags labels_t;
    std::string labels_out;
    auto* labels = app.add_subcommand("labels", "Write a label table as JSON");
    labels_t.add(labels, false);
    labels->add_option("--out,-o", labels_out, "Output JSON path")->required();

    // gen
    TableFlags gen_t;
    GenParams gen_p;
    std::size_t gen_n = 1000;
    std::uint64_t gen_seed = 0;
    unsigned gen_threads = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Sample queries and label them with the exhaustive oracle");
    gen_t.add(gen, true);
    add_sampling_flags(gen, gen_p);
    gen->add_option("-n,--count", gen_n, "Number of records");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("--threads", gen_threads, "Worker threads (0: $SYSTOLIC_DSE_THREADS or all cores)");
    gen->add_option("--out,-o", gen_out, "Output CSV path")->required();

    // stats
    std::string stats_in, stats_out;
    std::size_t stats_top = 10;
    auto* stats = app.add_subcommand("stats", "Class frequency histogram of a dataset");
    stats->add_option("--in,-i", stats_in, "Dataset CSV")->required();
    stats->add_option("--out,-o", stats_out, "Histogram CSV (label,frequency)")->required();
    stats->add_option("--top", stats_top, "Report the mass of this many most frequent classes");

    // pca
    std::string pca_in, pca_out, pca_classes;
    auto* pca = app.add_subcommand("pca", "Project two classes onto the top two principal components");
    pca->add_option("--in,-i", pca_in, "Dataset CSV")->required();
    pca->add_option("--classes", pca_classes, "Two label ids, e.g. 3,17")->required();
    pca->add_option("--out,-o", pca_out, "Projection CSV (pc1,pc2,class)")->required();

    // train
    TableFlags train_t;
    GenParams train_p;
    TrainConfig train_cfg;
    ModelSpec train_spec;
    std::uint32_t train_buckets = kDefaultLogBuckets;
    std::string train_in, train_out, train_log;
    auto* trn = app.add_subcommand("train", "Train the recommender on a dataset");
    train_t.add(trn, true);
    add_sampling_flags(trn, train_p);
    trn->add_option("--in,-i", train_in, "Training dataset CSV")->required();
    trn->add_option("--out,-o", train_out, "Checkpoint path")->required();
    trn->add_option("--epochs", train_cfg.epochs, "Epochs (default 15; 22 for case 2)");
    trn->add_option("--batch-size", train_cfg.batch_size, "Mini-batch size");
    trn->add_option("--lr", train_cfg.learning_rate, "Adam learning rate");
    trn->add_option("--val-fraction", train_cfg.validation_fraction, "Validation split fraction");
    trn->add_option("--seed", train_cfg.seed, "Seed for initialization, split and shuffling");
    trn->add_option("--embedding-dim", train_spec.embedding_dim, "Embedding width per feature");
    trn->add_option("--hidden", train_spec.hidden_units, "Hidden layer width");
    trn->add_option("--log-buckets", train_buckets, "Buckets for log-scaled features");
    trn->add_flag("--baseline", train_spec.baseline_mode, "Plain MLP on standardized raw features (no embeddings)");
    trn->add_option("--log", train_log, "Also write the per-epoch log to this CSV");

    // predict
    std::string pred_model, pred_input;
    auto* prd = app.add_subcommand("predict", "Predict the optimal configuration for one query");
    prd->add_option("--model,-m", pred_model, "Checkpoint path")->required();
    prd->add_option("--input", pred_input, "Comma-separated raw features, e.g. 1024,256,64,14")->required();

    // eval
    TableFlags eval_t;
    std::string eval_model, eval_preds, eval_in, eval_report, eval_ratios, eval_hist;
    unsigned eval_threads = 0;
    auto* evl = app.add_subcommand("eval", "Score model predictions against oracle labels");
    eval_t.add(evl, true);
    auto* model_opt = evl->add_option("--model,-m", eval_model, "Checkpoint path");
    auto* preds_opt = evl->add_option("--predictions", eval_preds, "Score label ids from this file (one per line) instead of a model");
    model_opt->excludes(preds_opt);
    evl->add_option("--in,-i", eval_in, "Test dataset CSV")->required();
    evl->add_option("--report,-r", eval_report, "Report JSON path")->required();
    evl->add_option("--ratios", eval_ratios, "Per-sample ratio CSV (index,ratio)");
    evl->add_option("--hist", eval_hist, "Actual vs predicted label histogram CSV (label,actual,predicted)");
    evl->add_option("--threads", eval_threads, "Worker threads for the oracle re-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*labels) {
            const AnyTable table = build_table(labels_t);
            write_text(labels_out, to_json(table).dump(1) + "\n");
            write_manifest(labels_out, labels, {{"outputs", {labels_out}}}, start);
            std::cout << table_size(table) << " entries written to " << labels_out << "\n";
        } else if (*gen) {
            const AnyTable table = build_table(gen_t);
            const GenParams params = resolve_gen(gen_p, gen_t);
            const unsigned threads = resolve_threads(gen_threads);
            const Dataset ds = generate_dataset(table, gen_n, gen_seed, params, threads,
                                                [](std::size_t done, std::size_t total) {
                                                    std::cerr << "generated " << done << "/" << total << "\n";
                                                });
            write_csv(ds, gen_out);
            write_manifest(gen_out, gen,
                           {{"seeds", {{"gen", gen_seed}}},
                            {"threads", threads},
                            {"label_space", {{"case", case_id(table)}, {"params", params_to_json(table)}}},
                            {"skipped", ds.skipped},
                            {"outputs", {gen_out}}},
                           start);
            std::cout << ds.records.size() << " records written to " << gen_out << " (" << ds.skipped
                      << " infeasible draws resampled)\n";
        } else if (*stats) {
            const Dataset ds = read_csv_any(stats_in);
            const auto hist = class_histogram(ds);
            std::string out = "label,frequency\n";
            for (const auto& [label, freq] : hist) {
                std::ostringstream line;
                line.precision(17);
                line << label << "," << freq << "\n";
                out += line.str();
            }
            write_text(stats_out, out);
            write_manifest(stats_out, stats, {{"inputs", {stats_in}}, {"outputs", {stats_out}}}, start);
            std::cout << hist.size() << " classes over " << ds.records.size() << " records; top " << stats_top
                      << " cover " << head_mass(hist, stats_top) << "\n";
        } else if (*pca) {
            const auto ids = parse_int_list(pca_classes);
            if (ids.size() != 2 || ids[0] < 0 || ids[1] < 0) throw UsageError("--classes needs two label ids");
            const Dataset ds = read_csv_any(pca_in);
            const PcaResult res =
                top2_pca(ds, {static_cast<LabelId>(ids[0]), static_cast<LabelId>(ids[1])});
            std::ostringstream out;
            out.precision(17);
            out << "pc1,pc2,class\n";
            for (const auto& p : res.projections) out << p.pc1 << "," << p.pc2 << "," << p.label << "\n";
            write_text(pca_out, out.str());
            write_manifest(pca_out, pca,
                           {{"inputs", {pca_in}},
                            {"outputs", {pca_out}},
                            {"components", {res.components[0], res.components[1]}},
                            {"eigenvalues", {res.eigenvalues[0], res.eigenvalues[1]}}},
                           start);
            std::cout.precision(6);
            std::cout << std::fixed << "pc1:";
            for (double v : res.components[0]) std::cout << " " << v;
            std::cout << "\npc2:";
            for (double v : res.components[1]) std::cout << " " << v;
            std::cout << "\n";
        } else if (*trn) {
            const AnyTable table = build_table(train_t);
            const GenParams params = resolve_gen(train_p, train_t);
            if (trn->get_option("--epochs")->count() == 0 && case_id(table) == 2) train_cfg.epochs = 22;
            const Dataset ds = load_dataset(train_in, table);

            ModelSpec spec = train_spec;
            spec.encoder = default_encoder(table, params, train_buckets);
            spec.num_classes = table_size(table);
            RecommenderModel model = init_model(spec, train_cfg.seed);
            model.label_space = {{"case", case_id(table)}, {"params", params_to_json(table)}};

            std::ofstream log_file;
            if (!train_log.empty()) {
                log_file.open(train_log, std::ios::trunc);
                if (!log_file) throw IoError("cannot open " + train_log + " for writing");
                log_file << "epoch,train_loss,train_acc,val_acc\n";
            }
            std::cout << "epoch,train_loss,train_acc,val_acc\n";
            const TrainReport report = train(model, ds, train_cfg, [&](const EpochStats& s) {
                std::ostringstream line;
                line.precision(10);
                line << s.epoch << "," << s.train_loss << "," << s.train_accuracy << "," << s.val_accuracy << "\n";
                std::cout << line.str() << std::flush;
                if (log_file) log_file << line.str();
            });
            save_checkpoint(model, train_out);
            write_manifest(train_out, trn,
                           {{"seeds", {{"train", train_cfg.seed}}},
                            {"epochs", train_cfg.epochs},
                            {"label_space", model.label_space},
                            {"train_count", report.train_count},
                            {"val_count", report.val_count},
                            {"final_val_accuracy", report.epochs.back().val_accuracy},
                            {"inputs", {train_in}},
                            {"outputs", {train_out}}},
                           start);
        } else if (*prd) {
            const RecommenderModel model = load_checkpoint(pred_model);
            const AnyTable table = table_of_model(model);
            const auto raw = parse_int_list(pred_input);
            if (raw.size() != model.spec.arity()) {
                throw UsageError("model expects " + std::to_string(model.spec.arity()) + " features, got " +
                                 std::to_string(raw.size()));
            }
            const LabelId id = predict(model, raw);
            std::cout << id << " " << describe_entry(table, id) << "\n";
        } else if (*evl) {
            std::optional<RecommenderModel> model;
            AnyTable table = build_table(eval_t);
            if (!eval_model.empty()) {
                model = load_checkpoint(eval_model);
                table = table_of_model(*model);
            } else if (eval_preds.empty()) {
                throw UsageError("eval needs --model or --predictions");
            }
            const Dataset ds = load_dataset(eval_in, table);
            if (ds.records.empty()) throw DataError("evaluation dataset is empty");

            std::vector<LabelId> preds;
            if (model) {
                for (const auto& r : ds.records) preds.push_back(predict(*model, r.features));
            } else {
                std::ifstream f(eval_preds);
                if (!f) throw IoError("cannot open " + eval_preds);
                std::string line;
                std::size_t line_no = 0;
                while (std::getline(f, line)) {
                    ++line_no;
                    if (line.empty() || (line_no == 1 && line == "label")) continue;
                    const auto v = parse_int_list(line);
                    if (v.size() != 1 || v[0] < 0 || static_cast<std::size_t>(v[0]) >= table_size(table)) {
                        throw DataError("invalid predicted label", line_no);
                    }
                    preds.push_back(static_cast<LabelId>(v[0]));
                }
                if (preds.size() != ds.records.size()) {
                    throw UsageError("prediction count " + std::to_string(preds.size()) + " differs from dataset size " +
                                     std::to_string(ds.records.size()));
                }
            }

            const EvalReport report = normalized_performance(table, ds, preds, resolve_threads(eval_threads));
            write_text(eval_report, to_json(report).dump(2) + "\n");
            json outputs = {eval_report};
            if (!eval_ratios.empty()) {
                std::ostringstream out;
                out.precision(17);
                out << "index,ratio\n";
                for (std::size_t i = 0; i < report.ratios.size(); ++i) out << i << "," << report.ratios[i] << "\n";
                write_text(eval_ratios, out.str());
                outputs.push_back(eval_ratios);
            }
            if (!eval_hist.empty()) {
                std::vector<std::size_t> actual(table_size(table), 0), predicted(table_size(table), 0);
                for (std::size_t i = 0; i < preds.size(); ++i) {
                    ++actual[ds.records[i].label];
                    ++predicted[preds[i]];
                }
                std::string out = "label,actual,predicted\n";
                for (std::size_t c = 0; c < actual.size(); ++c) {
                    if (actual[c] || predicted[c]) {
                        out += std::to_string(c) + "," + std::to_string(actual[c]) + "," + std::to_string(predicted[c]) + "\n";
                    }
                }
                write_text(eval_hist, out);
                outputs.push_back(eval_hist);
            }
            write_manifest(eval_report, evl, {{"inputs", {eval_in}}, {"outputs", outputs}}, start);
            std::cout << to_json(report).dump() << "\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const EncodingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
