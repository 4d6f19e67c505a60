// Command-line surface: train / eval / bench / encode / synth-data.
// Exit codes: 0 success, 2 usage or validation, 3 data, 4 training failure.

#include "qforecast/encoders.hpp"
#include "qforecast/market_data.hpp"
#include "qforecast/metrics.hpp"
#include "qforecast/training.hpp"
#include "qforecast/vqc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace qforecast;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

struct CliOptions {
    std::string model;
    std::string data;
    std::string config;
    std::string out = ".";
    std::string scheme;
    std::string features;
    std::uint64_t seed = 0;
    int epochs = -1;
    double lr = 0.001;
    int batch = 32;
    double delta_theta = 1e-3;
    std::string fd_scheme = "forward";
    std::string optimizer = "adam";
    int threads = 1;
    int days = 500;
    double signal = 0.9;
    bool paper_reference = false;
};

struct OptionHandles {
    CLI::Option* seed = nullptr;
    CLI::Option* epochs = nullptr;
    CLI::Option* lr = nullptr;
    CLI::Option* batch = nullptr;
    CLI::Option* delta_theta = nullptr;
    CLI::Option* fd_scheme = nullptr;
    CLI::Option* optimizer = nullptr;
    CLI::Option* threads = nullptr;
};

OptionHandles add_training_flags(CLI::App* cmd, CliOptions& opt) {
    OptionHandles h;
    h.seed = cmd->add_option("--seed", opt.seed, "Seed for every random source");
    h.epochs = cmd->add_option("--epochs", opt.epochs,
                               "Epoch count (default 200 classical, 100 quantum)");
    h.lr = cmd->add_option("--lr", opt.lr, "Learning rate (default 0.001)");
    h.batch = cmd->add_option("--batch", opt.batch, "Mini-batch size (default 32)");
    h.delta_theta = cmd->add_option("--delta-theta", opt.delta_theta,
                                    "Finite-difference step (default 1e-3)");
    h.fd_scheme = cmd->add_option("--fd-scheme", opt.fd_scheme,
                                  "Gradient scheme: forward|central")
                      ->check(CLI::IsMember({"forward", "central"}));
    h.optimizer = cmd->add_option("--optimizer", opt.optimizer,
                                  "Optimizer: adam|plain_gd")
                      ->check(CLI::IsMember({"adam", "plain_gd"}));
    h.threads = cmd->add_option("--threads", opt.threads,
                                "Worker threads (outputs are independent of N)")
                    ->check(CLI::PositiveNumber);
    return h;
}

TrainConfig resolve_config(const CliOptions& opt, const OptionHandles& h) {
    TrainConfig cfg;
    if (!opt.config.empty()) {
        std::ifstream in(opt.config);
        if (!in) throw DataError("cannot open config '" + opt.config + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("config '" + opt.config + "': " + e.what());
        }
        cfg = config_from_json(j);
    }
    if (h.seed && h.seed->count()) cfg.seed = opt.seed;
    if (h.epochs && h.epochs->count()) cfg.epochs = opt.epochs;
    if (h.lr && h.lr->count()) cfg.learning_rate = opt.lr;
    if (h.batch && h.batch->count()) cfg.batch_size = opt.batch;
    if (h.delta_theta && h.delta_theta->count()) cfg.delta_theta = opt.delta_theta;
    if (h.fd_scheme && h.fd_scheme->count()) {
        cfg.fd_scheme = fd_scheme_from_string(opt.fd_scheme);
    }
    if (h.optimizer && h.optimizer->count()) {
        cfg.optimizer = optimizer_from_string(opt.optimizer);
    }
    if (h.threads && h.threads->count()) cfg.threads = opt.threads;
    validate_config(cfg);
    return cfg;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

void print_metrics_line(const std::string& tag, const ClassificationMetrics& m) {
    std::printf("%-10s accuracy %.4f  precision %.4f  recall %.4f  f1 %.4f\n",
                tag.c_str(), m.accuracy, m.precision, m.recall, m.f1);
}

ClassificationMetrics test_metrics(std::span<const int> preds,
                                   std::span<const int> actuals) {
    return classification_metrics(confusion_counts(preds, actuals));
}

int cmd_train(const CliOptions& opt, const TrainConfig& cfg) {
    const auto rows = load_csv(opt.data);
    const auto data = prepare_dataset(rows);
    const ModelKind kind = model_from_string(opt.model);

    fs::create_directories(opt.out);
    write_text(fs::path(opt.out) / "run_config.json", config_to_json(cfg).dump(2) + "\n");

    TrainHistory history;
    std::vector<int> test_preds(data.test.size());
    std::vector<double> test_p_up(data.test.size());
    nlohmann::ordered_json checkpoint;

    if (kind == ModelKind::Ann) {
        auto [params, hist] = train_classical(data, cfg);
        history = std::move(hist);
        const Matrix x_test = features_matrix(data.test);
        const auto [out, cache] = model_forward(params, x_test, Activation::Softmax);
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            test_p_up[i] = out(1, i);
            test_preds[i] = test_p_up[i] >= 0.5 ? 1 : 0;
        }
        checkpoint = mlp_to_json(params);
    } else {
        ParameterizedCircuit circuit =
            kind == ModelKind::Qqbn ? build_qbn_ansatz() : build_qqtn_ansatz();
        std::mt19937_64 rng(cfg.seed);
        init_theta(circuit, rng);
        auto [trained, hist] = train_quantum(std::move(circuit), data, cfg);
        history = std::move(hist);
        const EncodedDataset test_enc = encode_dataset(trained, data.test);
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            const Prediction p = predict_encoded(trained, trained.theta, test_enc, i);
            test_preds[i] = p.label_hat;
            test_p_up[i] = p.p_up;
        }
        checkpoint = circuit_to_json(trained);
    }

    const std::string name = to_string(kind);
    write_text(fs::path(opt.out) / ("checkpoint_" + name + ".json"),
               checkpoint.dump(2) + "\n");
    {
        std::ostringstream hist_csv;
        hist_csv << "epoch,train_loss,train_accuracy,cumulative_ops\n";
        for (const auto& rec : history.epochs) {
            hist_csv << rec.epoch << ',' << format_sig12(rec.train_loss) << ','
                     << format_sig12(rec.train_accuracy) << ',' << rec.cumulative_ops
                     << '\n';
        }
        write_text(fs::path(opt.out) / ("history_" + name + ".csv"), hist_csv.str());
    }
    const std::vector<ModelSeries> series{
        {name, &history, test_preds, test_p_up}};
    const auto actuals = labels_vector(data.test);
    emit_plot_data(series, actuals, opt.out);

    if (!history.epochs.empty()) {
        std::printf("%-10s final train loss %.6f  train accuracy %.4f\n", name.c_str(),
                    history.epochs.back().train_loss,
                    history.epochs.back().train_accuracy);
    }
    print_metrics_line(name + " test", test_metrics(test_preds, actuals));
    std::printf("artifacts written to %s\n", opt.out.c_str());
    return kExitOk;
}

int cmd_eval(const CliOptions& opt, const TrainConfig& cfg) {
    const auto rows = load_csv(opt.data);
    const auto data = prepare_dataset(rows);
    const ModelKind kind = model_from_string(opt.model);
    const std::string name = to_string(kind);

    const fs::path checkpoint_path = fs::path(opt.out) / ("checkpoint_" + name + ".json");
    std::ifstream in(checkpoint_path);
    if (!in) throw DataError("cannot open checkpoint '" + checkpoint_path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint '" + checkpoint_path.string() + "': " + e.what());
    }

    std::vector<int> preds(data.test.size());
    std::vector<double> p_up(data.test.size());
    if (kind == ModelKind::Ann) {
        const MlpParams params = mlp_from_json(j);
        const Matrix x_test = features_matrix(data.test);
        const auto [out, cache] = model_forward(params, x_test, Activation::Softmax);
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            p_up[i] = out(1, i);
            preds[i] = p_up[i] >= 0.5 ? 1 : 0;
        }
    } else {
        const ParameterizedCircuit circuit = circuit_from_json(j);
        const EncodedDataset test_enc = encode_dataset(circuit, data.test);
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            const Prediction p = predict_encoded(circuit, circuit.theta, test_enc, i);
            preds[i] = p.label_hat;
            p_up[i] = p.p_up;
        }
    }
    (void)cfg;

    const auto actuals = labels_vector(data.test);
    print_metrics_line(name + " test", test_metrics(preds, actuals));
    std::vector<double> returns;
    returns.reserve(data.test.size());
    for (const auto& s : data.test) returns.push_back(s.next_return);
    try {
        std::printf("%-10s sharpe %.4f\n", name.c_str(), sharpe_ratio(preds, returns));
    } catch (const std::domain_error&) {
        std::printf("%-10s sharpe degenerate (flat strategy)\n", name.c_str());
    }
    try {
        std::printf("%-10s ic %.4f\n", name.c_str(),
                    information_coefficient(p_up, returns));
    } catch (const std::domain_error&) {
        std::printf("%-10s ic undefined (constant scores)\n", name.c_str());
    }
    return kExitOk;
}

int cmd_bench(const CliOptions& opt, const TrainConfig& cfg) {
    const auto rows = load_csv(opt.data);
    const auto data = prepare_dataset(rows);

    const ComparisonReport report = run_comparison(data, cfg);
    write_report_files(report, opt.out);

    std::printf("model      accuracy precision recall   f1       sharpe     ic\n");
    for (const auto& m : report.models) {
        if (!m.failure.empty()) {
            std::printf("%-10s FAILED: %s\n", m.name.c_str(), m.failure.c_str());
            continue;
        }
        std::printf("%-10s %-8.4f %-9.4f %-8.4f %-8.4f ", m.name.c_str(),
                    m.metrics.accuracy, m.metrics.precision, m.metrics.recall,
                    m.metrics.f1);
        if (m.sharpe) {
            std::printf("%-10.4f ", *m.sharpe);
        } else {
            std::printf("%-10s ", "degenerate");
        }
        if (m.ic) {
            std::printf("%.4f\n", *m.ic);
        } else {
            std::printf("undefined\n");
        }
    }
    std::printf("\noperation counts (abstract cost model)\n");
    for (const auto& m : report.models) {
        if (!m.failure.empty()) continue;
        std::printf("%-10s %s: %llu per forward, %llu passes per gradient, %llu total\n",
                    m.name.c_str(), m.cost.cost_model.c_str(),
                    static_cast<unsigned long long>(m.cost.units_per_forward),
                    static_cast<unsigned long long>(m.cost.forward_passes_per_gradient),
                    static_cast<unsigned long long>(m.cost.total_training_ops));
    }

    if (opt.paper_reference) {
        const auto ref = published_reference_tables();
        std::printf("\npublished reference values (reproduction status in brackets)\n");
        for (const auto& row : ref.at("table2")) {
            std::printf("  %-6s time %-14s accuracy %4.1f%%  [%s]\n",
                        row.at("model").get<std::string>().c_str(),
                        row.at("training_time_relative").get<std::string>().c_str(),
                        row.at("accuracy_percent").get<double>(),
                        row.at("status").get<std::string>().c_str());
        }
        for (const auto& row : ref.at("table3")) {
            std::printf("  %-6s precision %4.1f%% recall %4.1f%% f1 %4.1f%%  [%s]\n",
                        row.at("model").get<std::string>().c_str(),
                        row.at("precision_percent").get<double>(),
                        row.at("recall_percent").get<double>(),
                        row.at("f1_percent").get<double>(),
                        row.at("status").get<std::string>().c_str());
        }
    }

    std::printf("\nreport written to %s\n",
                (fs::path(opt.out) / "report.json").string().c_str());
    if (any_model_failed(report)) {
        std::fprintf(stderr, "one or more models failed; see report.json\n");
        return kExitTraining;
    }
    return kExitOk;
}

int cmd_encode(const CliOptions& opt) {
    QuditRegister reg = basis_state(2, 1, 0);

    const bool integer_scheme = opt.scheme == "basis" || opt.scheme == "qft";
    if (integer_scheme) {
        // --features d,n,symbol
        int d = 0, n = 0;
        long long symbol = -1;
        if (std::sscanf(opt.features.c_str(), "%d,%d,%lld", &d, &n, &symbol) != 3 ||
            symbol < 0) {
            std::fprintf(stderr, "scheme '%s' expects --features d,n,symbol\n",
                         opt.scheme.c_str());
            return kExitUsage;
        }
        reg = opt.scheme == "basis"
                  ? basis_encode(static_cast<std::size_t>(symbol), d, n)
                  : qft_encode(static_cast<std::size_t>(symbol), d, n);
    } else {
        std::vector<double> values;
        if (!opt.data.empty()) {
            // --features holds a sample row index into the normalized data
            const auto rows = load_csv(opt.data);
            const auto [samples, stats] = normalize_and_label(rows);
            std::size_t index = 0;
            try {
                index = std::stoull(opt.features);
            } catch (const std::exception&) {
                std::fprintf(stderr, "--features must be a row index when --data is given\n");
                return kExitUsage;
            }
            if (index >= samples.size()) {
                std::fprintf(stderr, "row index %zu out of range (%zu samples)\n", index,
                             samples.size());
                return kExitUsage;
            }
            values.assign(samples[index].features.begin(),
                          samples[index].features.end());
        } else {
            std::stringstream ss(opt.features);
            std::string field;
            while (std::getline(ss, field, ',')) {
                try {
                    values.push_back(std::stod(field));
                } catch (const std::exception&) {
                    std::fprintf(stderr, "malformed feature '%s'\n", field.c_str());
                    return kExitUsage;
                }
            }
            if (values.empty()) {
                std::fprintf(stderr, "no feature values supplied\n");
                return kExitUsage;
            }
        }

        if (opt.scheme == "amplitude") {
            reg = encode_feature_register(values, EncodingScheme::Amplitude, 2);
        } else if (opt.scheme == "phase-qubit") {
            reg = encode_feature_register(values, EncodingScheme::Phase, 2);
        } else if (opt.scheme == "phase-qutrit") {
            reg = encode_feature_register(values, EncodingScheme::Phase, 3);
        } else {
            std::fprintf(stderr, "unknown scheme '%s'\n", opt.scheme.c_str());
            return kExitUsage;
        }
    }

    std::printf("scheme %s: %d wire(s) of dimension %d, %zu amplitudes\n",
                opt.scheme.c_str(), reg.wires(), reg.dim(), reg.size());
    const auto probs = born_probabilities(reg);
    for (std::size_t i = 0; i < reg.size(); ++i) {
        if (std::abs(reg[i]) < 1e-15 && probs[i] < 1e-15) continue;
        std::printf("  |%zu>  amp % .9f %+.9fi   p %.9f\n", i, reg[i].real(),
                    reg[i].imag(), probs[i]);
    }
    return kExitOk;
}

int cmd_synth_data(const CliOptions& opt) {
    if (opt.days < 2) {
        std::fprintf(stderr, "--days must be at least 2\n");
        return kExitUsage;
    }
    const auto rows = synthetic_series(opt.seed, opt.days, 0.0002, 0.01, opt.signal);
    write_ohlcv_csv(opt.out, rows);
    std::printf("wrote %d rows to %s\n", opt.days, opt.out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CliOptions opt;
    CLI::App app{"classical vs qubit vs qutrit stock-direction models on a shared "
                 "statevector simulator"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    auto* train = app.add_subcommand("train", "Train one model and write its artifacts");
    train->add_option("--model", opt.model, "ann|qqbn|qqtn")->required();
    train->add_option("--data", opt.data, "OHLCV CSV path")->required();
    train->add_option("--config", opt.config, "JSON config file (flags override)");
    train->add_option("--out", opt.out, "Output directory")->envname("QFORECAST_OUT");
    const auto train_handles = add_training_flags(train, opt);

    auto* eval = app.add_subcommand("eval", "Evaluate a trained checkpoint on the test split");
    eval->add_option("--model", opt.model, "ann|qqbn|qqtn")->required();
    eval->add_option("--data", opt.data, "OHLCV CSV path")->required();
    eval->add_option("--config", opt.config, "JSON config file (flags override)");
    eval->add_option("--out", opt.out, "Directory holding checkpoint_<model>.json")
        ->envname("QFORECAST_OUT");
    const auto eval_handles = add_training_flags(eval, opt);

    auto* bench = app.add_subcommand("bench", "Train and compare all three models");
    bench->add_option("--data", opt.data, "OHLCV CSV path")->required();
    bench->add_option("--config", opt.config, "JSON config file (flags override)");
    bench->add_option("--out", opt.out, "Output directory")->envname("QFORECAST_OUT");
    bench->add_flag("--paper-reference", opt.paper_reference,
                    "Print the published reference tables with reproduction flags");
    const auto bench_handles = add_training_flags(bench, opt);

    auto* encode = app.add_subcommand("encode", "Print an encoded statevector");
    encode->add_option("--scheme", opt.scheme,
                       "amplitude|phase-qubit|phase-qutrit|basis|qft")
        ->required()
        ->check(CLI::IsMember({"amplitude", "phase-qubit", "phase-qutrit", "basis", "qft"}));
    encode->add_option("--features", opt.features,
                       "Comma-separated values; a row index with --data; d,n,symbol "
                       "for basis/qft")
        ->required();
    encode->add_option("--data", opt.data, "OHLCV CSV to draw the row from");

    auto* synth = app.add_subcommand("synth-data", "Write a synthetic OHLCV CSV");
    synth->add_option("--days", opt.days, "Number of rows (>= 2)");
    synth->add_option("--seed", opt.seed, "Generator seed");
    synth->add_option("--signal", opt.signal, "Momentum coupling in [0,1]");
    synth->add_option("--out", opt.out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(train)) return cmd_train(opt, resolve_config(opt, train_handles));
        if (app.got_subcommand(eval)) return cmd_eval(opt, resolve_config(opt, eval_handles));
        if (app.got_subcommand(bench)) return cmd_bench(opt, resolve_config(opt, bench_handles));
        if (app.got_subcommand(encode)) return cmd_encode(opt);
        if (app.got_subcommand(synth)) return cmd_synth_data(opt);
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const TrainingError& e) {
        std::fprintf(stderr, "training error: %s\n", e.what());
        return kExitTraining;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid value: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "out of range: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTraining;
    }
    return kExitUsage;
}
