#include "qforecast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace qforecast {

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        throw std::domain_error("correlation undefined for a constant series");
    }
    return sab / std::sqrt(saa * sbb);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

}  // namespace

ConfusionCounts confusion_counts(std::span<const int> predicted,
                                 std::span<const int> actual) {
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("prediction/actual length mismatch");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1) {
            actual[i] == 1 ? ++c.tp : ++c.fp;
        } else {
            actual[i] == 1 ? ++c.fn : ++c.tn;
        }
    }
    return c;
}

ClassificationMetrics classification_metrics(const ConfusionCounts& counts) {
    if (counts.total() == 0) {
        throw std::invalid_argument("classification metrics over zero samples");
    }
    ClassificationMetrics m;
    m.accuracy = static_cast<double>(counts.tp + counts.tn) /
                 static_cast<double>(counts.total());
    if (counts.tp + counts.fp == 0) {
        m.precision = 0.0;
        m.precision_degenerate = true;
    } else {
        m.precision = static_cast<double>(counts.tp) /
                      static_cast<double>(counts.tp + counts.fp);
    }
    if (counts.tp + counts.fn == 0) {
        m.recall = 0.0;
        m.recall_degenerate = true;
    } else {
        m.recall = static_cast<double>(counts.tp) /
                   static_cast<double>(counts.tp + counts.fn);
    }
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

double sharpe_ratio(std::span<const int> predictions,
                    std::span<const double> realized_returns) {
    if (predictions.size() != realized_returns.size() || predictions.size() < 2) {
        throw std::invalid_argument("sharpe_ratio needs >= 2 aligned observations");
    }
    const std::size_t n = predictions.size();
    std::vector<double> strat(n);
    for (std::size_t i = 0; i < n; ++i) {
        strat[i] = (predictions[i] == 1 ? 1.0 : 0.0) * realized_returns[i];
    }
    double mean = 0.0;
    for (double r : strat) mean += r;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double r : strat) var += (r - mean) * (r - mean);
    var /= static_cast<double>(n - 1);
    if (var <= 0.0) {
        throw std::domain_error("degenerate strategy: zero return variance");
    }
    return mean / std::sqrt(var) * std::sqrt(252.0);
}

double information_coefficient(std::span<const double> scores,
                               std::span<const double> realized_returns) {
    if (scores.size() != realized_returns.size() || scores.size() < 3) {
        throw std::invalid_argument("information_coefficient needs >= 3 aligned observations");
    }
    for (double v : scores) {
        if (!std::isfinite(v)) throw std::invalid_argument("scores must be finite");
    }
    for (double v : realized_returns) {
        if (!std::isfinite(v)) throw std::invalid_argument("returns must be finite");
    }
    const auto ra = average_ranks(scores);
    const auto rb = average_ranks(realized_returns);
    return pearson(ra, rb);
}

nlohmann::ordered_json op_count_comparison(std::span<const std::string> names,
                                           std::span<const CostModelRecord> records) {
    if (names.size() != records.size() || names.size() < 2) {
        throw std::invalid_argument("op_count_comparison needs >= 2 model records");
    }
    nlohmann::ordered_json j;
    nlohmann::ordered_json absolute = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
        absolute[names[i]] = {
            {"cost_model", records[i].cost_model},
            {"units_per_forward", records[i].units_per_forward},
            {"parameter_count", records[i].parameter_count},
            {"forward_passes_per_gradient", records[i].forward_passes_per_gradient},
            {"ops_per_epoch", records[i].ops_per_epoch},
            {"total_training_ops", records[i].total_training_ops},
        };
    }
    j["absolute"] = std::move(absolute);
    nlohmann::ordered_json ratios = nlohmann::ordered_json::object();
    for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = 0; b < names.size(); ++b) {
            if (a == b) continue;
            const std::string key = names[a] + "_over_" + names[b];
            const double num = static_cast<double>(records[a].total_training_ops);
            const double den = static_cast<double>(records[b].total_training_ops);
            ratios[key] = den > 0.0 ? num / den : 0.0;
        }
    }
    j["total_ops_ratios"] = std::move(ratios);
    j["published_reference"] = published_reference_tables()["table2"];
    return j;
}

nlohmann::ordered_json published_reference_tables() {
    // Benchmark rows quoted from the reference publication. The timing and
    // step-count claims cannot be checked by classical simulation (simulating
    // a quantum circuit classically costs more, not less), so they are
    // carried verbatim with an explicit not_reproducible flag. The accuracy
    // figures depend on an original data pipeline that is not specified, so
    // they are flagged not_attempted.
    nlohmann::ordered_json j;
    j["table2"] = nlohmann::ordered_json::array({
        {{"model", "ann"},
         {"training_time_relative", "100% (baseline)"},
         {"accuracy_percent", 69.2},
         {"computational_steps_reduction", "N/A"},
         {"steps", 1000},
         {"status", "not_reproducible"}},
        {{"model", "qqbn"},
         {"training_time_relative", "3.2% of ANN"},
         {"accuracy_percent", 71.6},
         {"computational_steps_reduction", "96.8% Faster than ANN"},
         {"steps", 32},
         {"status", "not_reproducible"}},
        {{"model", "qqtn"},
         {"training_time_relative", "60-65% of QQBN"},
         {"accuracy_percent", 73.5},
         {"computational_steps_reduction", "35-40% Faster than QQBN"},
         {"status", "not_reproducible"}},
    });
    j["table3"] = nlohmann::ordered_json::array({
        {{"model", "ann"},
         {"accuracy_percent", 69.2},
         {"precision_percent", 67.5},
         {"recall_percent", 70.0},
         {"f1_percent", 68.7},
         {"status", "not_attempted"}},
        {{"model", "qqbn"},
         {"accuracy_percent", 71.6},
         {"precision_percent", 70.5},
         {"recall_percent", 71.9},
         {"f1_percent", 71.2},
         {"status", "not_attempted"}},
        {{"model", "qqtn"},
         {"accuracy_percent", 73.5},
         {"precision_percent", 73.0},
         {"recall_percent", 73.8},
         {"f1_percent", 73.4},
         {"status", "not_attempted"}},
    });
    return j;
}

std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::ordered_json report_to_json(const ComparisonReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = "qforecast-report-v1";
    j["metadata"] = {{"seed", report.seed},
                     {"config_hash", report.config_hash},
                     {"data_fingerprint", report.data_fingerprint},
                     {"test_samples", report.test_actuals.size()}};
    j["config"] = report.config;
    j["metric_definitions"] = {
        {"sharpe",
         "long-when-1/flat strategy; mean/std(n-1) of daily strategy returns, "
         "annualized by sqrt(252), zero risk-free rate; definition supplied by "
         "this artifact"},
        {"ic",
         "Spearman rank correlation of p_up scores against realized next-day "
         "returns, average-rank ties; definition supplied by this artifact"},
    };

    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    std::vector<std::string> names;
    std::vector<CostModelRecord> costs;
    for (const auto& m : report.models) {
        nlohmann::ordered_json jm;
        jm["name"] = m.name;
        jm["status"] = m.failure.empty() ? "ok" : "failed";
        if (!m.failure.empty()) {
            jm["error"] = m.failure;
            models.push_back(std::move(jm));
            continue;
        }
        nlohmann::ordered_json metrics;
        metrics["accuracy"] = m.metrics.accuracy;
        metrics["precision"] = m.metrics.precision;
        metrics["recall"] = m.metrics.recall;
        metrics["f1"] = m.metrics.f1;
        nlohmann::ordered_json flags = nlohmann::ordered_json::array();
        if (m.metrics.precision_degenerate) flags.push_back("precision_degenerate");
        if (m.metrics.recall_degenerate) flags.push_back("recall_degenerate");
        if (!m.sharpe) flags.push_back("sharpe_degenerate");
        if (!m.ic) flags.push_back("ic_undefined");
        metrics["sharpe"] = m.sharpe ? nlohmann::ordered_json(*m.sharpe)
                                     : nlohmann::ordered_json(nullptr);
        metrics["ic"] = m.ic ? nlohmann::ordered_json(*m.ic)
                             : nlohmann::ordered_json(nullptr);
        metrics["degenerate_flags"] = std::move(flags);
        jm["metrics"] = std::move(metrics);
        jm["op_counts"] = {
            {"cost_model", m.cost.cost_model},
            {"units_per_forward", m.cost.units_per_forward},
            {"parameter_count", m.cost.parameter_count},
            {"forward_passes_per_gradient", m.cost.forward_passes_per_gradient},
            {"ops_per_epoch", m.cost.ops_per_epoch},
            {"total_training_ops", m.cost.total_training_ops},
        };
        jm["final_train_loss"] = m.final_train_loss;
        jm["final_train_accuracy"] = m.final_train_accuracy;
        jm["epochs_trained"] = m.history.epochs.size();
        jm["history_file"] = "history_" + m.name + ".csv";
        jm["description"] = m.description;
        models.push_back(std::move(jm));
        names.push_back(m.name);
        costs.push_back(m.cost);
    }
    j["models"] = std::move(models);
    if (names.size() >= 2) {
        j["op_count_comparison"] = op_count_comparison(names, costs);
    }
    j["published_reference"] = published_reference_tables();
    return j;
}

bool any_model_failed(const ComparisonReport& report) {
    for (const auto& m : report.models) {
        if (!m.failure.empty()) return true;
    }
    return false;
}

void emit_plot_data(std::span<const ModelSeries> models,
                    std::span<const int> actuals, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        auto out = open_output((fs::path(out_dir) / "cost_curves.csv").string());
        out << "epoch,model,loss\n";
        for (const auto& m : models) {
            for (const auto& rec : m.history->epochs) {
                out << rec.epoch << ',' << m.name << ','
                    << format_sig12(rec.train_loss) << '\n';
            }
        }
    }

    {
        auto out = open_output((fs::path(out_dir) / "predictions.csv").string());
        out << "index,actual";
        for (const auto& m : models) out << ',' << m.name;
        out << '\n';
        for (std::size_t i = 0; i < actuals.size(); ++i) {
            out << i << ',' << actuals[i];
            for (const auto& m : models) {
                out << ',' << (i < m.predictions.size() ? m.predictions[i] : 0);
            }
            out << '\n';
        }
    }

    for (const auto& m : models) {
        auto out = open_output((fs::path(out_dir) / ("residuals_" + m.name + ".csv")).string());
        out << "index,actual,predicted,p_up,residual\n";
        for (std::size_t i = 0; i < actuals.size() && i < m.predictions.size(); ++i) {
            const double residual = static_cast<double>(actuals[i]) - m.p_up[i];
            out << i << ',' << actuals[i] << ',' << m.predictions[i] << ','
                << format_sig12(m.p_up[i]) << ',' << format_sig12(residual) << '\n';
        }
    }
}

void write_report_files(const ComparisonReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        auto out = open_output((fs::path(out_dir) / "report.json").string());
        out << report_to_json(report).dump(2) << '\n';
    }

    std::vector<ModelSeries> series;
    series.reserve(report.models.size());
    for (const auto& m : report.models) {
        if (!m.failure.empty()) continue;
        auto out = open_output((fs::path(out_dir) / ("history_" + m.name + ".csv")).string());
        out << "epoch,train_loss,train_accuracy,cumulative_ops\n";
        for (const auto& rec : m.history.epochs) {
            out << rec.epoch << ',' << format_sig12(rec.train_loss) << ','
                << format_sig12(rec.train_accuracy) << ',' << rec.cumulative_ops
                << '\n';
        }
        series.push_back(ModelSeries{m.name, &m.history, m.test_predictions, m.test_p_up});
    }
    emit_plot_data(series, report.test_actuals, out_dir);
}

}  // namespace qforecast
