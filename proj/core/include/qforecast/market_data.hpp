// OHLCV ingestion, min-max normalization, next-day-direction labeling,
// chronological splitting, and a seeded synthetic series generator with a
// plantable momentum signal.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qforecast {

// Raised for anything wrong with input data: parse failures, invariant
// violations, degenerate normalization. The CLI maps it to exit code 3.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OhlcvRow {
    std::string date;  // ISO-8601 YYYY-MM-DD
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
};

// Feature order follows the reference pipeline: open, close, high, low, volume.
inline constexpr int kFeatureCount = 5;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "open", "close", "high", "low", "volume"};

struct MarketSample {
    std::array<double, kFeatureCount> features{};
    int label = 0;              // 1 iff next-day close strictly increases
    double next_return = 0.0;   // close_{t+1}/close_t - 1, for backtest metrics
};

struct NormalizationStats {
    std::array<double, kFeatureCount> min{};
    std::array<double, kFeatureCount> max{};
};

struct SplitDataset {
    std::vector<MarketSample> train;
    std::vector<MarketSample> test;
    NormalizationStats stats{};
};

// Parses `date,open,high,low,close,volume` rows. Enforces the header, row
// invariants (low <= min(open,close) <= max(open,close) <= high, volume >= 0)
// and strictly increasing dates. Errors name the offending line.
std::vector<OhlcvRow> load_csv(const std::string& path);

// Min-max scales the five features to [0,1] (stats fitted on the first
// `fit_rows` rows; 0 means all rows) and labels each day by the next day's
// close direction. The final row is dropped. Values outside the fitted range
// clamp to [0,1]. Throws DataError on a constant feature in the fit range.
std::pair<std::vector<MarketSample>, NormalizationStats> normalize_and_label(
    const std::vector<OhlcvRow>& rows, std::size_t fit_rows = 0);

// First floor(ratio * n) samples become train, the rest test; no shuffling.
SplitDataset chronological_split(std::vector<MarketSample> samples,
                                 double ratio = 0.8,
                                 NormalizationStats stats = {});

// Leakage-free pipeline: labels all rows, fits normalization stats on the
// training date range only, clamps the test range, splits chronologically.
SplitDataset prepare_dataset(const std::vector<OhlcvRow>& rows, double ratio = 0.8);

// Seeded random walk whose next-day direction correlates with the current
// day's return when signal_strength > 0 (momentum coupling, scaled by
// `noise`). Opens sit at the prior close so the daily move is visible
// intraday. Output always satisfies the OhlcvRow invariants.
std::vector<OhlcvRow> synthetic_series(std::uint64_t seed, int n_days,
                                       double trend, double noise,
                                       double signal_strength);

void write_ohlcv_csv(const std::string& path, const std::vector<OhlcvRow>& rows);

// Sample dump format: f1,f2,f3,f4,f5,label
void write_samples_csv(const std::string& path,
                       const std::vector<MarketSample>& samples);
std::vector<MarketSample> load_samples_csv(const std::string& path);

}  // namespace qforecast
