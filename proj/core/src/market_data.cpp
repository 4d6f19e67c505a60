#include "qforecast/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace qforecast {

namespace {

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double parse_number(const std::string& field, std::size_t line_no,
                    const char* what) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw DataError("line " + std::to_string(line_no) + ": malformed " +
                        what + " '" + field + "'");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) fields.push_back(cur);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

void check_row_invariants(const OhlcvRow& row, std::size_t line_no) {
    const double body_lo = std::min(row.open, row.close);
    const double body_hi = std::max(row.open, row.close);
    if (!(row.low <= body_lo && body_hi <= row.high)) {
        throw DataError("line " + std::to_string(line_no) + " (" + row.date +
                        "): OHLC ordering violated (low <= open/close <= high)");
    }
    if (row.volume < 0.0) {
        throw DataError("line " + std::to_string(line_no) + " (" + row.date +
                        "): negative volume");
    }
}

std::array<double, kFeatureCount> raw_features(const OhlcvRow& row) {
    return {row.open, row.close, row.high, row.low, row.volume};
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::vector<OhlcvRow> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,open,high,low,close,volume") {
        throw DataError("'" + path +
                        "': expected header 'date,open,high,low,close,volume'");
    }

    std::vector<OhlcvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) {
            throw DataError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                            std::to_string(fields.size()));
        }
        OhlcvRow row;
        row.date = fields[0];
        if (!valid_iso_date(row.date)) {
            throw DataError("line " + std::to_string(line_no) + ": malformed date '" +
                            row.date + "' (want YYYY-MM-DD)");
        }
        row.open = parse_number(fields[1], line_no, "open");
        row.high = parse_number(fields[2], line_no, "high");
        row.low = parse_number(fields[3], line_no, "low");
        row.close = parse_number(fields[4], line_no, "close");
        row.volume = parse_number(fields[5], line_no, "volume");
        check_row_invariants(row, line_no);
        if (!rows.empty() && row.date <= rows.back().date) {
            throw DataError("line " + std::to_string(line_no) + ": date " + row.date +
                            " does not increase over " + rows.back().date);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<std::vector<MarketSample>, NormalizationStats> normalize_and_label(
    const std::vector<OhlcvRow>& rows, std::size_t fit_rows) {
    if (rows.size() < 2) {
        throw DataError("need at least 2 rows to derive next-day labels");
    }
    if (fit_rows == 0) fit_rows = rows.size();
    fit_rows = std::min(fit_rows, rows.size());

    NormalizationStats stats;
    for (int f = 0; f < kFeatureCount; ++f) {
        stats.min[f] = raw_features(rows[0])[f];
        stats.max[f] = stats.min[f];
    }
    for (std::size_t i = 1; i < fit_rows; ++i) {
        const auto feats = raw_features(rows[i]);
        for (int f = 0; f < kFeatureCount; ++f) {
            stats.min[f] = std::min(stats.min[f], feats[f]);
            stats.max[f] = std::max(stats.max[f], feats[f]);
        }
    }
    for (int f = 0; f < kFeatureCount; ++f) {
        if (stats.max[f] == stats.min[f]) {
            throw DataError(std::string("feature '") + kFeatureNames[f] +
                            "' is constant over the fit range; min-max scaling undefined");
        }
    }

    std::vector<MarketSample> samples;
    samples.reserve(rows.size() - 1);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto feats = raw_features(rows[i]);
        MarketSample s;
        for (int f = 0; f < kFeatureCount; ++f) {
            const double scaled = (feats[f] - stats.min[f]) / (stats.max[f] - stats.min[f]);
            s.features[f] = std::clamp(scaled, 0.0, 1.0);
        }
        s.label = rows[i + 1].close > rows[i].close ? 1 : 0;
        s.next_return = rows[i + 1].close / rows[i].close - 1.0;
        samples.push_back(s);
    }
    return {std::move(samples), stats};
}

SplitDataset chronological_split(std::vector<MarketSample> samples, double ratio,
                                 NormalizationStats stats) {
    if (samples.size() < 5) {
        throw DataError("need at least 5 samples for a train/test split");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DataError("split ratio must lie in (0,1)");
    }
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(samples.size())));
    SplitDataset out;
    out.stats = stats;
    out.train.assign(samples.begin(), samples.begin() + n_train);
    out.test.assign(samples.begin() + n_train, samples.end());
    return out;
}

SplitDataset prepare_dataset(const std::vector<OhlcvRow>& rows, double ratio) {
    if (rows.size() < 2) {
        throw DataError("need at least 2 rows to derive next-day labels");
    }
    const std::size_t n_samples = rows.size() - 1;
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n_samples)));
    auto [samples, stats] = normalize_and_label(rows, std::max<std::size_t>(n_train, 2));
    return chronological_split(std::move(samples), ratio, stats);
}

std::vector<OhlcvRow> synthetic_series(std::uint64_t seed, int n_days, double trend,
                                       double noise, double signal_strength) {
    if (n_days < 2) throw DataError("synthetic series needs at least 2 days");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<OhlcvRow> rows;
    rows.reserve(n_days);

    double prev_close = 100.0;
    double prev_ret = 0.0;
    // Dates are synthetic and merely strictly increasing.
    int year = 2015, month = 1, day = 1;
    for (int t = 0; t < n_days; ++t) {
        const double momentum =
            (t == 0 || prev_ret == 0.0)
                ? 0.0
                : signal_strength * noise * (prev_ret > 0.0 ? 1.0 : -1.0);
        double ret = trend + momentum + noise * gauss(rng);
        ret = std::clamp(ret, -0.5, 0.5);

        OhlcvRow row;
        row.open = prev_close;
        row.close = prev_close * (1.0 + ret);
        const double body_hi = std::max(row.open, row.close);
        const double body_lo = std::min(row.open, row.close);
        row.high = body_hi * (1.0 + 0.5 * noise * unit(rng));
        row.low = body_lo * (1.0 - 0.5 * noise * unit(rng));
        // Volume varies independently of price noise so it never degenerates.
        row.volume = 1.0e6 * (1.0 + 0.5 * unit(rng) + 5.0 * std::abs(ret));

        char date[40];
        std::snprintf(date, sizeof(date), "%04d-%02d-%02d", year, month, day);
        row.date = date;
        if (++day > 28) {
            day = 1;
            if (++month > 12) {
                month = 1;
                ++year;
            }
        }

        rows.push_back(std::move(row));
        prev_close = rows.back().close;
        prev_ret = ret;
    }
    return rows;
}

void write_ohlcv_csv(const std::string& path, const std::vector<OhlcvRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "date,open,high,low,close,volume\n";
    for (const auto& r : rows) {
        out << r.date << ',' << format_value(r.open) << ',' << format_value(r.high)
            << ',' << format_value(r.low) << ',' << format_value(r.close) << ','
            << format_value(r.volume) << '\n';
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

void write_samples_csv(const std::string& path,
                       const std::vector<MarketSample>& samples) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "f1,f2,f3,f4,f5,label\n";
    for (const auto& s : samples) {
        for (int f = 0; f < kFeatureCount; ++f) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", s.features[f]);
            out << buf << ',';
        }
        out << s.label << '\n';
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<MarketSample> load_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "f1,f2,f3,f4,f5,label") {
        throw DataError("'" + path + "': expected header 'f1,f2,f3,f4,f5,label'");
    }
    std::vector<MarketSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) {
            throw DataError("line " + std::to_string(line_no) + ": expected 6 fields");
        }
        MarketSample s;
        for (int f = 0; f < kFeatureCount; ++f) {
            s.features[f] = parse_number(fields[f], line_no, kFeatureNames[f]);
        }
        const double label = parse_number(fields[5], line_no, "label");
        if (label != 0.0 && label != 1.0) {
            throw DataError("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        s.label = static_cast<int>(label);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace qforecast
