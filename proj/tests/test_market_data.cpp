#include "qforecast/market_data.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace qforecast;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("qforecast_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("load_csv parses well-formed rows in order") {
    TempDir tmp;
    const auto p = tmp.file("ok.csv");
    write_file(p,
               "date,open,high,low,close,volume\n"
               "2020-01-01,10,11,9,10.5,1000\n"
               "2020-01-02,10.5,12,10,11,1100\n"
               "2020-01-03,11,11.5,10.2,10.4,900\n");
    const auto rows = load_csv(p);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].date == "2020-01-01");
    CHECK(rows[2].close == doctest::Approx(10.4));
}

TEST_CASE("load_csv rejects malformed input with the line number") {
    TempDir tmp;

    const auto no_header = tmp.file("nh.csv");
    write_file(no_header, "2020-01-01,10,11,9,10.5,1000\n");
    CHECK_THROWS_AS(load_csv(no_header), DataError);

    const auto bad_number = tmp.file("bn.csv");
    write_file(bad_number,
               "date,open,high,low,close,volume\n"
               "2020-01-01,10,11,9,abc,1000\n");
    CHECK_THROWS_WITH_AS(load_csv(bad_number),
                         doctest::Contains("line 2"), DataError);

    const auto high_low = tmp.file("hl.csv");
    write_file(high_low,
               "date,open,high,low,close,volume\n"
               "2020-01-01,10,9.5,9,10.5,1000\n");
    CHECK_THROWS_WITH_AS(load_csv(high_low), doctest::Contains("line 2"), DataError);

    const auto dup_date = tmp.file("dd.csv");
    write_file(dup_date,
               "date,open,high,low,close,volume\n"
               "2020-01-01,10,11,9,10.5,1000\n"
               "2020-01-01,10,11,9,10.5,1000\n");
    CHECK_THROWS_AS(load_csv(dup_date), DataError);

    const auto out_of_order = tmp.file("oo.csv");
    write_file(out_of_order,
               "date,open,high,low,close,volume\n"
               "2020-01-02,10,11,9,10.5,1000\n"
               "2020-01-01,10,11,9,10.5,1000\n");
    CHECK_THROWS_AS(load_csv(out_of_order), DataError);
}

TEST_CASE("normalize_and_label derives next-day labels and min-max features") {
    std::vector<OhlcvRow> rows;
    const double closes[] = {100.0, 101.0, 99.0};
    const double vols[] = {10.0, 20.0, 30.0};
    for (int i = 0; i < 3; ++i) {
        OhlcvRow r;
        r.date = "2020-01-0" + std::to_string(i + 1);
        r.open = closes[i];
        r.close = closes[i];
        r.high = closes[i] + 1.0;
        r.low = closes[i] - 1.0;
        r.volume = vols[i];
        rows.push_back(r);
    }
    const auto [samples, stats] = normalize_and_label(rows);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].label == 1);
    CHECK(samples[1].label == 0);
    // volume column [10,20,30] -> [0, 0.5, 1]; samples carry the first two
    CHECK(samples[0].features[4] == doctest::Approx(0.0));
    CHECK(samples[1].features[4] == doctest::Approx(0.5));
    CHECK(stats.min[4] == 10.0);
    CHECK(stats.max[4] == 30.0);

    // equal closes label 0
    rows[2].close = rows[1].close;
    rows[2].open = rows[1].close;
    rows[2].high = rows[1].close + 1.0;
    rows[2].low = rows[1].close - 1.0;
    const auto [samples2, stats2] = normalize_and_label(rows);
    CHECK(samples2[1].label == 0);

    // constant feature errors, naming the feature
    for (auto& r : rows) r.volume = 5.0;
    CHECK_THROWS_WITH_AS(normalize_and_label(rows), doctest::Contains("volume"),
                         DataError);

    CHECK_THROWS_AS(normalize_and_label({rows[0]}), DataError);
}

TEST_CASE("chronological_split keeps order and uses the floor rule") {
    auto samples = test_helpers::separable_samples(1, 10);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].features[2] = static_cast<double>(i) / 10.0;  // order marker
    }
    const auto split = chronological_split(samples, 0.8);
    CHECK(split.train.size() == 8);
    CHECK(split.test.size() == 2);
    CHECK(split.train.front().features[2] == doctest::Approx(0.0));
    CHECK(split.test.front().features[2] == doctest::Approx(0.8));

    const auto tiny = chronological_split(test_helpers::separable_samples(2, 5), 0.8);
    CHECK(tiny.train.size() == 4);
    CHECK(tiny.test.size() == 1);

    CHECK_THROWS_AS(chronological_split(test_helpers::separable_samples(3, 4), 0.8),
                    DataError);
}

TEST_CASE("prepare_dataset fits stats on the training range and clamps the rest") {
    // monotonically rising close: test-range features exceed the training max
    std::vector<OhlcvRow> rows;
    for (int i = 0; i < 20; ++i) {
        OhlcvRow r;
        char date[16];
        std::snprintf(date, sizeof(date), "2020-01-%02d", i + 1);
        r.date = date;
        r.open = 100.0 + i;
        r.close = 100.5 + i;
        r.high = 101.5 + i;
        r.low = 99.5 + i;
        r.volume = 1000.0 + 7.0 * ((i * 13) % 11);
        rows.push_back(r);
    }
    const auto split = prepare_dataset(rows, 0.8);
    CHECK(split.train.size() == 15);
    CHECK(split.test.size() == 4);
    for (const auto& s : split.train) {
        for (double f : s.features) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
    }
    // the last test day's close sits above the training max -> clamped to 1
    CHECK(split.test.back().features[1] == doctest::Approx(1.0));
    // training stats only: the training max close is row 14's close
    CHECK(split.stats.max[1] == doctest::Approx(100.5 + 14));
}

TEST_CASE("synthetic series is deterministic and satisfies row invariants") {
    const auto a = synthetic_series(99, 300, 0.0002, 0.01, 0.9);
    const auto b = synthetic_series(99, 300, 0.0002, 0.01, 0.9);
    REQUIRE(a.size() == 300);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].date == b[i].date);
        CHECK(a[i].close == b[i].close);
        CHECK(a[i].volume == b[i].volume);
        CHECK(a[i].low <= std::min(a[i].open, a[i].close));
        CHECK(std::max(a[i].open, a[i].close) <= a[i].high);
        CHECK(a[i].volume >= 0.0);
        if (i > 0) CHECK(a[i].date > a[i - 1].date);
    }
    CHECK_THROWS_AS(synthetic_series(1, 1, 0.0, 0.01, 0.0), DataError);
}

TEST_CASE("noise-free positive trend gives all-up labels") {
    const auto rows = synthetic_series(7, 50, 0.01, 0.0, 0.5);
    const auto [samples, stats] = normalize_and_label(rows);
    for (const auto& s : samples) CHECK(s.label == 1);
}

TEST_CASE("planted momentum makes the one-rule classifier beat 60 percent") {
    const auto rows = synthetic_series(12345, 2000, 0.0002, 0.01, 0.9);
    const double acc = test_helpers::momentum_rule_accuracy(rows);
    CHECK(acc > 0.6);
}

TEST_CASE("sample CSV round-trips feature and label values") {
    TempDir tmp;
    const auto rows = synthetic_series(5, 50, 0.0, 0.01, 0.5);
    const auto [samples, stats] = normalize_and_label(rows);
    const auto p = tmp.file("samples.csv");
    write_samples_csv(p, samples);
    const auto loaded = load_samples_csv(p);
    REQUIRE(loaded.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(loaded[i].label == samples[i].label);
        for (int f = 0; f < kFeatureCount; ++f) {
            CHECK(std::abs(loaded[i].features[f] - samples[i].features[f]) < 1e-12);
        }
    }
}

TEST_CASE("ohlcv CSV round-trips through the loader") {
    TempDir tmp;
    const auto rows = synthetic_series(21, 40, 0.0005, 0.02, 0.3);
    const auto p = tmp.file("series.csv");
    write_ohlcv_csv(p, rows);
    const auto loaded = load_csv(p);
    REQUIRE(loaded.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(loaded[i].date == rows[i].date);
        CHECK(std::abs(loaded[i].close - rows[i].close) < 1e-9 * rows[i].close);
    }
}
