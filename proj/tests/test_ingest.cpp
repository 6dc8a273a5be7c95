#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/ingest.hpp"
#include "core/types.hpp"
#include "doctest.h"

using namespace extnet;

namespace {

std::filesystem::path test_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "extnet_ingest_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  const auto path = test_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  return path.string();
}

// Build one GHCN-Daily line: 11-char station, 4-char year, 2-char month,
// 4-char element, then a (value, mflag, qflag, sflag) group per entry.
struct DayGroup {
  int value = -9999;
  char qflag = ' ';
};

std::string dly_line(const std::string& station, int year, int month,
                     const std::string& element, const std::vector<DayGroup>& days) {
  char head[32];
  std::snprintf(head, sizeof(head), "%-11s%04d%02d%-4s", station.c_str(), year, month,
                element.c_str());
  std::string line = head;
  for (const DayGroup& g : days) {
    char group[16];
    std::snprintf(group, sizeof(group), "%5d %c ", g.value, g.qflag);
    line += group;
  }
  return line;
}

}  // namespace

TEST_CASE("daily CSV parsing: values, missing markers, and every reject reason") {
  const std::string path = write_file(
      "daily.csv",
      "station,date,prcp\r\n"     // CRLF tolerated
      "A,2001-06-01,12.5\n"
      "A,2001-06-02,\n"           // missing (empty)
      "A,2001-06-03,NA\n"         // missing (NA)
      "A,2001-06-04,0\n"
      "\n"                        // blank line skipped
      "A,2001-06-05\n"            // expected 3 fields
      ",2001-06-06,1.0\n"         // empty station id
      "A,2001-13-01,1.0\n"        // invalid date
      "A,2001-02-29,1.0\n"        // invalid date (2001 not a leap year)
      "A,2001-06-07,abc\n"        // invalid value
      "A,2001-06-08,-3\n");       // negative value
  const DailyParseResult r = parse_daily_csv(path);
  REQUIRE(r.table.records.size() == 4);
  CHECK(r.table.records[0].station == "A");
  CHECK(r.table.records[0].date.year == 2001);
  CHECK(r.table.records[0].value == 12.5);
  CHECK_FALSE(r.table.records[0].missing);
  CHECK(r.table.records[1].missing);
  CHECK(r.table.records[2].missing);
  CHECK(r.table.records[3].value == 0.0);

  REQUIRE(r.rejects.size() == 6);
  CHECK(r.rejects[0].reason == "expected 3 fields");
  CHECK(r.rejects[0].line == 7);  // 1-based, header is line 1, blank line counted
  CHECK(r.rejects[1].reason == "empty station id");
  CHECK(r.rejects[2].reason == "invalid date");
  CHECK(r.rejects[3].reason == "invalid date");
  CHECK(r.rejects[4].reason == "invalid value");
  CHECK(r.rejects[5].reason == "negative value");
  CHECK(r.rejects[5].content == "A,2001-06-08,-3");
}

TEST_CASE("daily CSV header is checked exactly") {
  const std::string path = write_file("badheader.csv", "station,date,precip\nA,2001-06-01,1\n");
  CHECK_THROWS_AS((void)parse_daily_csv(path), Error);
  CHECK_THROWS_AS((void)parse_daily_csv(write_file("empty.csv", "")), Error);
  CHECK_THROWS_AS((void)parse_daily_csv((test_dir() / "no_such_file.csv").string()), Error);
}

TEST_CASE("GHCN .dly parsing: units, flags, and skipped elements") {
  std::vector<DayGroup> june(30);
  june[0] = {0, ' '};       // 0.0 mm
  june[1] = {125, ' '};     // 12.5 mm
  june[2] = {-9999, ' '};   // missing
  june[3] = {80, 'X'};      // quality-flagged -> missing
  for (std::size_t d = 4; d < 30; ++d) june[d] = {10, ' '};

  std::string content = dly_line("GULF0000001", 2001, 6, "PRCP", june) + "\n";
  content += dly_line("GULF0000001", 2001, 6, "TMAX", june) + "\n";  // skipped silently
  const std::string path = write_file("month.dly", content);
  const DailyParseResult r = parse_daily_dly(path);
  CHECK(r.rejects.empty());
  REQUIRE(r.table.records.size() == 30);  // June has 30 days; TMAX ignored
  CHECK(r.table.records[0].value == 0.0);
  CHECK(r.table.records[1].value == 12.5);
  CHECK(r.table.records[2].missing);
  CHECK(r.table.records[3].missing);
  CHECK(r.table.records[4].value == 1.0);
  CHECK(r.table.records[0].station == "GULF0000001");
  CHECK(r.table.records[0].date.month == 6);
  CHECK(r.table.records[29].date.day == 30);
}

TEST_CASE("GHCN .dly parsing: short, padded, and rejected lines") {
  std::vector<DayGroup> days(31);
  for (auto& g : days) g = {7, ' '};

  SUBCASE("a line trimmed after the last value is padded with blank flags") {
    std::string line = dly_line("ST000000001", 2001, 7, "PRCP", days);
    // cut right after day 31's 5-char value field (drop its three flags)
    line.resize(21 + 30 * 8 + 5);
    const DailyParseResult r = parse_daily_dly(write_file("trimmed.dly", line + "\n"));
    CHECK(r.rejects.empty());
    CHECK(r.table.records.size() == 31);
    CHECK(r.table.records[30].value == 0.7);
  }
  SUBCASE("short line") {
    const DailyParseResult r = parse_daily_dly(write_file("short.dly", "ST1 2001\n"));
    CHECK(r.table.records.empty());
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].reason == "short line");
    CHECK(r.rejects[0].line == 1);
  }
  SUBCASE("malformed year") {
    std::string line = dly_line("ST000000001", 2001, 7, "PRCP", days);
    line[12] = 'x';
    const DailyParseResult r = parse_daily_dly(write_file("badyear.dly", line + "\n"));
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].reason == "malformed station/year/month");
  }
  SUBCASE("month out of range") {
    const std::string line = dly_line("ST000000001", 2001, 13, "PRCP", days);
    const DailyParseResult r = parse_daily_dly(write_file("badmonth.dly", line + "\n"));
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].reason == "invalid year/month");
  }
  SUBCASE("a garbage value field rejects the whole month") {
    std::string line = dly_line("ST000000001", 2001, 7, "PRCP", days);
    line[22] = 'z';  // inside day 1's value field
    const DailyParseResult r = parse_daily_dly(write_file("badval.dly", line + "\n"));
    CHECK(r.table.records.empty());
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].reason == "malformed value field");
  }
  SUBCASE("a negative non-sentinel value rejects the whole month") {
    std::vector<DayGroup> bad = days;
    bad[10] = {-5, ' '};
    const std::string line = dly_line("ST000000001", 2001, 7, "PRCP", bad);
    const DailyParseResult r = parse_daily_dly(write_file("negval.dly", line + "\n"));
    CHECK(r.table.records.empty());
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].reason == "negative value");
  }
}

TEST_CASE("writing daily CSV round-trips through the parser") {
  DailyTable table;
  table.records.push_back({"B", {2001, 6, 1}, 3.25, false});
  table.records.push_back({"B", {2001, 6, 2}, 0.0, true});
  table.records.push_back({"A", {2000, 12, 31}, 0.1, false});
  const std::string path = (test_dir() / "roundtrip.csv").string();
  write_daily_csv(table, path);
  const DailyParseResult r = parse_daily_csv(path);
  CHECK(r.rejects.empty());
  REQUIRE(r.table.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.table.records[i].station == table.records[i].station);
    CHECK(day_number(r.table.records[i].date) == day_number(table.records[i].date));
    CHECK(r.table.records[i].missing == table.records[i].missing);
    if (!r.table.records[i].missing) CHECK(r.table.records[i].value == table.records[i].value);
  }
}

TEST_CASE("coverage filtering under the two bases") {
  // Station A: every day of 2001 observed, nothing in 2002.
  // Station B: every day of both years observed.
  DailyTable table;
  for (int year : {2001, 2002}) {
    for (int month = 1; month <= 12; ++month) {
      for (int day = 1; day <= days_in_month(year, month); ++day) {
        if (year == 2001) table.records.push_back({"A", {year, month, day}, 1.0, false});
        table.records.push_back({"B", {year, month, day}, 1.0, false});
      }
    }
  }
  auto ids = [](const DailyTable& t) {
    std::set<std::string> s;
    for (const auto& rec : t.records) s.insert(rec.station);
    return s;
  };
  // Full-period coverage of A over 2001-2002 is exactly 365/730 = 0.5.
  const DailyTable full = filter_stations(table, 0.6, 2001, 2002, CoverageBasis::full_period);
  CHECK(ids(full) == std::set<std::string>{"B"});
  // Over its own record span A is complete.
  const DailyTable span = filter_stations(table, 0.6, 2001, 2002, CoverageBasis::record_span);
  CHECK(ids(span) == std::set<std::string>{"A", "B"});
  // At the boundary the >= comparison keeps A under the full-period basis too.
  const DailyTable half = filter_stations(table, 0.5, 2001, 2002, CoverageBasis::full_period);
  CHECK(ids(half) == std::set<std::string>{"A", "B"});

  CHECK_THROWS_AS((void)filter_stations(table, 0.0, 2001, 2002), Error);
  CHECK_THROWS_AS((void)filter_stations(table, 1.5, 2001, 2002), Error);
  CHECK_THROWS_AS((void)filter_stations(table, 0.5, 2002, 2001), Error);
}

TEST_CASE("coverage counts a day once and missing records do not cover") {
  DailyTable table;
  // duplicate observations on one day; one missing record on another day
  table.records.push_back({"A", {2001, 1, 1}, 1.0, false});
  table.records.push_back({"A", {2001, 1, 1}, 2.0, false});
  table.records.push_back({"A", {2001, 1, 2}, 0.0, true});
  table.records.push_back({"A", {2001, 1, 3}, 1.0, false});
  // record span = Jan 1..3 (missing record extends the span); covered = 2 days
  const DailyTable keep = filter_stations(table, 0.6, 2001, 2001, CoverageBasis::record_span);
  CHECK(keep.records.size() == 4);  // 2/3 >= 0.6 -> kept, all records retained
  const DailyTable drop = filter_stations(table, 0.7, 2001, 2001, CoverageBasis::record_span);
  CHECK(drop.records.empty());  // 2/3 < 0.7
}

TEST_CASE("seasonal maxima: ordering, sparse-station drop, and labels") {
  DailyTable table;
  auto add_year = [&](const std::string& id, int year, double peak) {
    for (int month : {6, 7, 8}) {
      for (int day = 1; day <= days_in_month(year, month); ++day) {
        const double v = (month == 7 && day == 15) ? peak : 1.0;
        table.records.push_back({id, {year, month, day}, v, false});
      }
    }
  };
  // columns must come out sorted by id: insert out of order
  for (int year = 2000; year < 2004; ++year) add_year("zeta", year, 40.0 + year - 2000);
  for (int year = 2000; year < 2004; ++year) add_year("alpha", year, 10.0 + year - 2000);
  add_year("sparse", 2000, 99.0);  // only one valid block -> dropped

  const MaximaMatrix mm = seasonal_maxima(table, {6, 7, 8}, 2000, 2003, 0.8);
  REQUIRE(mm.stations() == 2);
  CHECK(mm.station_id(0) == "alpha");
  CHECK(mm.station_id(1) == "zeta");
  REQUIRE(mm.blocks() == 4);
  CHECK(mm.block_label(0) == 2000);
  CHECK(mm.block_label(3) == 2003);
  CHECK(mm.value(0, 0) == 10.0);
  CHECK(mm.value(3, 1) == 43.0);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(mm.is_valid(t, 0));
    CHECK(mm.is_valid(t, 1));
  }

  // with only the sparse station and one other, fewer than 2 columns survive
  DailyTable thin;
  for (const auto& rec : table.records)
    if (rec.station != "zeta") thin.records.push_back(rec);
  for (auto& rec : thin.records) {
    if (rec.station == "alpha" && rec.date.year > 2000) rec.missing = true;
  }
  CHECK_THROWS_AS((void)seasonal_maxima(thin, {6, 7, 8}, 2000, 2003, 0.8), Error);
  CHECK_THROWS_AS((void)seasonal_maxima(DailyTable{}, {6, 7, 8}, 2000, 2003, 0.8), Error);
}

TEST_CASE("seasonal maxima honor the completeness threshold per block") {
  DailyTable table;
  for (const std::string id : {"a", "b"}) {
    for (int year : {2000, 2001, 2002}) {
      for (int day = 1; day <= 30; ++day) {
        // year 2001 of station a: only 20 of 30 June days present (0.667 < 0.8)
        const bool skip = id == "a" && year == 2001 && day > 20;
        if (!skip) table.records.push_back({id, {year, 6, day}, double(day), false});
      }
    }
  }
  const MaximaMatrix mm = seasonal_maxima(table, {6}, 2000, 2002, 0.8);
  REQUIRE(mm.stations() == 2);
  CHECK(mm.is_valid(0, 0));
  CHECK_FALSE(mm.is_valid(1, 0));  // station a, 2001
  CHECK(mm.is_valid(1, 1));
  CHECK(mm.value(2, 0) == 30.0);
}

TEST_CASE("SST area averages: weighting, windows, and dropped years") {
  // Two grid cells inside the box (lat 24 and lat 28), one outside.
  // Months: Jul 2000 .. Jun 2002 fully populated except 2002-03, which is
  // only present for the out-of-box cell (so the month is empty in the box).
  std::string csv = "lon,lat,year,month,sst\n";
  auto add = [&](double lon, double lat, int year, int month, const std::string& sst) {
    csv += std::to_string(lon) + "," + std::to_string(lat) + "," + std::to_string(year) + "," +
           std::to_string(month) + "," + sst + "\n";
  };
  for (int year = 2000; year <= 2002; ++year) {
    for (int month = 1; month <= 12; ++month) {
      if (year == 2000 && month < 7) continue;
      if (year == 2002 && month > 6) continue;
      if (!(year == 2002 && month == 3)) {
        add(-90.0, 24.0, year, month, std::to_string(20.0 + month));
        add(-88.0, 28.0, year, month, std::to_string(26.0));
      }
      add(-70.0, 28.0, year, month, "99.0");  // outside the box, ignored
    }
  }
  const std::string path = write_file("sst.csv", csv);
  const SstBox box{-95.0, -83.0, 23.0, 29.0};
  const SstParseResult r = sst_area_average(path, box, 2001, 2002, 7);
  CHECK(r.rejects.empty());
  // 2002 needs Jul 2001..Jun 2002; March 2002 is empty in the box -> dropped
  REQUIRE(r.series.years.size() == 1);
  CHECK(r.series.years[0] == 2001);

  // hand-computed expectation: per month, cos-lat weighted mean of the two
  // cells; per year, plain mean over the 12 window months (Jul..Jun)
  const double w1 = std::cos(24.0 * 3.14159265358979323846 / 180.0);
  const double w2 = std::cos(28.0 * 3.14159265358979323846 / 180.0);
  double expect = 0.0;
  for (int k = 0; k < 12; ++k) {
    const int month = (7 - 1 + k) % 12 + 1;
    expect += (w1 * (20.0 + month) + w2 * 26.0) / (w1 + w2);
  }
  expect /= 12.0;
  CHECK(r.series.value[0] == doctest::Approx(expect).epsilon(1e-14));
  CHECK(r.series.window_start_month == 7);
}

TEST_CASE("SST calendar-year windows and box edges") {
  std::string csv = "lon,lat,year,month,sst\n";
  for (int month = 1; month <= 12; ++month) {
    // exactly on the box corner: inclusive bounds keep it
    csv += "-95.0,29.0,2001," + std::to_string(month) + ",10.0\n";
    // just outside: silently ignored
    csv += "-95.1,29.0,2001," + std::to_string(month) + ",50.0\n";
  }
  const std::string path = write_file("sst_edge.csv", csv);
  const SstBox box{-95.0, -83.0, 23.0, 29.0};
  const SstParseResult r = sst_area_average(path, box, 2001, 2001, 1);
  CHECK(r.rejects.empty());
  REQUIRE(r.series.years.size() == 1);
  CHECK(r.series.value[0] == doctest::Approx(10.0).epsilon(1e-14));

  // nothing in the box at all is an error
  std::string far = "lon,lat,year,month,sst\n-10.0,50.0,2001,1,5.0\n";
  CHECK_THROWS_AS((void)sst_area_average(write_file("sst_far.csv", far), box, 2001, 2001, 1),
                  Error);
}

TEST_CASE("SST reject reasons and validation") {
  const std::string path = write_file(
      "sst_bad.csv",
      "lon,lat,year,month,sst\n"
      "-90,24,2001,1\n"            // expected 5 fields
      "x,24,2001,1,20\n"           // invalid coordinates
      "-90,95,2001,1,20\n"         // invalid latitude
      "-90,24,2001,13,20\n"        // invalid year/month
      "-90,24,20xx,1,20\n"         // invalid year/month
      "-90,24,2001,1,warm\n"       // invalid sst value
      "-90,24,2001,1,\n"           // missing, silently skipped
      "-90,24,2001,1,20\n");       // one good row, every month via window=1? no
  // only month 1 exists, so every labeled year lacks a complete window
  CHECK_THROWS_AS((void)sst_area_average(path, SstBox{-95, -83, 23, 29}, 2001, 2001, 1), Error);

  // rerun against a file with a complete year to inspect the rejects
  std::string csv =
      "lon,lat,year,month,sst\n"
      "-90,24,2001,1\n"
      "x,24,2001,1,20\n"
      "-90,95,2001,1,20\n"
      "-90,24,2001,13,20\n"
      "-90,24,20xx,1,20\n"
      "-90,24,2001,1,warm\n";
  for (int month = 1; month <= 12; ++month)
    csv += "-90,24,2001," + std::to_string(month) + ",20\n";
  const SstParseResult r =
      sst_area_average(write_file("sst_ok.csv", csv), SstBox{-95, -83, 23, 29}, 2001, 2001, 1);
  REQUIRE(r.rejects.size() == 6);
  CHECK(r.rejects[0].reason == "expected 5 fields");
  CHECK(r.rejects[1].reason == "invalid coordinates");
  CHECK(r.rejects[2].reason == "invalid latitude");
  CHECK(r.rejects[3].reason == "invalid year/month");
  CHECK(r.rejects[4].reason == "invalid year/month");
  CHECK(r.rejects[5].reason == "invalid sst value");
  REQUIRE(r.series.years.size() == 1);
  CHECK(r.series.value[0] == doctest::Approx(20.0).epsilon(1e-14));

  CHECK_THROWS_AS(
      (void)sst_area_average(write_file("sst_ok.csv", csv), SstBox{-83, -95, 23, 29}, 2001,
                             2001, 1),
      Error);  // bounds out of order
  CHECK_THROWS_AS((void)sst_area_average(write_file("sst_ok.csv", csv),
                                         SstBox{-95, -83, 23, 29}, 2001, 2001, 13),
                  Error);  // bad window start
  CHECK_THROWS_AS((void)sst_area_average(write_file("sst_ok.csv", csv),
                                         SstBox{-95, -83, 23, 29}, 2002, 2001, 1),
                  Error);  // empty year range
}
