#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace extnet {

// One daily observation; `missing` true means the value is absent (the value
// field is then 0 and meaningless).
struct DailyRecord {
  std::string station;
  Date date;
  double value = 0.0;
  bool missing = false;
};

struct DailyTable {
  std::vector<DailyRecord> records;
};

// One input line the parser refused, with its 1-based line number and reason.
struct RejectedRow {
  std::size_t line = 0;
  std::string content;
  std::string reason;
};

struct DailyParseResult {
  DailyTable table;
  std::vector<RejectedRow> rejects;
};

// CSV with the exact header `station,date,prcp`: ISO dates, values in mm,
// empty or NA value = missing. Malformed rows (bad date, negative value,
// wrong field count, non-numeric value) are collected into `rejects`;
// an unreadable file or wrong header fails outright. Fields are plain
// (no quoting); CRLF line endings are accepted.
DailyParseResult parse_daily_csv(const std::string& path);

// GHCN-Daily fixed-width `.dly` reader, PRCP element only: one line per
// station-month, 31 day groups of (value, mflag, qflag, sflag); value -9999 =
// missing, any nonblank quality flag = missing, tenths of mm converted to mm.
// Negative values other than -9999 reject the line. Day slots beyond the
// month's length are ignored. Lines shorter than the fixed width are
// space-padded first (trailing blank flags are commonly trimmed by tooling).
DailyParseResult parse_daily_dly(const std::string& path);

// Serialize in the canonical CSV schema (stable float formatting; missing =
// empty field). parse_daily_csv(write_daily_csv(t)) reproduces t.
void write_daily_csv(const DailyTable& table, const std::string& path);

enum class CoverageBasis {
  full_period,  // denominator = every day of the configured year range
  record_span,  // denominator = year range intersected with the station's
                // own first..last observation dates
};

// Keep the stations whose fraction of non-missing days reaches min_fraction
// (in (0, 1]) over the coverage period. Kept stations retain all their
// records. Duplicate dates count once, covered if any record that day is
// non-missing.
DailyTable filter_stations(const DailyTable& table, double min_fraction, int year_first,
                           int year_last, CoverageBasis basis = CoverageBasis::full_period);

// Station-by-year block maxima over the month window (per-block completeness
// rule from block_maxima). Stations are ordered lexicographically by id.
// Stations with fewer than 2 valid blocks are dropped; fewer than 2
// surviving stations is an error.
MaximaMatrix seasonal_maxima(const DailyTable& table, const std::vector<int>& months,
                             int year_first, int year_last, double completeness = 0.8);

struct SstBox {
  double lon_min = -95.0;
  double lon_max = -83.0;
  double lat_min = 23.0;
  double lat_max = 29.0;
};

// Yearly covariate: per labeled year, the unweighted mean over a 12-month
// window (starting `window_start_month` of the previous year) of
// cosine-latitude-weighted spatial means over the box.
struct SstSeries {
  std::vector<long long> years;
  std::vector<double> value;
  int window_start_month = 7;
  SstBox box;
};

struct SstParseResult {
  SstSeries series;
  std::vector<RejectedRow> rejects;
};

// CSV with the exact header `lon,lat,year,month,sst`; empty or NA sst =
// missing cell that month. Cells whose centers lie inside the box (inclusive
// bounds) participate. A labeled year is dropped when any of its 12 window
// months has no usable cell; no usable cell in the box at all, or no
// surviving year, is an error. window_start_month = 1 means the calendar
// year itself.
SstParseResult sst_area_average(const std::string& path, const SstBox& box, int year_first,
                                int year_last, int window_start_month = 7);

}  // namespace extnet
