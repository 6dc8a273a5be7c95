#include "core/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "core/error.hpp"
#include "core/format.hpp"

namespace extnet {
namespace {

constexpr std::size_t kDlyLineWidth = 269;  // 21 header chars + 31 * 8 day chars
constexpr const char* kDailyHeader = "station,date,prcp";
constexpr const char* kSstHeader = "lon,lat,year,month,sst";

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_double_field(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(*out);
}

bool parse_int_field(const std::string& s, int* out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_iso_date(const std::string& s, Date* out) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  out->year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
  out->month = (s[5] - '0') * 10 + (s[6] - '0');
  out->day = (s[8] - '0') * 10 + (s[9] - '0');
  return is_valid_date(*out);
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

bool missing_marker(const std::string& s) { return s.empty() || s == "NA"; }

void check_header(const std::vector<std::string>& lines, const char* expected,
                  const std::string& path) {
  if (lines.empty()) fail(ErrorCode::parse, "empty file: " + path);
  if (lines[0] != expected)
    fail(ErrorCode::parse,
         "bad header in " + path + ": expected '" + expected + "', got '" + lines[0] + "'");
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

}  // namespace

DailyParseResult parse_daily_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_header(lines, kDailyHeader, path);

  DailyParseResult out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.empty()) continue;
    const std::size_t line_no = li + 1;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 3) {
      out.rejects.push_back({line_no, line, "expected 3 fields"});
      continue;
    }
    DailyRecord rec;
    rec.station = f[0];
    if (rec.station.empty()) {
      out.rejects.push_back({line_no, line, "empty station id"});
      continue;
    }
    if (!parse_iso_date(f[1], &rec.date)) {
      out.rejects.push_back({line_no, line, "invalid date"});
      continue;
    }
    if (missing_marker(f[2])) {
      rec.missing = true;
    } else if (!parse_double_field(f[2], &rec.value)) {
      out.rejects.push_back({line_no, line, "invalid value"});
      continue;
    } else if (rec.value < 0.0) {
      out.rejects.push_back({line_no, line, "negative value"});
      continue;
    }
    out.table.records.push_back(std::move(rec));
  }
  return out;
}

DailyParseResult parse_daily_dly(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  DailyParseResult out;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string line = lines[li];
    if (line.empty()) continue;
    const std::size_t line_no = li + 1;
    if (line.size() < 21) {
      out.rejects.push_back({line_no, line, "short line"});
      continue;
    }
    if (line.size() < kDlyLineWidth) line.resize(kDlyLineWidth, ' ');

    const std::string element = line.substr(17, 4);
    if (element != "PRCP") continue;  // other elements are valid, just not ours

    const std::string station = trim(line.substr(0, 11));
    int year = 0, month = 0;
    if (station.empty() || !parse_int_field(trim(line.substr(11, 4)), &year) ||
        !parse_int_field(trim(line.substr(15, 2)), &month)) {
      out.rejects.push_back({line_no, lines[li], "malformed station/year/month"});
      continue;
    }
    const int dim = days_in_month(year, month);
    if (dim == 0 || !is_valid_date({year, month, 1})) {
      out.rejects.push_back({line_no, lines[li], "invalid year/month"});
      continue;
    }

    std::vector<DailyRecord> month_records;
    bool ok = true;
    for (int day = 1; day <= dim; ++day) {
      const std::size_t base = 21 + static_cast<std::size_t>(day - 1) * 8;
      int raw = 0;
      if (!parse_int_field(trim(line.substr(base, 5)), &raw)) {
        out.rejects.push_back({line_no, lines[li], "malformed value field"});
        ok = false;
        break;
      }
      DailyRecord rec;
      rec.station = station;
      rec.date = {year, month, day};
      if (raw == -9999) {
        rec.missing = true;
      } else if (raw < 0) {
        out.rejects.push_back({line_no, lines[li], "negative value"});
        ok = false;
        break;
      } else if (line[base + 6] != ' ') {  // nonblank quality flag
        rec.missing = true;
      } else {
        rec.value = static_cast<double>(raw) / 10.0;  // tenths of mm -> mm
      }
      month_records.push_back(std::move(rec));
    }
    if (ok) {
      for (auto& rec : month_records) out.table.records.push_back(std::move(rec));
    }
  }
  return out;
}

void write_daily_csv(const DailyTable& table, const std::string& path) {
  std::ofstream outfile(path, std::ios::binary);
  if (!outfile) fail(ErrorCode::io, "cannot write file: " + path);
  outfile << kDailyHeader << '\n';
  for (const DailyRecord& rec : table.records) {
    outfile << rec.station << ',' << format_date(rec.date) << ',';
    if (!rec.missing) outfile << format_double(rec.value);
    outfile << '\n';
  }
  if (!outfile) fail(ErrorCode::io, "write failed: " + path);
}

DailyTable filter_stations(const DailyTable& table, double min_fraction, int year_first,
                           int year_last, CoverageBasis basis) {
  if (!(min_fraction > 0.0) || !(min_fraction <= 1.0))
    fail(ErrorCode::invalid_argument, "filter_stations: min_fraction must lie in (0, 1]");
  if (year_last < year_first)
    fail(ErrorCode::invalid_argument, "filter_stations: empty year range");

  const long long period_lo = day_number({year_first, 1, 1});
  const long long period_hi = day_number({year_last, 12, 31});

  struct StationCoverage {
    long long first = 0;
    long long last = 0;
    bool any = false;
    std::set<long long> covered;  // distinct non-missing days in the period
  };
  std::unordered_map<std::string, StationCoverage> coverage;
  for (const DailyRecord& rec : table.records) {
    StationCoverage& c = coverage[rec.station];
    const long long day = day_number(rec.date);
    if (!c.any) {
      c.first = day;
      c.last = day;
      c.any = true;
    } else {
      c.first = std::min(c.first, day);
      c.last = std::max(c.last, day);
    }
    if (!rec.missing && day >= period_lo && day <= period_hi) c.covered.insert(day);
  }

  std::unordered_set<std::string> kept;
  for (const auto& [station, c] : coverage) {
    long long lo = period_lo;
    long long hi = period_hi;
    if (basis == CoverageBasis::record_span) {
      lo = std::max(lo, c.first);
      hi = std::min(hi, c.last);
    }
    if (hi < lo) continue;  // no overlap with the study period
    std::size_t n_covered = 0;
    if (basis == CoverageBasis::record_span) {
      for (const long long day : c.covered) {
        if (day >= lo && day <= hi) ++n_covered;
      }
    } else {
      n_covered = c.covered.size();
    }
    const double denom = static_cast<double>(hi - lo + 1);
    if (static_cast<double>(n_covered) / denom >= min_fraction) kept.insert(station);
  }

  DailyTable out;
  for (const DailyRecord& rec : table.records) {
    if (kept.count(rec.station) != 0) out.records.push_back(rec);
  }
  return out;
}

MaximaMatrix seasonal_maxima(const DailyTable& table, const std::vector<int>& months,
                             int year_first, int year_last, double completeness) {
  BlockRule rule;
  rule.months = months;
  rule.year_first = year_first;
  rule.year_last = year_last;
  rule.completeness = completeness;

  std::map<std::string, std::vector<DailyPoint>> by_station;  // ordered: columns sorted by id
  for (const DailyRecord& rec : table.records) {
    by_station[rec.station].push_back({rec.date, rec.value, rec.missing});
  }
  if (by_station.empty())
    fail(ErrorCode::unestimable, "seasonal_maxima: no stations in the table");

  const std::size_t m = static_cast<std::size_t>(year_last - year_first + 1);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> columns;
  std::vector<std::vector<unsigned char>> column_valid;
  for (const auto& [station, series] : by_station) {
    const BlockMaxima bm = block_maxima(series, rule);
    std::size_t n_valid = 0;
    for (const unsigned char v : bm.valid) n_valid += v;
    if (n_valid < 2) continue;  // not usable for pairwise estimation
    ids.push_back(station);
    columns.push_back(bm.values);
    column_valid.push_back(bm.valid);
  }
  if (ids.size() < 2)
    fail(ErrorCode::unestimable,
         "seasonal_maxima: fewer than 2 stations have at least 2 valid blocks");

  const std::size_t d = ids.size();
  std::vector<double> values(m * d, 0.0);
  std::vector<unsigned char> valid(m * d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t t = 0; t < m; ++t) {
      values[t * d + i] = columns[i][t];
      valid[t * d + i] = column_valid[i][t];
    }
  }
  std::vector<long long> labels(m);
  for (std::size_t t = 0; t < m; ++t) labels[t] = year_first + static_cast<long long>(t);
  return MaximaMatrix(m, d, std::move(values), std::move(valid), std::move(labels),
                      std::move(ids));
}

SstParseResult sst_area_average(const std::string& path, const SstBox& box, int year_first,
                                int year_last, int window_start_month) {
  if (!(box.lon_min <= box.lon_max) || !(box.lat_min <= box.lat_max))
    fail(ErrorCode::invalid_argument, "sst_area_average: box bounds out of order");
  if (window_start_month < 1 || window_start_month > 12)
    fail(ErrorCode::invalid_argument, "sst_area_average: window start month must be 1..12");
  if (year_last < year_first)
    fail(ErrorCode::invalid_argument, "sst_area_average: empty year range");

  const std::vector<std::string> lines = read_lines(path);
  check_header(lines, kSstHeader, path);

  struct MonthAcc {
    double weight = 0.0;
    double weighted_value = 0.0;
  };
  std::map<std::pair<int, int>, MonthAcc> monthly;  // (year, month)
  bool any_cell_in_box = false;

  SstParseResult out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.empty()) continue;
    const std::size_t line_no = li + 1;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 5) {
      out.rejects.push_back({line_no, line, "expected 5 fields"});
      continue;
    }
    double lon = 0, lat = 0;
    int year = 0, month = 0;
    if (!parse_double_field(f[0], &lon) || !parse_double_field(f[1], &lat)) {
      out.rejects.push_back({line_no, line, "invalid coordinates"});
      continue;
    }
    if (lat < -90.0 || lat > 90.0) {
      out.rejects.push_back({line_no, line, "invalid latitude"});
      continue;
    }
    if (!parse_int_field(f[2], &year) || !parse_int_field(f[3], &month) || month < 1 ||
        month > 12) {
      out.rejects.push_back({line_no, line, "invalid year/month"});
      continue;
    }
    const bool in_box = lon >= box.lon_min && lon <= box.lon_max && lat >= box.lat_min &&
                        lat <= box.lat_max;
    if (!in_box) continue;
    any_cell_in_box = true;
    if (missing_marker(f[4])) continue;  // missing cells carry no weight
    double sst = 0;
    if (!parse_double_field(f[4], &sst)) {
      out.rejects.push_back({line_no, line, "invalid sst value"});
      continue;
    }
    MonthAcc& acc = monthly[{year, month}];
    const double w = std::cos(lat * 3.14159265358979323846 / 180.0);
    acc.weight += w;
    acc.weighted_value += w * sst;
  }

  if (!any_cell_in_box)
    fail(ErrorCode::unestimable, "sst_area_average: no grid cell inside the box");

  out.series.window_start_month = window_start_month;
  out.series.box = box;
  for (int label = year_first; label <= year_last; ++label) {
    const int base_year = window_start_month == 1 ? label : label - 1;
    double sum = 0.0;
    bool complete = true;
    for (int k = 0; k < 12; ++k) {
      const int mm = (window_start_month - 1 + k) % 12 + 1;
      const int yy = base_year + (window_start_month - 1 + k) / 12;
      const auto it = monthly.find({yy, mm});
      if (it == monthly.end() || !(it->second.weight > 0.0)) {
        complete = false;
        break;
      }
      sum += it->second.weighted_value / it->second.weight;
    }
    if (!complete) continue;
    out.series.years.push_back(label);
    out.series.value.push_back(sum / 12.0);
  }
  if (out.series.years.empty())
    fail(ErrorCode::unestimable,
         "sst_area_average: no labeled year has a complete 12-month window");
  return out;
}

}  // namespace extnet
