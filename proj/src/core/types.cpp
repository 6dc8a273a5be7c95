#include "core/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace extnet {

StationSet::StationSet(std::vector<Station> stations, CoordSystem system)
    : stations_(std::move(stations)), system_(system) {
  if (stations_.size() < 2) {
    fail(ErrorCode::invalid_argument, "StationSet: need at least 2 stations");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : stations_) {
    if (s.id.empty()) fail(ErrorCode::invalid_argument, "StationSet: empty station id");
    if (!seen.insert(s.id).second) {
      fail(ErrorCode::invalid_argument, "StationSet: duplicate station id '" + s.id + "'");
    }
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
      fail(ErrorCode::invalid_argument, "StationSet: non-finite coordinate for '" + s.id + "'");
    }
    if (system_ == CoordSystem::geographic) {
      if (s.x < -180.0 || s.x > 180.0 || s.y < -90.0 || s.y > 90.0) {
        fail(ErrorCode::invalid_argument,
             "StationSet: coordinates out of lon/lat range for '" + s.id + "'");
      }
    }
  }
}

StationSet StationSet::uniform_planar(std::size_t count, std::uint64_t seed) {
  if (count < 2) fail(ErrorCode::invalid_argument, "uniform_planar: need at least 2 stations");
  CounterRng rng(seed, CounterRng::stream_id(stream::stations, 0));
  std::vector<Station> stations;
  stations.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string id = std::to_string(i + 1);
    if (id.size() < 3) id.insert(0, 3 - id.size(), '0');
    id.insert(0, 1, 'S');
    const double x = rng.uniform();
    const double y = rng.uniform();
    stations.push_back({std::move(id), x, y});
  }
  return StationSet(std::move(stations), CoordSystem::planar);
}

std::ptrdiff_t StationSet::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    if (stations_[i].id == id) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

StationSet StationSet::subset(const std::vector<std::string>& ids) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < stations_.size(); ++i) index.emplace(stations_[i].id, i);
  std::vector<Station> picked;
  picked.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      fail(ErrorCode::invalid_argument, "StationSet::subset: unknown station id '" + id + "'");
    }
    picked.push_back(stations_[it->second]);
  }
  return StationSet(std::move(picked), system_);
}

double DistanceMatrix::max_distance() const {
  double best = 0.0;
  for (const double v : values_) best = std::max(best, v);
  return best;
}

double haversine_km(double lon1, double lat1, double lon2, double lat2) {
  constexpr double kEarthRadiusKm = 6371.0;
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  const double phi1 = lat1 * kDegToRad;
  const double phi2 = lat2 * kDegToRad;
  const double dphi = (lat2 - lat1) * kDegToRad;
  const double dlam = (lon2 - lon1) * kDegToRad;
  const double s1 = std::sin(0.5 * dphi);
  const double s2 = std::sin(0.5 * dlam);
  const double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

DistanceMatrix pairwise_distances(const StationSet& stations) {
  const std::size_t d = stations.size();
  DistanceMatrix dm(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double dist;
      if (stations.coord_system() == CoordSystem::planar) {
        const double dx = stations[i].x - stations[j].x;
        const double dy = stations[i].y - stations[j].y;
        dist = std::hypot(dx, dy);
      } else {
        dist = haversine_km(stations[i].x, stations[i].y, stations[j].x, stations[j].y);
      }
      dm.at(i, j) = dist;
      dm.at(j, i) = dist;
    }
  }
  return dm;
}

MaximaMatrix::MaximaMatrix(std::size_t blocks, std::size_t stations, std::vector<double> values,
                           std::vector<unsigned char> valid, std::vector<long long> block_labels,
                           std::vector<std::string> station_ids)
    : m_(blocks),
      d_(stations),
      values_(std::move(values)),
      valid_(std::move(valid)),
      labels_(std::move(block_labels)),
      ids_(std::move(station_ids)) {
  if (values_.size() != m_ * d_ || valid_.size() != m_ * d_) {
    fail(ErrorCode::invalid_argument, "MaximaMatrix: value/mask size mismatch");
  }
  if (labels_.size() != m_) fail(ErrorCode::invalid_argument, "MaximaMatrix: label count mismatch");
  if (ids_.size() != d_) fail(ErrorCode::invalid_argument, "MaximaMatrix: station id count mismatch");
  for (std::size_t i = 0; i < d_; ++i) {
    std::size_t n_valid = 0;
    for (std::size_t t = 0; t < m_; ++t) {
      if (valid_[t * d_ + i]) {
        ++n_valid;
        if (!std::isfinite(values_[t * d_ + i])) {
          fail(ErrorCode::invalid_argument,
               "MaximaMatrix: non-finite value in valid cell, station '" + ids_[i] + "'");
        }
      }
    }
    if (n_valid < 2) {
      fail(ErrorCode::invalid_argument,
           "MaximaMatrix: station '" + ids_[i] + "' has fewer than 2 valid blocks");
    }
  }
}

MaximaMatrix MaximaMatrix::resample_rows(const std::vector<std::size_t>& rows) const {
  std::vector<double> values(rows.size() * d_);
  std::vector<unsigned char> valid(rows.size() * d_);
  std::vector<long long> labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t t = rows[r];
    std::copy_n(values_.begin() + t * d_, d_, values.begin() + r * d_);
    std::copy_n(valid_.begin() + t * d_, d_, valid.begin() + r * d_);
    labels[r] = labels_[t];
  }
  return MaximaMatrix(rows.size(), d_, std::move(values), std::move(valid), std::move(labels), ids_);
}

RankMatrix::RankMatrix(std::size_t blocks, std::size_t stations, std::vector<double> values,
                       std::vector<unsigned char> valid, RankConvention convention,
                       std::vector<long long> block_labels)
    : m_(blocks),
      d_(stations),
      values_(std::move(values)),
      valid_(std::move(valid)),
      convention_(convention),
      labels_(std::move(block_labels)) {
  if (values_.size() != m_ * d_ || valid_.size() != m_ * d_) {
    fail(ErrorCode::invalid_argument, "RankMatrix: value/mask size mismatch");
  }
  if (labels_.empty()) {
    labels_.resize(m_);
    for (std::size_t t = 0; t < m_; ++t) labels_[t] = static_cast<long long>(t);
  } else if (labels_.size() != m_) {
    fail(ErrorCode::invalid_argument, "RankMatrix: label count mismatch");
  }
}

void ranks_of_subset(const std::vector<double>& values, const std::vector<std::size_t>& positions,
                     RankConvention convention, std::vector<double>* out) {
  const std::size_t n = positions.size();
  out->assign(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[positions[a]] < values[positions[b]];
  });
  const double denom =
      (convention == RankConvention::over_m) ? static_cast<double>(n) : static_cast<double>(n + 1);
  std::size_t k = 0;
  while (k < n) {
    std::size_t k2 = k + 1;
    while (k2 < n && values[positions[order[k2]]] == values[positions[order[k]]]) ++k2;
    // ranks k+1 .. k2 share the average rank
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + k2);
    for (std::size_t j = k; j < k2; ++j) (*out)[order[j]] = avg_rank / denom;
    k = k2;
  }
}

RankMatrix edf_ranks(std::size_t blocks, std::size_t stations, const std::vector<double>& values,
                     const std::vector<unsigned char>& valid, RankConvention convention,
                     std::vector<long long> block_labels) {
  const std::size_t m = blocks;
  const std::size_t d = stations;
  if (values.size() != m * d || valid.size() != m * d) {
    fail(ErrorCode::invalid_argument, "edf_ranks: value/mask size mismatch");
  }
  std::vector<double> ranks(m * d, 0.0);
  std::vector<unsigned char> rank_valid(valid);
  std::vector<std::size_t> positions;
  std::vector<double> column_ranks;
  std::vector<double> column(m);
  for (std::size_t i = 0; i < d; ++i) {
    positions.clear();
    for (std::size_t t = 0; t < m; ++t) {
      column[t] = values[t * d + i];
      if (valid[t * d + i]) positions.push_back(t);
    }
    ranks_of_subset(column, positions, convention, &column_ranks);
    for (std::size_t k = 0; k < positions.size(); ++k) {
      ranks[positions[k] * d + i] = column_ranks[k];
    }
  }
  return RankMatrix(m, d, std::move(ranks), std::move(rank_valid), convention,
                    std::move(block_labels));
}

RankMatrix edf_ranks(const MaximaMatrix& maxima, RankConvention convention) {
  // The MaximaMatrix invariant (>= 2 valid blocks per station) already holds,
  // so every station carries usable ranks here.
  return edf_ranks(maxima.blocks(), maxima.stations(), maxima.values(), maxima.valid(),
                   convention, maxima.block_labels());
}

bool is_valid_date(const Date& date) {
  if (date.year < 1 || date.month < 1 || date.month > 12 || date.day < 1) return false;
  return date.day <= days_in_month(date.year, date.month);
}

int days_in_month(int year, int month) {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

long long day_number(const Date& date) {
  // Howard Hinnant's days_from_civil: shift the year so it starts in March,
  // making leap days the last day of the shifted year.
  long long y = date.year;
  const int m = date.month;
  const int d = date.day;
  y -= m <= 2 ? 1 : 0;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const long long yoe = y - era * 400;                                  // [0, 399]
  const long long doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
  const long long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
  return era * 146097 + doe - 719468;
}

BlockMaxima block_maxima(const std::vector<DailyPoint>& series, const BlockRule& rule) {
  if (rule.months.empty()) fail(ErrorCode::invalid_argument, "block_maxima: empty month window");
  if (rule.year_last < rule.year_first) {
    fail(ErrorCode::invalid_argument, "block_maxima: empty year range");
  }
  if (!(rule.completeness >= 0.0 && rule.completeness <= 1.0)) {
    fail(ErrorCode::invalid_argument, "block_maxima: completeness must be in [0,1]");
  }
  bool in_window[13] = {};
  for (const int m : rule.months) {
    if (m < 1 || m > 12) fail(ErrorCode::invalid_argument, "block_maxima: month out of range");
    in_window[m] = true;
  }

  const std::size_t n_years = static_cast<std::size_t>(rule.year_last - rule.year_first + 1);
  BlockMaxima out;
  out.labels.resize(n_years);
  out.values.assign(n_years, 0.0);
  out.valid.assign(n_years, 0);
  for (std::size_t k = 0; k < n_years; ++k) out.labels[k] = rule.year_first + static_cast<long long>(k);

  // Collapse duplicate dates by maximum so the result does not depend on row
  // order; a date counts as observed if any of its duplicates is non-missing.
  std::unordered_map<int, std::pair<double, bool>> by_day;  // key: y*10000+m*100+d
  by_day.reserve(series.size());
  for (const auto& p : series) {
    if (!is_valid_date(p.date)) fail(ErrorCode::invalid_argument, "block_maxima: invalid date");
    if (p.date.year < rule.year_first || p.date.year > rule.year_last) continue;
    if (!in_window[p.date.month]) continue;
    const int key = p.date.year * 10000 + p.date.month * 100 + p.date.day;
    auto [it, inserted] = by_day.try_emplace(key, p.value, !p.missing);
    if (!inserted) {
      if (!p.missing) {
        if (!it->second.second || p.value > it->second.first) it->second.first = p.value;
        it->second.second = true;
      }
    }
  }

  std::vector<std::size_t> observed(n_years, 0);
  std::vector<double> maxima(n_years, 0.0);
  std::vector<bool> any(n_years, false);
  for (const auto& [key, vb] : by_day) {
    if (!vb.second) continue;
    const std::size_t y = static_cast<std::size_t>(key / 10000 - rule.year_first);
    ++observed[y];
    if (!any[y] || vb.first > maxima[y]) maxima[y] = vb.first;
    any[y] = true;
  }

  for (std::size_t y = 0; y < n_years; ++y) {
    std::size_t window_days = 0;
    for (int m = 1; m <= 12; ++m) {
      if (in_window[m]) window_days += static_cast<std::size_t>(days_in_month(rule.year_first + static_cast<int>(y), m));
    }
    const double frac =
        window_days == 0 ? 0.0 : static_cast<double>(observed[y]) / static_cast<double>(window_days);
    if (any[y] && frac >= rule.completeness) {
      out.values[y] = maxima[y];
      out.valid[y] = 1;
    }
  }
  return out;
}

}  // namespace extnet
