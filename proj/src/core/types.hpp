#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace extnet {

enum class CoordSystem { planar, geographic };

struct Station {
  std::string id;
  double x = 0.0;  // lon (degrees) when geographic
  double y = 0.0;  // lat (degrees) when geographic
};

// Immutable node set. Ids are unique, count >= 2; geographic coordinates are
// checked against the usual lon/lat ranges.
class StationSet {
 public:
  StationSet(std::vector<Station> stations, CoordSystem system);

  // d stations placed uniformly on the unit square, ids "S001", "S002", ...
  static StationSet uniform_planar(std::size_t count, std::uint64_t seed);

  std::size_t size() const { return stations_.size(); }
  const Station& operator[](std::size_t i) const { return stations_[i]; }
  CoordSystem coord_system() const { return system_; }

  // Index of the given id, or -1.
  std::ptrdiff_t index_of(const std::string& id) const;

  // Stations picked by id, in the order given. Unknown id -> error.
  StationSet subset(const std::vector<std::string>& ids) const;

 private:
  std::vector<Station> stations_;
  CoordSystem system_;
};

class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t d) : d_(d), values_(d * d, 0.0) {}

  std::size_t size() const { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * d_ + j]; }
  double max_distance() const;
  const std::vector<double>& data() const { return values_; }

 private:
  std::size_t d_;
  std::vector<double> values_;
};

// Planar sets get Euclidean distances (unitless); geographic sets get
// great-circle distances in km (haversine, spherical radius 6371.0).
DistanceMatrix pairwise_distances(const StationSet& stations);

double haversine_km(double lon1, double lat1, double lon2, double lat2);

// Block-maximum panel: m blocks by d stations, with a validity mask. Every
// column must retain at least two valid entries.
class MaximaMatrix {
 public:
  MaximaMatrix(std::size_t blocks, std::size_t stations, std::vector<double> values,
               std::vector<unsigned char> valid, std::vector<long long> block_labels,
               std::vector<std::string> station_ids);

  std::size_t blocks() const { return m_; }
  std::size_t stations() const { return d_; }
  double value(std::size_t t, std::size_t i) const { return values_[t * d_ + i]; }
  bool is_valid(std::size_t t, std::size_t i) const { return valid_[t * d_ + i] != 0; }
  long long block_label(std::size_t t) const { return labels_[t]; }
  const std::string& station_id(std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& station_ids() const { return ids_; }
  const std::vector<long long>& block_labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<unsigned char>& valid() const { return valid_; }

  // Rows picked (with repetition allowed) by index; labels follow the rows.
  MaximaMatrix resample_rows(const std::vector<std::size_t>& rows) const;

 private:
  std::size_t m_, d_;
  std::vector<double> values_;
  std::vector<unsigned char> valid_;
  std::vector<long long> labels_;
  std::vector<std::string> ids_;
};

enum class RankConvention { over_m, over_m_plus_1 };

// Per-station empirical-CDF values in (0, 1], sharing the maxima's validity
// mask and block labels. Ties carry the average rank.
class RankMatrix {
 public:
  // Empty labels default to 0..blocks-1.
  RankMatrix(std::size_t blocks, std::size_t stations, std::vector<double> values,
             std::vector<unsigned char> valid, RankConvention convention,
             std::vector<long long> block_labels = {});

  std::size_t blocks() const { return m_; }
  std::size_t stations() const { return d_; }
  double value(std::size_t t, std::size_t i) const { return values_[t * d_ + i]; }
  bool is_valid(std::size_t t, std::size_t i) const { return valid_[t * d_ + i] != 0; }
  RankConvention convention() const { return convention_; }
  long long block_label(std::size_t t) const { return labels_[t]; }
  const std::vector<long long>& block_labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<unsigned char>& valid() const { return valid_; }

 private:
  std::size_t m_, d_;
  std::vector<double> values_;
  std::vector<unsigned char> valid_;
  RankConvention convention_;
  std::vector<long long> labels_;
};

RankMatrix edf_ranks(const MaximaMatrix& maxima, RankConvention convention);

// Raw-buffer variant that tolerates columns with fewer than 2 valid cells
// (their ranks stay masked out, which downstream code reports as
// unestimable pairs). Used by resampling code, where a draw may degrade a
// column below the MaximaMatrix invariant.
RankMatrix edf_ranks(std::size_t blocks, std::size_t stations, const std::vector<double>& values,
                     const std::vector<unsigned char>& valid, RankConvention convention,
                     std::vector<long long> block_labels = {});

// Average ranks of the values at the given positions, divided by the
// convention's denominator. `values[pos[k]]` for k = 0..n-1 participate.
void ranks_of_subset(const std::vector<double>& values, const std::vector<std::size_t>& positions,
                     RankConvention convention, std::vector<double>* out);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
};

bool is_valid_date(const Date& date);
int days_in_month(int year, int month);

// Days since 1970-01-01 (negative before); proleptic Gregorian calendar.
// Differences between day numbers count calendar days exactly.
long long day_number(const Date& date);

struct BlockRule {
  // Months composing the within-year window, e.g. {6,...,10}. A full-year
  // rule is simply {1..12}.
  std::vector<int> months;
  int year_first = 0;
  int year_last = 0;  // inclusive
  double completeness = 0.8;
};

struct DailyPoint {
  Date date;
  double value = 0.0;
  bool missing = false;
};

struct BlockMaxima {
  std::vector<long long> labels;  // years
  std::vector<double> values;
  std::vector<unsigned char> valid;
};

// Per-year maximum of the daily series over the rule's month window. A block
// is valid only when the fraction of non-missing days reaches
// rule.completeness; duplicate dates are collapsed by maximum.
BlockMaxima block_maxima(const std::vector<DailyPoint>& series, const BlockRule& rule);

}  // namespace extnet
