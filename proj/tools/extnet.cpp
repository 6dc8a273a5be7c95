// extnet command-line front end: simulate | chinet | evaluate | annual |
// regress, plus `--manifest` to replay a recorded run. All statistics go
// through the shared C API; this file only does argument handling, CSV/JSON
// plumbing, and the run manifest.
//
// Reproducibility contract: every parameter that can influence output bytes
// is serialized into manifest.json (sorted keys); its FNV-1a-64 hash is the
// config hash stamped on every output file. `--out` and `--threads` are
// deliberately not part of the manifest: they must never change the bytes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "extnet/extnet.h"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;  // per-replicate seed spacing

[[noreturn]] void fail_exit(int code, const std::string& message) {
  std::string clean = message;
  for (char& c : clean)
    if (c == '\n' || c == '\r') c = ' ';
  std::fprintf(stderr, "error code=%d message=\"%s\"\n", code, clean.c_str());
  std::exit(code == 0 ? 1 : code);
}

void check(extnet_status status) {
  if (status != EXTNET_OK) fail_exit(status, extnet_last_error());
}

/* ---------- numeric formatting and parsing ---------- */

// Shortest decimal that round-trips the double; empty string for NaN (the
// CSV missing-value convention).
std::string fmt(double value) {
  if (std::isnan(value)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

json json_num(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

bool parse_double(const std::string& text, double* out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_ll(const std::string& text, long long* out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last;
}

// Linear-interpolation quantile on sorted data (R type 7), the same rule the
// library uses for its summaries.
double quantile7(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex16(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

/* ---------- tiny CSV layer (plain fields, no quoting) ---------- */

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

// Whole file as lines; strips CR, skips `#`-prefixed lines (config-hash
// stamps) and blank lines.
std::vector<std::string> read_csv_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_exit(EXTNET_ERR_IO, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::string csv_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class OutFile {
 public:
  OutFile(const std::filesystem::path& path, const std::string& config_hash)
      : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) fail_exit(EXTNET_ERR_IO, "cannot write " + path_);
    out_ << "# config_hash=" << config_hash << "\n";
  }
  template <typename T>
  OutFile& operator<<(const T& value) {
    out_ << value;
    return *this;
  }
  ~OutFile() {
    out_.flush();
    if (!out_) std::fprintf(stderr, "error code=4 message=\"short write on %s\"\n", path_.c_str());
  }

 private:
  std::string path_;
  std::ofstream out_;
};

void write_json_file(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_exit(EXTNET_ERR_IO, "cannot write " + path.string());
  out << value.dump(2) << "\n";
}

/* ---------- station / maxima file formats ---------- */

struct StationsFile {
  extnet_stations* handle = nullptr;
  std::vector<std::string> ids;
  bool geographic = false;
};

StationsFile load_stations(const std::string& path) {
  const std::vector<std::string> lines = read_csv_lines(path);
  if (lines.empty()) fail_exit(EXTNET_ERR_PARSE, path + ": empty stations file");
  bool geographic = false;
  if (lines[0] == "station,lon,lat") {
    geographic = true;
  } else if (lines[0] != "station,x,y") {
    fail_exit(EXTNET_ERR_PARSE, path + ": header must be station,x,y or station,lon,lat");
  }
  StationsFile result;
  result.geographic = geographic;
  std::vector<double> xs, ys;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto fields = split_csv(lines[k]);
    double x = 0, y = 0;
    if (fields.size() != 3 || fields[0].empty() || !parse_double(fields[1], &x) ||
        !parse_double(fields[2], &y))
      fail_exit(EXTNET_ERR_PARSE, path + ": bad station row: " + lines[k]);
    result.ids.push_back(fields[0]);
    xs.push_back(x);
    ys.push_back(y);
  }
  std::vector<const char*> id_ptrs;
  for (const auto& id : result.ids) id_ptrs.push_back(id.c_str());
  check(extnet_stations_create(id_ptrs.data(), xs.data(), ys.data(), result.ids.size(),
                               geographic ? 1 : 0, &result.handle));
  return result;
}

void write_stations_csv(const std::filesystem::path& path, const std::string& hash,
                        const extnet_stations* stations) {
  int geographic = 0;
  check(extnet_stations_is_geographic(stations, &geographic));
  size_t count = 0;
  check(extnet_stations_count(stations, &count));
  OutFile out(path, hash);
  out << (geographic ? "station,lon,lat" : "station,x,y") << "\n";
  for (size_t i = 0; i < count; ++i) {
    const char* id = nullptr;
    double x = 0, y = 0;
    check(extnet_stations_get(stations, i, &id, &x, &y));
    out << id << "," << fmt(x) << "," << fmt(y) << "\n";
  }
}

extnet_maxima* load_maxima_csv(const std::string& path) {
  const std::vector<std::string> lines = read_csv_lines(path);
  if (lines.empty()) fail_exit(EXTNET_ERR_PARSE, path + ": empty maxima file");
  const auto header = split_csv(lines[0]);
  if (header.size() < 3 || header[0] != "block")
    fail_exit(EXTNET_ERR_PARSE, path + ": header must be block,<station>,...");
  const std::size_t d = header.size() - 1;
  const std::size_t m = lines.size() - 1;
  std::vector<std::string> ids(header.begin() + 1, header.end());
  std::vector<double> values(m * d, 0.0);
  std::vector<unsigned char> valid(m * d, 0);
  std::vector<long long> labels(m, 0);
  for (std::size_t t = 0; t < m; ++t) {
    const auto fields = split_csv(lines[t + 1]);
    if (fields.size() != d + 1)
      fail_exit(EXTNET_ERR_PARSE, path + ": row has " + std::to_string(fields.size()) +
                                      " fields, expected " + std::to_string(d + 1));
    if (!parse_ll(fields[0], &labels[t]))
      fail_exit(EXTNET_ERR_PARSE, path + ": bad block label: " + fields[0]);
    for (std::size_t i = 0; i < d; ++i) {
      if (fields[i + 1].empty()) continue;  // missing cell
      double v = 0;
      if (!parse_double(fields[i + 1], &v))
        fail_exit(EXTNET_ERR_PARSE, path + ": bad value: " + fields[i + 1]);
      values[t * d + i] = v;
      valid[t * d + i] = 1;
    }
  }
  std::vector<const char*> id_ptrs;
  for (const auto& id : ids) id_ptrs.push_back(id.c_str());
  extnet_maxima* out = nullptr;
  check(extnet_maxima_create(m, d, values.data(), valid.data(), labels.data(), id_ptrs.data(),
                             &out));
  return out;
}

void write_maxima_csv(const std::filesystem::path& path, const std::string& hash,
                      const extnet_maxima* maxima) {
  size_t m = 0, d = 0;
  check(extnet_maxima_dims(maxima, &m, &d));
  std::vector<double> values(m * d);
  std::vector<long long> labels(m);
  check(extnet_maxima_values(maxima, values.data()));
  check(extnet_maxima_labels(maxima, labels.data()));
  OutFile out(path, hash);
  out << "block";
  for (size_t i = 0; i < d; ++i) {
    const char* id = nullptr;
    check(extnet_maxima_station_id(maxima, i, &id));
    out << "," << id;
  }
  out << "\n";
  for (size_t t = 0; t < m; ++t) {
    out << labels[t];
    for (size_t i = 0; i < d; ++i) out << "," << fmt(values[t * d + i]);
    out << "\n";
  }
}

std::vector<std::string> maxima_station_ids(const extnet_maxima* maxima) {
  size_t d = 0;
  check(extnet_maxima_dims(maxima, nullptr, &d));
  std::vector<std::string> ids;
  for (size_t i = 0; i < d; ++i) {
    const char* id = nullptr;
    check(extnet_maxima_station_id(maxima, i, &id));
    ids.emplace_back(id);
  }
  return ids;
}

void write_matrix_csv(const std::filesystem::path& path, const std::string& hash,
                      const std::vector<std::string>& ids, const std::vector<double>& values) {
  const std::size_t d = ids.size();
  OutFile out(path, hash);
  out << "station";
  for (const auto& id : ids) out << "," << id;
  out << "\n";
  for (std::size_t i = 0; i < d; ++i) {
    out << ids[i];
    for (std::size_t j = 0; j < d; ++j) out << "," << fmt(values[i * d + j]);
    out << "\n";
  }
}

void write_edges_csv(const std::filesystem::path& path, const std::string& hash,
                     const extnet_network* network, const std::vector<std::string>& ids) {
  size_t count = 0;
  check(extnet_network_edge_count(network, &count));
  std::vector<size_t> is(count), js(count);
  std::vector<double> weight(count), distance(count);
  if (count > 0)
    check(extnet_network_edges(network, is.data(), js.data(), weight.data(), distance.data()));
  OutFile out(path, hash);
  out << "i,j,chi,distance\n";
  for (size_t k = 0; k < count; ++k)
    out << ids[is[k]] << "," << ids[js[k]] << "," << fmt(weight[k]) << "," << fmt(distance[k])
        << "\n";
}

void write_edges_geojson(const std::filesystem::path& path, const std::string& hash,
                         const extnet_network* network, const extnet_stations* stations,
                         const std::vector<std::string>& ids) {
  size_t count = 0;
  check(extnet_network_edge_count(network, &count));
  std::vector<size_t> is(count), js(count);
  std::vector<double> weight(count), distance(count);
  if (count > 0)
    check(extnet_network_edges(network, is.data(), js.data(), weight.data(), distance.data()));
  json features = json::array();
  for (size_t k = 0; k < count; ++k) {
    double xi = 0, yi = 0, xj = 0, yj = 0;
    check(extnet_stations_get(stations, is[k], nullptr, &xi, &yi));
    check(extnet_stations_get(stations, js[k], nullptr, &xj, &yj));
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "LineString"},
                           {"coordinates", json::array({json::array({xi, yi}),
                                                        json::array({xj, yj})})}};
    feature["properties"] = {{"i", ids[is[k]]},
                             {"j", ids[js[k]]},
                             {"chi", json_num(weight[k])},
                             {"distance", json_num(distance[k])}};
    features.push_back(std::move(feature));
  }
  json doc;
  doc["type"] = "FeatureCollection";
  doc["config_hash"] = hash;
  doc["features"] = std::move(features);
  write_json_file(path, doc);
}

void write_rejects_csv(const std::filesystem::path& path, const std::string& hash, size_t count,
                       const std::function<void(size_t, size_t*, const char**, const char**)>& get) {
  OutFile out(path, hash);
  out << "line,reason,content\n";
  for (size_t k = 0; k < count; ++k) {
    size_t line = 0;
    const char* content = nullptr;
    const char* reason = nullptr;
    get(k, &line, &content, &reason);
    out << line << "," << csv_quote(reason ? reason : "") << ","
        << csv_quote(content ? content : "") << "\n";
  }
}

/* ---------- manifest ---------- */

struct Manifest {
  std::string command;
  json params;
};

std::string config_hash_for(const Manifest& manifest) {
  json canonical;
  canonical["command"] = manifest.command;
  canonical["params"] = manifest.params;
  canonical["version"] = extnet_version();
  return hex16(fnv1a64(canonical.dump()));
}

void write_manifest(const std::filesystem::path& out_dir, const Manifest& manifest,
                    const std::string& hash) {
  json doc;
  doc["command"] = manifest.command;
  doc["config_hash"] = hash;
  doc["params"] = manifest.params;
  doc["version"] = extnet_version();
  write_json_file(out_dir / "manifest.json", doc);
}

// Strict manifest field access: a replayed manifest must carry every key.
template <typename T>
T req(const json& params, const std::string& key) {
  if (!params.contains(key))
    fail_exit(EXTNET_ERR_PARSE, "manifest params missing key: " + key);
  try {
    return params.at(key).get<T>();
  } catch (const std::exception& e) {
    fail_exit(EXTNET_ERR_PARSE, "manifest key " + key + ": " + e.what());
  }
}

/* ---------- shared parameter blocks ---------- */

// Inputs shared by chinet and annual: station coordinates plus either a
// ready-made maxima panel or a daily table to reduce.
struct InputParams {
  std::string stations_file;
  std::string maxima_file;
  std::string daily_file;
  std::string daily_format = "csv";  // csv | dly
  std::vector<int> months{6, 7, 8, 9, 10};
  int year_first = 0;
  int year_last = 0;
  double min_coverage = 0.9;
  std::string coverage_basis = "full-period";  // full-period | record-span
  double block_completeness = 0.8;
  std::string rank_convention = "over-m-plus-1";  // over-m | over-m-plus-1
  bool no_rerank_common = false;
};

void input_params_to_json(const InputParams& p, json* out) {
  (*out)["stations_file"] = p.stations_file;
  (*out)["maxima_file"] = p.maxima_file;
  (*out)["daily_file"] = p.daily_file;
  (*out)["daily_format"] = p.daily_format;
  (*out)["months"] = p.months;
  (*out)["year_first"] = p.year_first;
  (*out)["year_last"] = p.year_last;
  (*out)["min_coverage"] = p.min_coverage;
  (*out)["coverage_basis"] = p.coverage_basis;
  (*out)["block_completeness"] = p.block_completeness;
  (*out)["rank_convention"] = p.rank_convention;
  (*out)["no_rerank_common"] = p.no_rerank_common;
}

void input_params_from_json(const json& params, InputParams* p) {
  p->stations_file = req<std::string>(params, "stations_file");
  p->maxima_file = req<std::string>(params, "maxima_file");
  p->daily_file = req<std::string>(params, "daily_file");
  p->daily_format = req<std::string>(params, "daily_format");
  p->months = req<std::vector<int>>(params, "months");
  p->year_first = req<int>(params, "year_first");
  p->year_last = req<int>(params, "year_last");
  p->min_coverage = req<double>(params, "min_coverage");
  p->coverage_basis = req<std::string>(params, "coverage_basis");
  p->block_completeness = req<double>(params, "block_completeness");
  p->rank_convention = req<std::string>(params, "rank_convention");
  p->no_rerank_common = req<bool>(params, "no_rerank_common");
}

void validate_inputs(const InputParams& p) {
  if (p.stations_file.empty())
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--stations is required");
  const bool has_maxima = !p.maxima_file.empty();
  const bool has_daily = !p.daily_file.empty();
  if (has_maxima == has_daily)
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "exactly one of --maxima and --daily is required");
  if (has_daily && (p.year_first == 0 || p.year_last == 0))
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--daily requires --year-first and --year-last");
  if (p.daily_format != "csv" && p.daily_format != "dly")
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--daily-format must be csv or dly");
  if (p.coverage_basis != "full-period" && p.coverage_basis != "record-span")
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--coverage-basis must be full-period or record-span");
  if (p.rank_convention != "over-m" && p.rank_convention != "over-m-plus-1")
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--rank-convention must be over-m or over-m-plus-1");
}

// Smoothing settings shared by chinet and evaluate.
struct CurveParams {
  double chi_min = 0.3;
  std::size_t bins = 100;
  bool equal_count_bins = false;
  bool weighted_bins = false;
  std::string lambda = "gcv";  // gcv | inf | positive number
  std::size_t boot = 500;
  std::uint64_t seed = 0;
  std::string tau2 = "logistic";  // logistic | estimated
  double tau2_a = 0.095;
  double tau2_b = 6.0;
  double tau2_c = 0.72;
};

void curve_params_to_json(const CurveParams& p, json* out) {
  (*out)["chi_min"] = p.chi_min;
  (*out)["bins"] = p.bins;
  (*out)["equal_count_bins"] = p.equal_count_bins;
  (*out)["weighted_bins"] = p.weighted_bins;
  (*out)["lambda"] = p.lambda;
  (*out)["boot"] = p.boot;
  (*out)["seed"] = p.seed;
  (*out)["tau2"] = p.tau2;
  (*out)["tau2_a"] = p.tau2_a;
  (*out)["tau2_b"] = p.tau2_b;
  (*out)["tau2_c"] = p.tau2_c;
}

void curve_params_from_json(const json& params, CurveParams* p) {
  p->chi_min = req<double>(params, "chi_min");
  p->bins = req<std::size_t>(params, "bins");
  p->equal_count_bins = req<bool>(params, "equal_count_bins");
  p->weighted_bins = req<bool>(params, "weighted_bins");
  p->lambda = req<std::string>(params, "lambda");
  p->boot = req<std::size_t>(params, "boot");
  p->seed = req<std::uint64_t>(params, "seed");
  p->tau2 = req<std::string>(params, "tau2");
  p->tau2_a = req<double>(params, "tau2_a");
  p->tau2_b = req<double>(params, "tau2_b");
  p->tau2_c = req<double>(params, "tau2_c");
}

double parse_lambda(const std::string& text) {
  if (text == "gcv") return -1.0;
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double value = 0;
  if (!parse_double(text, &value) || !(value >= 0))
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT,
              "--lambda must be gcv, inf, or a nonnegative number");
  return value;
}

void validate_curve(const CurveParams& p) {
  parse_lambda(p.lambda);
  if (p.tau2 != "logistic" && p.tau2 != "estimated")
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--tau2 must be logistic or estimated");
  if (p.bins < 2) fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--bins must be at least 2");
  if (p.boot < 2) fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--boot must be at least 2");
}

/* ---------- input materialization ---------- */

struct LoadedPanel {
  extnet_stations* stations = nullptr;  // subset aligned to the maxima columns
  extnet_maxima* maxima = nullptr;
  std::vector<std::string> ids;
  bool geographic = false;
  extnet_daily* daily = nullptr;           // only when --daily was used
  extnet_daily* daily_filtered = nullptr;  // ditto
};

LoadedPanel load_panel(const InputParams& p, const std::filesystem::path& out_dir,
                       const std::string& hash) {
  LoadedPanel panel;
  StationsFile stations = load_stations(p.stations_file);
  panel.geographic = stations.geographic;
  if (!p.maxima_file.empty()) {
    panel.maxima = load_maxima_csv(p.maxima_file);
  } else {
    check(extnet_daily_read(p.daily_file.c_str(), p.daily_format == "dly" ? 1 : 0, &panel.daily));
    size_t rejects = 0;
    check(extnet_daily_reject_count(panel.daily, &rejects));
    write_rejects_csv(out_dir / "daily_rejects.csv", hash, rejects,
                      [&](size_t k, size_t* line, const char** content, const char** reason) {
                        check(extnet_daily_reject_get(panel.daily, k, line, content, reason));
                      });
    check(extnet_daily_filter(panel.daily, p.min_coverage, p.year_first, p.year_last,
                              p.coverage_basis == "record-span" ? 1 : 0, &panel.daily_filtered));
    check(extnet_seasonal_maxima(panel.daily_filtered, p.months.data(), p.months.size(),
                                 p.year_first, p.year_last, p.block_completeness, &panel.maxima));
  }
  panel.ids = maxima_station_ids(panel.maxima);
  std::vector<const char*> id_ptrs;
  for (const auto& id : panel.ids) id_ptrs.push_back(id.c_str());
  check(extnet_stations_subset(stations.handle, id_ptrs.data(), id_ptrs.size(), &panel.stations));
  extnet_stations_free(stations.handle);
  return panel;
}

void free_panel(LoadedPanel* panel) {
  extnet_stations_free(panel->stations);
  extnet_maxima_free(panel->maxima);
  extnet_daily_free(panel->daily);
  extnet_daily_free(panel->daily_filtered);
}

/* ---------- the correction pipeline (shared by chinet and evaluate) ---------- */

struct PipelineResult {
  size_t d = 0;
  std::vector<double> chi_hat;
  std::vector<double> sigma_star;
  std::vector<double> chi_tilde;
  extnet_bins* bins = nullptr;
  extnet_curve* curve = nullptr;
  extnet_tau2* tau2 = nullptr;
  extnet_network* net_empirical = nullptr;
  extnet_network* net_corrected = nullptr;
};

PipelineResult run_pipeline(const extnet_maxima* maxima, const extnet_stations* stations,
                            const CurveParams& p, bool over_m_plus_1, bool rerank_common,
                            std::uint64_t boot_seed, int threads) {
  PipelineResult r;
  extnet_ranks* ranks = nullptr;
  check(extnet_ranks_compute(maxima, over_m_plus_1 ? 1 : 0, &ranks));
  extnet_chi* chi = nullptr;
  check(extnet_chi_estimate(ranks, rerank_common ? 1 : 0, threads, &chi));
  check(extnet_chi_dims(chi, &r.d));
  r.chi_hat.resize(r.d * r.d);
  check(extnet_chi_values(chi, r.chi_hat.data()));

  extnet_boot* boot = nullptr;
  check(extnet_bootstrap_sd(maxima, over_m_plus_1 ? 1 : 0, rerank_common ? 1 : 0, p.boot,
                            boot_seed, threads, &boot));
  r.sigma_star.resize(r.d * r.d);
  check(extnet_boot_values(boot, r.sigma_star.data()));

  check(extnet_bin_chi(chi, stations, p.bins, p.equal_count_bins ? 1 : 0, &r.bins));
  const double lambda = parse_lambda(p.lambda);
  check(extnet_fit_curve(r.bins, p.weighted_bins ? 1 : 0, lambda, &r.curve));
  if (p.tau2 == "logistic") {
    check(extnet_tau2_logistic(p.tau2_a, p.tau2_b, p.tau2_c, &r.tau2));
  } else {
    check(extnet_tau2_estimated(r.bins, boot, stations, p.weighted_bins ? 1 : 0, lambda,
                                &r.tau2));
  }
  extnet_shrunk* shrunk = nullptr;
  check(extnet_shrink(chi, r.curve, r.tau2, boot, stations, &shrunk));
  r.chi_tilde.resize(r.d * r.d);
  check(extnet_shrunk_values(shrunk, r.chi_tilde.data(), nullptr));

  check(extnet_network_threshold(r.chi_hat.data(), r.d, stations, p.chi_min,
                                 EXTNET_TAG_EMPIRICAL, &r.net_empirical));
  check(extnet_network_threshold(r.chi_tilde.data(), r.d, stations, p.chi_min,
                                 EXTNET_TAG_CORRECTED, &r.net_corrected));

  extnet_shrunk_free(shrunk);
  extnet_boot_free(boot);
  extnet_chi_free(chi);
  extnet_ranks_free(ranks);
  return r;
}

void free_pipeline(PipelineResult* r) {
  extnet_bins_free(r->bins);
  extnet_curve_free(r->curve);
  extnet_tau2_free(r->tau2);
  extnet_network_free(r->net_empirical);
  extnet_network_free(r->net_corrected);
}

json network_summary_json(const extnet_network* network, size_t d) {
  size_t edges = 0;
  check(extnet_network_edge_count(network, &edges));
  std::vector<size_t> degree(d, 0);
  check(extnet_network_degrees(network, degree.data()));
  size_t isolated = 0, max_degree = 0;
  for (size_t deg : degree) {
    if (deg == 0) ++isolated;
    max_degree = std::max(max_degree, deg);
  }
  std::vector<double> distances(edges);
  if (edges > 0) check(extnet_network_edges(network, nullptr, nullptr, nullptr, distances.data()));
  std::sort(distances.begin(), distances.end());
  json out;
  out["edges"] = edges;
  out["isolated_nodes"] = isolated;
  out["max_degree"] = max_degree;
  out["mean_degree"] = json_num(d > 0 ? 2.0 * static_cast<double>(edges) / static_cast<double>(d)
                                      : std::numeric_limits<double>::quiet_NaN());
  out["median_edge_distance"] =
      json_num(edges > 0 ? quantile7(distances, 0.5) : std::numeric_limits<double>::quiet_NaN());
  return out;
}

/* ---------- subcommands ---------- */

struct SimulateParams {
  std::size_t d = 100;
  std::size_t m = 50;
  double rho = 0.05;
  double kappa = 1.0;
  std::uint64_t seed = 0;
  double chi_min = 0.3;
  bool approximate = false;
  std::size_t approx_points = 1000;
  std::string stations_file;  // empty: d uniform stations on the unit square
};

Manifest simulate_manifest(const SimulateParams& p) {
  Manifest m;
  m.command = "simulate";
  m.params["d"] = p.d;
  m.params["m"] = p.m;
  m.params["rho"] = p.rho;
  m.params["kappa"] = p.kappa;
  m.params["seed"] = p.seed;
  m.params["chi_min"] = p.chi_min;
  m.params["approximate"] = p.approximate;
  m.params["approx_points"] = p.approx_points;
  m.params["stations_file"] = p.stations_file;
  return m;
}

SimulateParams simulate_from_json(const json& params) {
  SimulateParams p;
  p.d = req<std::size_t>(params, "d");
  p.m = req<std::size_t>(params, "m");
  p.rho = req<double>(params, "rho");
  p.kappa = req<double>(params, "kappa");
  p.seed = req<std::uint64_t>(params, "seed");
  p.chi_min = req<double>(params, "chi_min");
  p.approximate = req<bool>(params, "approximate");
  p.approx_points = req<std::size_t>(params, "approx_points");
  p.stations_file = req<std::string>(params, "stations_file");
  return p;
}

void cmd_simulate(const SimulateParams& p, const std::filesystem::path& out_dir, int threads) {
  const Manifest manifest = simulate_manifest(p);
  const std::string hash = config_hash_for(manifest);

  extnet_stations* stations = nullptr;
  std::vector<std::string> ids;
  if (p.stations_file.empty()) {
    check(extnet_stations_uniform(p.d, p.seed, &stations));
    size_t count = 0;
    check(extnet_stations_count(stations, &count));
    for (size_t i = 0; i < count; ++i) {
      const char* id = nullptr;
      check(extnet_stations_get(stations, i, &id, nullptr, nullptr));
      ids.emplace_back(id);
    }
  } else {
    StationsFile file = load_stations(p.stations_file);
    stations = file.handle;
    ids = file.ids;
  }
  size_t d = 0;
  check(extnet_stations_count(stations, &d));

  extnet_maxima* maxima = nullptr;
  check(extnet_br_simulate(stations, p.rho, p.kappa, p.seed, p.m, p.approximate ? 1 : 0,
                           p.approx_points, threads, &maxima));

  std::vector<double> true_chi(d * d);
  check(extnet_true_chi_matrix(stations, p.rho, p.kappa, true_chi.data()));
  extnet_network* truth = nullptr;
  check(extnet_network_true(stations, p.rho, p.kappa, p.chi_min, &truth));

  write_stations_csv(out_dir / "stations.csv", hash, stations);
  write_maxima_csv(out_dir / "maxima.csv", hash, maxima);
  write_matrix_csv(out_dir / "true_chi.csv", hash, ids, true_chi);
  write_edges_csv(out_dir / "true_edges.csv", hash, truth, ids);
  write_manifest(out_dir, manifest, hash);

  extnet_network_free(truth);
  extnet_maxima_free(maxima);
  extnet_stations_free(stations);
}

struct ChinetParams {
  InputParams input;
  CurveParams curve;
  bool geojson = false;
};

Manifest chinet_manifest(const ChinetParams& p) {
  Manifest m;
  m.command = "chinet";
  input_params_to_json(p.input, &m.params);
  curve_params_to_json(p.curve, &m.params);
  m.params["geojson"] = p.geojson;
  return m;
}

ChinetParams chinet_from_json(const json& params) {
  ChinetParams p;
  input_params_from_json(params, &p.input);
  curve_params_from_json(params, &p.curve);
  p.geojson = req<bool>(params, "geojson");
  return p;
}

void cmd_chinet(const ChinetParams& p, const std::filesystem::path& out_dir, int threads) {
  validate_inputs(p.input);
  validate_curve(p.curve);
  const Manifest manifest = chinet_manifest(p);
  const std::string hash = config_hash_for(manifest);

  LoadedPanel panel = load_panel(p.input, out_dir, hash);
  if (p.geojson && !panel.geographic)
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT,
              "--geojson requires geographic station coordinates (lon/lat)");

  PipelineResult r = run_pipeline(panel.maxima, panel.stations, p.curve,
                                  p.input.rank_convention == "over-m-plus-1",
                                  !p.input.no_rerank_common, p.curve.seed, threads);

  write_matrix_csv(out_dir / "chi_hat.csv", hash, panel.ids, r.chi_hat);
  write_matrix_csv(out_dir / "sigma_star.csv", hash, panel.ids, r.sigma_star);
  write_matrix_csv(out_dir / "chi_tilde.csv", hash, panel.ids, r.chi_tilde);

  {
    size_t nbins = 0;
    check(extnet_bins_count(r.bins, &nbins));
    OutFile out(out_dir / "bins.csv", hash);
    out << "bin,h_mean,chi_mean,chi_var,count,lo,hi,chi_fit\n";
    for (size_t k = 0; k < nbins; ++k) {
      double h_mean = 0, chi_mean = 0, chi_var = 0, lo = 0, hi = 0, fit = 0;
      size_t count = 0;
      check(extnet_bins_get(r.bins, k, &h_mean, &chi_mean, &chi_var, &count, &lo, &hi));
      check(extnet_curve_eval(r.curve, &h_mean, 1, &fit));
      out << k << "," << fmt(h_mean) << "," << fmt(chi_mean) << "," << fmt(chi_var) << ","
          << count << "," << fmt(lo) << "," << fmt(hi) << "," << fmt(fit) << "\n";
    }
  }

  write_edges_csv(out_dir / "edges_empirical.csv", hash, r.net_empirical, panel.ids);
  write_edges_csv(out_dir / "edges_corrected.csv", hash, r.net_corrected, panel.ids);
  if (p.geojson) {
    write_edges_geojson(out_dir / "edges_empirical.geojson", hash, r.net_empirical,
                        panel.stations, panel.ids);
    write_edges_geojson(out_dir / "edges_corrected.geojson", hash, r.net_corrected,
                        panel.stations, panel.ids);
  }

  double curve_lambda = 0, curve_edf = 0;
  check(extnet_curve_info(r.curve, &curve_lambda, &curve_edf));
  const char* tau2_mode = nullptr;
  check(extnet_tau2_mode(r.tau2, &tau2_mode));
  size_t nbins = 0;
  check(extnet_bins_count(r.bins, &nbins));
  json summary;
  summary["config_hash"] = hash;
  summary["stations"] = r.d;
  summary["coordinate_system"] = panel.geographic ? "geographic" : "planar";
  summary["chi_min"] = p.curve.chi_min;
  summary["curve"] = {{"lambda", json_num(curve_lambda)},
                      {"edf", json_num(curve_edf)},
                      {"bins_used", nbins}};
  summary["tau2_mode"] = tau2_mode;
  summary["networks"] = {{"empirical", network_summary_json(r.net_empirical, r.d)},
                         {"corrected", network_summary_json(r.net_corrected, r.d)}};
  write_json_file(out_dir / "network_summary.json", summary);

  write_manifest(out_dir, manifest, hash);
  free_pipeline(&r);
  free_panel(&panel);
}

struct EvaluateParams {
  std::size_t d = 100;
  std::size_t m = 50;
  std::size_t reps = 100;
  double rho = 0.05;
  double kappa = 1.0;
  bool approximate = false;
  std::size_t approx_points = 1000;
  CurveParams curve;
};

Manifest evaluate_manifest(const EvaluateParams& p) {
  Manifest m;
  m.command = "evaluate";
  m.params["d"] = p.d;
  m.params["m"] = p.m;
  m.params["reps"] = p.reps;
  m.params["rho"] = p.rho;
  m.params["kappa"] = p.kappa;
  m.params["approximate"] = p.approximate;
  m.params["approx_points"] = p.approx_points;
  curve_params_to_json(p.curve, &m.params);
  return m;
}

EvaluateParams evaluate_from_json(const json& params) {
  EvaluateParams p;
  p.d = req<std::size_t>(params, "d");
  p.m = req<std::size_t>(params, "m");
  p.reps = req<std::size_t>(params, "reps");
  p.rho = req<double>(params, "rho");
  p.kappa = req<double>(params, "kappa");
  p.approximate = req<bool>(params, "approximate");
  p.approx_points = req<std::size_t>(params, "approx_points");
  curve_params_from_json(params, &p.curve);
  return p;
}

void cmd_evaluate(const EvaluateParams& p, const std::filesystem::path& out_dir, int threads) {
  validate_curve(p.curve);
  if (p.reps < 1) fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--reps must be at least 1");
  const Manifest manifest = evaluate_manifest(p);
  const std::string hash = config_hash_for(manifest);

  extnet_stations* stations = nullptr;
  check(extnet_stations_uniform(p.d, p.curve.seed, &stations));
  extnet_network* truth = nullptr;
  check(extnet_network_true(stations, p.rho, p.kappa, p.curve.chi_min, &truth));
  size_t true_edges = 0;
  check(extnet_network_edge_count(truth, &true_edges));

  // One long simulation; replicate r is the m-block slice starting at r*m.
  // Each block consumes its own RNG stream, so slices are mutually
  // independent replicates of the same field.
  extnet_maxima* all = nullptr;
  check(extnet_br_simulate(stations, p.rho, p.kappa, p.curve.seed, p.reps * p.m,
                           p.approximate ? 1 : 0, p.approx_points, threads, &all));

  struct RepRow {
    double tpr = 0, ppv = 0;
    size_t est_edges = 0, overlap = 0;
  };
  std::vector<RepRow> emp(p.reps), cor(p.reps);
  for (std::size_t r = 0; r < p.reps; ++r) {
    extnet_maxima* slice = nullptr;
    check(extnet_maxima_slice(all, r * p.m, p.m, &slice));
    CurveParams cp = p.curve;
    PipelineResult res = run_pipeline(slice, stations, cp, true, true,
                                      p.curve.seed + kSeedStride * (r + 1), threads);
    check(extnet_network_compare(res.net_empirical, truth, &emp[r].tpr, &emp[r].ppv, nullptr,
                                 nullptr, nullptr, &emp[r].est_edges, &emp[r].overlap));
    check(extnet_network_compare(res.net_corrected, truth, &cor[r].tpr, &cor[r].ppv, nullptr,
                                 nullptr, nullptr, &cor[r].est_edges, &cor[r].overlap));
    free_pipeline(&res);
    extnet_maxima_free(slice);
  }

  {
    OutFile out(out_dir / "replicates.csv", hash);
    out << "replicate,estimator,tpr,ppv,true_edges,est_edges,overlap\n";
    for (std::size_t r = 0; r < p.reps; ++r) {
      out << r << ",empirical," << fmt(emp[r].tpr) << "," << fmt(emp[r].ppv) << "," << true_edges
          << "," << emp[r].est_edges << "," << emp[r].overlap << "\n";
      out << r << ",corrected," << fmt(cor[r].tpr) << "," << fmt(cor[r].ppv) << "," << true_edges
          << "," << cor[r].est_edges << "," << cor[r].overlap << "\n";
    }
  }

  {
    OutFile out(out_dir / "summary.csv", hash);
    out << "metric,estimator,p5,p25,p50,p75,p95\n";
    const auto emit = [&](const char* metric, const char* estimator,
                          const std::vector<RepRow>& rows, auto proj) {
      std::vector<double> values;
      for (const auto& row : rows) {
        const double v = proj(row);
        if (std::isfinite(v)) values.push_back(v);
      }
      std::sort(values.begin(), values.end());
      out << metric << "," << estimator;
      for (double q : {0.05, 0.25, 0.50, 0.75, 0.95})
        out << "," << fmt(values.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : quantile7(values, q));
      out << "\n";
    };
    emit("tpr", "empirical", emp, [](const RepRow& r) { return r.tpr; });
    emit("tpr", "corrected", cor, [](const RepRow& r) { return r.tpr; });
    emit("ppv", "empirical", emp, [](const RepRow& r) { return r.ppv; });
    emit("ppv", "corrected", cor, [](const RepRow& r) { return r.ppv; });
    emit("edges", "empirical", emp,
         [](const RepRow& r) { return static_cast<double>(r.est_edges); });
    emit("edges", "corrected", cor,
         [](const RepRow& r) { return static_cast<double>(r.est_edges); });
  }

  write_manifest(out_dir, manifest, hash);
  extnet_maxima_free(all);
  extnet_network_free(truth);
  extnet_stations_free(stations);
}

struct AnnualParams {
  InputParams input;
  double u_star = 0.95;
  double long_km = 1000.0;
  bool global_eligible = false;
  bool continuity = false;
};

Manifest annual_manifest(const AnnualParams& p) {
  Manifest m;
  m.command = "annual";
  input_params_to_json(p.input, &m.params);
  m.params["u_star"] = p.u_star;
  m.params["long_km"] = p.long_km;
  m.params["global_eligible"] = p.global_eligible;
  m.params["continuity"] = p.continuity;
  return m;
}

AnnualParams annual_from_json(const json& params) {
  AnnualParams p;
  input_params_from_json(params, &p.input);
  p.u_star = req<double>(params, "u_star");
  p.long_km = req<double>(params, "long_km");
  p.global_eligible = req<bool>(params, "global_eligible");
  p.continuity = req<bool>(params, "continuity");
  return p;
}

void cmd_annual(const AnnualParams& p, const std::filesystem::path& out_dir, int threads) {
  (void)threads;
  validate_inputs(p.input);
  const Manifest manifest = annual_manifest(p);
  const std::string hash = config_hash_for(manifest);

  LoadedPanel panel = load_panel(p.input, out_dir, hash);
  extnet_ranks* ranks = nullptr;
  check(extnet_ranks_compute(panel.maxima, p.input.rank_convention == "over-m-plus-1" ? 1 : 0,
                             &ranks));
  extnet_annual* annual = nullptr;
  check(extnet_annual_networks(ranks, p.u_star, &annual));
  extnet_longdist* series = nullptr;
  check(extnet_long_distance(annual, panel.stations, p.long_km, p.global_eligible ? 0 : 1,
                             p.continuity ? 1 : 0, &series));

  const std::size_t d = panel.ids.size();
  std::vector<double> distances(d * d);
  check(extnet_stations_distances(panel.stations, distances.data()));

  {
    size_t blocks = 0;
    check(extnet_annual_block_count(annual, &blocks));
    OutFile out(out_dir / "annual_edges.csv", hash);
    out << "year,i,j,distance\n";
    for (size_t t = 0; t < blocks; ++t) {
      long long label = 0;
      check(extnet_annual_label(annual, t, &label));
      size_t count = 0;
      check(extnet_annual_edge_count(annual, t, &count));
      std::vector<size_t> is(count), js(count);
      if (count > 0) check(extnet_annual_edges(annual, t, is.data(), js.data()));
      for (size_t k = 0; k < count; ++k)
        out << label << "," << panel.ids[is[k]] << "," << panel.ids[js[k]] << ","
            << fmt(distances[is[k] * d + js[k]]) << "\n";
    }
  }

  {
    size_t count = 0;
    check(extnet_longdist_count(series, &count));
    OutFile out(out_dir / "long_distance.csv", hash);
    out << "year,n_long,eligible,log_ratio\n";
    for (size_t t = 0; t < count; ++t) {
      long long label = 0;
      size_t n_long = 0, eligible = 0;
      double log_ratio = 0;
      check(extnet_longdist_get(series, t, &label, &n_long, &eligible, &log_ratio));
      out << label << "," << n_long << "," << eligible << "," << fmt(log_ratio) << "\n";
    }
  }

  write_manifest(out_dir, manifest, hash);
  extnet_longdist_free(series);
  extnet_annual_free(annual);
  extnet_ranks_free(ranks);
  free_panel(&panel);
}

struct RegressParams {
  std::string long_file;
  std::string sst_file;
  double lon_min = -95.0;
  double lon_max = -83.0;
  double lat_min = 23.0;
  double lat_max = 29.0;
  int year_first = 0;
  int year_last = 0;
  int window_start = 7;
  bool offset = false;  // log(eligible) exposure offset in the Poisson fit
};

Manifest regress_manifest(const RegressParams& p) {
  Manifest m;
  m.command = "regress";
  m.params["long_file"] = p.long_file;
  m.params["sst_file"] = p.sst_file;
  m.params["lon_min"] = p.lon_min;
  m.params["lon_max"] = p.lon_max;
  m.params["lat_min"] = p.lat_min;
  m.params["lat_max"] = p.lat_max;
  m.params["year_first"] = p.year_first;
  m.params["year_last"] = p.year_last;
  m.params["window_start"] = p.window_start;
  m.params["offset"] = p.offset;
  return m;
}

RegressParams regress_from_json(const json& params) {
  RegressParams p;
  p.long_file = req<std::string>(params, "long_file");
  p.sst_file = req<std::string>(params, "sst_file");
  p.lon_min = req<double>(params, "lon_min");
  p.lon_max = req<double>(params, "lon_max");
  p.lat_min = req<double>(params, "lat_min");
  p.lat_max = req<double>(params, "lat_max");
  p.year_first = req<int>(params, "year_first");
  p.year_last = req<int>(params, "year_last");
  p.window_start = req<int>(params, "window_start");
  p.offset = req<bool>(params, "offset");
  return p;
}

json fit_to_json(const extnet_fit& fit) {
  json out;
  out["family"] =
      fit.family == EXTNET_FAMILY_GAUSSIAN_IDENTITY ? "gaussian-identity" : "poisson-log";
  out["intercept"] = json_num(fit.intercept);
  out["slope"] = fit.has_slope ? json_num(fit.slope) : json(nullptr);
  out["se_intercept"] = json_num(fit.se_intercept);
  out["se_slope"] = fit.has_slope ? json_num(fit.se_slope) : json(nullptr);
  out["stat_intercept"] = json_num(fit.stat_intercept);
  out["stat_slope"] = fit.has_slope ? json_num(fit.stat_slope) : json(nullptr);
  out["p_intercept"] = json_num(fit.p_intercept);
  out["p_slope"] = fit.has_slope ? json_num(fit.p_slope) : json(nullptr);
  out["n"] = fit.n;
  out["iterations"] = fit.iterations;
  return out;
}

void cmd_regress(const RegressParams& p, const std::filesystem::path& out_dir, int threads) {
  (void)threads;
  if (p.long_file.empty() || p.sst_file.empty())
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--long and --sst are required");
  if (p.year_first == 0 || p.year_last == 0)
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--year-first and --year-last are required");
  const Manifest manifest = regress_manifest(p);
  const std::string hash = config_hash_for(manifest);

  // Long-distance series (year -> count, eligible, log ratio).
  struct LongRow {
    long long n_long = 0, eligible = 0;
    double log_ratio = std::numeric_limits<double>::quiet_NaN();
  };
  std::map<long long, LongRow> long_rows;
  {
    const auto lines = read_csv_lines(p.long_file);
    if (lines.empty() || lines[0] != "year,n_long,eligible,log_ratio")
      fail_exit(EXTNET_ERR_PARSE, p.long_file + ": header must be year,n_long,eligible,log_ratio");
    for (std::size_t k = 1; k < lines.size(); ++k) {
      const auto fields = split_csv(lines[k]);
      long long year = 0;
      LongRow row;
      if (fields.size() != 4 || !parse_ll(fields[0], &year) || !parse_ll(fields[1], &row.n_long) ||
          !parse_ll(fields[2], &row.eligible) || row.n_long < 0 || row.eligible < 0)
        fail_exit(EXTNET_ERR_PARSE, p.long_file + ": bad row: " + lines[k]);
      if (!fields[3].empty() && !parse_double(fields[3], &row.log_ratio))
        fail_exit(EXTNET_ERR_PARSE, p.long_file + ": bad log_ratio: " + fields[3]);
      long_rows[year] = row;
    }
  }

  extnet_sst* sst = nullptr;
  check(extnet_sst_read(p.sst_file.c_str(), p.lon_min, p.lon_max, p.lat_min, p.lat_max,
                        p.year_first, p.year_last, p.window_start, &sst));
  size_t sst_years = 0;
  check(extnet_sst_count(sst, &sst_years));

  // Inner join on year.
  std::vector<long long> years;
  std::vector<double> sst_values, counts, log_ratio, log_eligible;
  for (size_t k = 0; k < sst_years; ++k) {
    long long year = 0;
    double value = 0;
    check(extnet_sst_get(sst, k, &year, &value));
    const auto it = long_rows.find(year);
    if (it == long_rows.end()) continue;
    years.push_back(year);
    sst_values.push_back(value);
    counts.push_back(static_cast<double>(it->second.n_long));
    log_ratio.push_back(it->second.log_ratio);
    log_eligible.push_back(it->second.eligible > 0
                               ? std::log(static_cast<double>(it->second.eligible))
                               : std::numeric_limits<double>::quiet_NaN());
  }
  if (years.size() < 3)
    fail_exit(EXTNET_ERR_UNESTIMABLE, "need at least 3 joined years, have " +
                                          std::to_string(years.size()));

  // Linear fit uses the years whose log ratio is defined.
  std::vector<double> lin_x, lin_y;
  std::vector<long long> lin_years;
  for (std::size_t k = 0; k < years.size(); ++k) {
    if (std::isfinite(log_ratio[k])) {
      lin_x.push_back(sst_values[k]);
      lin_y.push_back(log_ratio[k]);
      lin_years.push_back(years[k]);
    }
  }
  extnet_fit linear_fit{};
  check(extnet_ols_fit(lin_x.data(), lin_y.data(), lin_x.size(), &linear_fit));

  // Poisson fit uses all joined years (counts may be zero); with --offset,
  // years whose eligible total is zero cannot carry an exposure and are
  // dropped.
  std::vector<double> poi_x, poi_y, poi_off;
  std::vector<long long> poi_years;
  for (std::size_t k = 0; k < years.size(); ++k) {
    if (p.offset && !std::isfinite(log_eligible[k])) continue;
    poi_x.push_back(sst_values[k]);
    poi_y.push_back(counts[k]);
    if (p.offset) poi_off.push_back(log_eligible[k]);
    poi_years.push_back(years[k]);
  }
  extnet_fit poisson_fit{};
  check(extnet_poisson_fit(poi_x.data(), poi_y.data(), poi_x.size(),
                           p.offset ? poi_off.data() : nullptr, &poisson_fit));

  json doc;
  doc["config_hash"] = hash;
  doc["joined_years"] = years;
  json sst_json = json::array();
  for (std::size_t k = 0; k < years.size(); ++k)
    sst_json.push_back({{"year", years[k]}, {"sst", json_num(sst_values[k])}});
  doc["covariate"] = sst_json;
  doc["linear"] = fit_to_json(linear_fit);
  doc["linear"]["years"] = lin_years;
  doc["poisson"] = fit_to_json(poisson_fit);
  doc["poisson"]["years"] = poi_years;
  doc["poisson"]["offset"] = p.offset;
  write_json_file(out_dir / "regression.json", doc);

  write_manifest(out_dir, manifest, hash);
  extnet_sst_free(sst);
}

/* ---------- manifest replay ---------- */

void replay_manifest(const std::string& path, const std::filesystem::path& out_dir,
                     int threads) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_exit(EXTNET_ERR_IO, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    fail_exit(EXTNET_ERR_PARSE, std::string("manifest parse: ") + e.what());
  }
  if (!doc.contains("command") || !doc.contains("params"))
    fail_exit(EXTNET_ERR_PARSE, "manifest needs `command` and `params`");
  const std::string command = doc["command"].get<std::string>();
  const json& params = doc["params"];
  if (command == "simulate") {
    cmd_simulate(simulate_from_json(params), out_dir, threads);
  } else if (command == "chinet") {
    cmd_chinet(chinet_from_json(params), out_dir, threads);
  } else if (command == "evaluate") {
    cmd_evaluate(evaluate_from_json(params), out_dir, threads);
  } else if (command == "annual") {
    cmd_annual(annual_from_json(params), out_dir, threads);
  } else if (command == "regress") {
    cmd_regress(regress_from_json(params), out_dir, threads);
  } else {
    fail_exit(EXTNET_ERR_PARSE, "unknown manifest command: " + command);
  }
}

void add_input_options(CLI::App* cmd, InputParams* p) {
  cmd->add_option("--stations", p->stations_file,
                  "Station coordinates CSV (station,x,y or station,lon,lat)");
  cmd->add_option("--maxima", p->maxima_file, "Block-maxima CSV (block,<station>,...)");
  cmd->add_option("--daily", p->daily_file, "Daily precipitation table to reduce to maxima");
  cmd->add_option("--daily-format", p->daily_format, "Daily table format: csv or dly")
      ->capture_default_str();
  cmd->add_option("--months", p->months, "Months of the within-year block window")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--year-first", p->year_first, "First year of the study period");
  cmd->add_option("--year-last", p->year_last, "Last year of the study period (inclusive)");
  cmd->add_option("--min-coverage", p->min_coverage,
                  "Minimum non-missing daily fraction to keep a station")
      ->capture_default_str();
  cmd->add_option("--coverage-basis", p->coverage_basis,
                  "Coverage denominator: full-period or record-span")
      ->capture_default_str();
  cmd->add_option("--block-completeness", p->block_completeness,
                  "Minimum fraction of window days for a valid block")
      ->capture_default_str();
  cmd->add_option("--rank-convention", p->rank_convention, "EDF ranks: over-m or over-m-plus-1")
      ->capture_default_str();
  cmd->add_flag("--no-rerank-common", p->no_rerank_common,
                "Use full-column ranks on pairwise intersections instead of re-ranking");
}

void add_curve_options(CLI::App* cmd, CurveParams* p) {
  cmd->add_option("--chi-min", p->chi_min, "Edge threshold on chi")->capture_default_str();
  cmd->add_option("--bins", p->bins, "Number of distance bins")->capture_default_str();
  cmd->add_flag("--equal-count-bins", p->equal_count_bins,
                "Quantile bin edges instead of equal width");
  cmd->add_flag("--weighted-bins", p->weighted_bins, "Weight bins by pair count in the spline");
  cmd->add_option("--lambda", p->lambda, "Spline penalty: gcv, inf, or a number")
      ->capture_default_str();
  cmd->add_option("--boot", p->boot, "Bootstrap replicates")->capture_default_str();
  cmd->add_option("--seed", p->seed, "RNG seed")->capture_default_str();
  cmd->add_option("--tau2", p->tau2, "Prior variance mode: logistic or estimated")
      ->capture_default_str();
  cmd->add_option("--tau2-a", p->tau2_a, "Logistic tau2 amplitude")->capture_default_str();
  cmd->add_option("--tau2-b", p->tau2_b, "Logistic tau2 steepness")->capture_default_str();
  cmd->add_option("--tau2-c", p->tau2_c, "Logistic tau2 midpoint")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail-dependence network estimation toolkit"};
  app.fallthrough();
  std::string out_dir = ".";
  int threads = 0;
  std::string manifest_path;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--manifest", manifest_path, "Replay a recorded manifest.json");

  SimulateParams sim;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "Simulate a max-stable block-maxima panel");
  cmd_sim->add_option("-d,--stations-count", sim.d, "Stations on the unit square")
      ->capture_default_str();
  cmd_sim->add_option("-m,--blocks", sim.m, "Blocks (e.g. years)")->capture_default_str();
  cmd_sim->add_option("--rho", sim.rho, "Range parameter")->capture_default_str();
  cmd_sim->add_option("--kappa", sim.kappa, "Smoothness parameter in (0,2]")
      ->capture_default_str();
  cmd_sim->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  cmd_sim->add_option("--chi-min", sim.chi_min, "Edge threshold for the true network")
      ->capture_default_str();
  cmd_sim->add_flag("--approx", sim.approximate, "Approximate simulation (spectral points)");
  cmd_sim->add_option("--approx-points", sim.approx_points,
                      "Spectral points in approximate mode")
      ->capture_default_str();
  cmd_sim->add_option("--stations", sim.stations_file, "Simulate at these planar stations");

  ChinetParams chi;
  CLI::App* cmd_chi =
      app.add_subcommand("chinet", "Estimate, bias-correct, and threshold the chi network");
  add_input_options(cmd_chi, &chi.input);
  add_curve_options(cmd_chi, &chi.curve);
  cmd_chi->add_flag("--geojson", chi.geojson, "Also write GeoJSON edge lists (geographic only)");

  EvaluateParams eval;
  CLI::App* cmd_eval =
      app.add_subcommand("evaluate", "Monte Carlo TPR/PPV study against the known truth");
  cmd_eval->add_option("-d,--stations-count", eval.d, "Stations on the unit square")
      ->capture_default_str();
  cmd_eval->add_option("-m,--blocks", eval.m, "Blocks per replicate")->capture_default_str();
  cmd_eval->add_option("--reps", eval.reps, "Monte Carlo replicates")->capture_default_str();
  cmd_eval->add_option("--rho", eval.rho, "Range parameter")->capture_default_str();
  cmd_eval->add_option("--kappa", eval.kappa, "Smoothness parameter in (0,2]")
      ->capture_default_str();
  cmd_eval->add_flag("--approx", eval.approximate, "Approximate simulation (spectral points)");
  cmd_eval->add_option("--approx-points", eval.approx_points,
                       "Spectral points in approximate mode")
      ->capture_default_str();
  add_curve_options(cmd_eval, &eval.curve);

  AnnualParams ann;
  CLI::App* cmd_ann =
      app.add_subcommand("annual", "Per-block co-exceedance networks and long-distance series");
  add_input_options(cmd_ann, &ann.input);
  cmd_ann->add_option("--u-star", ann.u_star, "Co-exceedance rank threshold in (0,1)")
      ->capture_default_str();
  cmd_ann->add_option("--long-km", ann.long_km, "Long-distance cutoff (km, or planar units)")
      ->capture_default_str();
  cmd_ann->add_flag("--global-eligible", ann.global_eligible,
                    "Count eligible pairs over all stations, not per-block valid ones");
  cmd_ann->add_flag("--continuity", ann.continuity,
                    "log((N+0.5)/P) so zero-count blocks stay defined");

  RegressParams reg;
  CLI::App* cmd_reg =
      app.add_subcommand("regress", "Regress the long-distance series on the SST covariate");
  cmd_reg->add_option("--long", reg.long_file, "long_distance.csv from `annual`");
  cmd_reg->add_option("--sst", reg.sst_file, "SST grid CSV (lon,lat,year,month,sst)");
  cmd_reg->add_option("--lon-min", reg.lon_min, "Box west bound")->capture_default_str();
  cmd_reg->add_option("--lon-max", reg.lon_max, "Box east bound")->capture_default_str();
  cmd_reg->add_option("--lat-min", reg.lat_min, "Box south bound")->capture_default_str();
  cmd_reg->add_option("--lat-max", reg.lat_max, "Box north bound")->capture_default_str();
  cmd_reg->add_option("--year-first", reg.year_first, "First labeled year");
  cmd_reg->add_option("--year-last", reg.year_last, "Last labeled year (inclusive)");
  cmd_reg->add_option("--window-start", reg.window_start,
                      "First month of the 12-month window (7 = July..June of the label year)")
      ->capture_default_str();
  cmd_reg->add_flag("--offset", reg.offset,
                    "Use log(eligible) as a Poisson exposure offset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT, std::string("argument parse: ") + e.what());
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail_exit(EXTNET_ERR_IO, "cannot create output directory " + out_dir);

  const bool has_sub = cmd_sim->parsed() || cmd_chi->parsed() || cmd_eval->parsed() ||
                       cmd_ann->parsed() || cmd_reg->parsed();
  if (!manifest_path.empty()) {
    if (has_sub)
      fail_exit(EXTNET_ERR_INVALID_ARGUMENT, "--manifest cannot be combined with a subcommand");
    replay_manifest(manifest_path, out_dir, threads);
    return 0;
  }
  if (cmd_sim->parsed()) {
    cmd_simulate(sim, out_dir, threads);
  } else if (cmd_chi->parsed()) {
    cmd_chinet(chi, out_dir, threads);
  } else if (cmd_eval->parsed()) {
    cmd_evaluate(eval, out_dir, threads);
  } else if (cmd_ann->parsed()) {
    cmd_annual(ann, out_dir, threads);
  } else if (cmd_reg->parsed()) {
    cmd_regress(reg, out_dir, threads);
  } else {
    fail_exit(EXTNET_ERR_INVALID_ARGUMENT,
              "a subcommand is required: simulate, chinet, evaluate, annual, or regress");
  }
  return 0;
}
