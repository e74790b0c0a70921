#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavepart/soliton.hpp"

namespace wp::io {

using json = nlohmann::ordered_json;

/// Plain-text configuration: `key = value` per line, `[section]` headers,
/// `#` or `;` comments. Keys inside a section are stored as "section.key".
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config parse_string(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// "x, y, z" or "x y z"
  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  /// Keys never read through a getter; callers reject them as typos.
  std::vector<std::string> unused() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& key) const;
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

/// Shortest text that round-trips a double exactly ("%.17g").
std::string format_double(double x);

/// CSV with a fixed header; every value written with format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const json& value);
json read_json(const std::filesystem::path& path);

/// Plane of a real field through the given x-index: columns y, z, value.
void write_slice(const std::filesystem::path& path, const Grid3& grid, const RealData& field,
                 int x_index);

json to_json(const Vec3& v);

/// Raw little-endian dump of a PhaseState: n, L, q, p, psi^, pi^.
void save_state(const std::filesystem::path& path, const PhaseState& y);
PhaseState load_state(const std::filesystem::path& path);

}  // namespace wp::io
