#include "wavepart/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "wavepart/error.hpp"

namespace wp::io {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorKind::Argument, "config", key + " = '" + value + "' is not " + what);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) bad_value(key, text, "a number");
  return x;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_number(key, tok));
  return out;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorKind::Argument, "config",
                    origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Argument, "config",
                  origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw Error(ErrorKind::Argument, "config",
                  origin + ":" + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.entries_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "config", "cannot open " + path.string());
  return parse(in, path.string());
}

const std::string* Config::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? parse_number(key, *v) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  const double x = parse_number(key, *v);
  if (x != static_cast<int>(x)) bad_value(key, *v, "an integer");
  return static_cast<int>(x);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, *v, "a boolean");
}

Vec3 Config::get_vec3(const std::string& key, const Vec3& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  auto xs = parse_numbers(key, *v);
  if (xs.size() != 3) bad_value(key, *v, "a 3-vector");
  return {xs[0], xs[1], xs[2]};
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  const auto* v = find(key);
  return v ? parse_numbers(key, *v) : fallback;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw Error(ErrorKind::Io, "io", "cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw Error(ErrorKind::Argument, "io", "CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "io", "cannot write " + path.string());
  out << value.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "io", "cannot open " + path.string());
  return json::parse(in);
}

void write_slice(const std::filesystem::path& path, const Grid3& grid, const RealData& field,
                 int x_index) {
  CsvWriter csv(path, {"y", "z", "value"});
  const auto xs = grid.x_axis();
  for (int j = 0; j < grid.n(); ++j)
    for (int l = 0; l < grid.n(); ++l)
      csv.row({xs[j], xs[l], field[grid.index(x_index, j, l)]});
}

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

namespace {
const char kStateMagic[8] = {'w', 'p', 's', 't', 'a', 't', 'e', '1'};
}

void save_state(const std::filesystem::path& path, const PhaseState& y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "io", "cannot write " + path.string());
  const std::int64_t n = y.grid().n();
  const double L = y.grid().box_length();
  out.write(kStateMagic, sizeof kStateMagic);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  out.write(reinterpret_cast<const char*>(y.q.data()), 3 * sizeof(double));
  out.write(reinterpret_cast<const char*>(y.p.data()), 3 * sizeof(double));
  const auto bytes = static_cast<std::streamsize>(y.grid().size() * sizeof(cplx));
  out.write(reinterpret_cast<const char*>(y.fields.psi_hat.data()), bytes);
  out.write(reinterpret_cast<const char*>(y.fields.pi_hat.data()), bytes);
}

PhaseState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "io", "cannot open " + path.string());
  char magic[8];
  std::int64_t n = 0;
  double L = 0.0;
  in.read(magic, sizeof magic);
  if (!in || std::string(magic, 8) != std::string(kStateMagic, 8))
    throw Error(ErrorKind::Io, "io", path.string() + " is not a state file");
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&L), sizeof L);
  PhaseState y = PhaseState::zero(Grid3(static_cast<int>(n), L));
  in.read(reinterpret_cast<char*>(y.q.data()), 3 * sizeof(double));
  in.read(reinterpret_cast<char*>(y.p.data()), 3 * sizeof(double));
  const auto bytes = static_cast<std::streamsize>(y.grid().size() * sizeof(cplx));
  in.read(reinterpret_cast<char*>(y.fields.psi_hat.data()), bytes);
  in.read(reinterpret_cast<char*>(y.fields.pi_hat.data()), bytes);
  if (!in) throw Error(ErrorKind::Io, "io", path.string() + " is truncated");
  return y;
}

}  // namespace wp::io
