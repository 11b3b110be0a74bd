#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcd/numerics.hpp"

namespace lcd {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class Verdict { Pass, Fail, Inconclusive, Error };
int exit_code(Verdict v);
std::string to_string(Verdict v);

// A schema violation; `path` is the dotted key path of the offending entry.
struct ConfigError : Error {
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path(std::move(path)) {}
  std::string path;
};

// Typed access to one JSON object that remembers which keys were read; finish() rejects the
// rest, recursively through the children handed out by object().
class ConfigReader {
 public:
  explicit ConfigReader(const json& j, std::string path = {});

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  // Like number(), but also accepts "inf".
  double extended(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  Vec vec(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
  // The raw value, marked as consumed; validation is the caller's job.
  const json& raw(const std::string& key) const;
  ConfigReader& object(const std::string& key);
  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const;
  void finish() const;

 private:
  const json& at(const std::string& key) const;
  const json* j_;
  std::string path_;
  mutable std::set<std::string> used_;
  std::vector<std::unique_ptr<ConfigReader>> children_;
};

// One table of numbers, written as CSV next to the JSON report.
struct Curve {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  json config = json::object();
  std::string operation;
  std::string version = kVersion;
  std::uint64_t seed = 1;
  json summary = json::object();
  json records = json::array();
  Verdict verdict = Verdict::Pass;
  std::string message;
  double wall_seconds = 0.0;
  std::vector<Curve> curves;
};

// Shortest decimal that reads back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_number(double x);
// Replaces non-finite numbers by their string names so the document stays valid JSON.
json sanitize(const json& j);
// The report as a JSON document (schema_version 1). Wall-clock time sits under "timing" so
// that everything else is reproducible byte for byte.
json to_json(const ExperimentReport& r);
std::string to_csv(const Curve& c);
// Writes report.json and one <curve>.csv per curve; returns the JSON path.
std::filesystem::path write_report(const ExperimentReport& r, const std::filesystem::path& dir);

}  // namespace lcd
