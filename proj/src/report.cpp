#include "lcd/report.hpp"

#include <charconv>
#include <fstream>

namespace lcd {

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Inconclusive: return 2;
    case Verdict::Error: return 3;
  }
  return 3;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Error: return "error";
  }
  return "error";
}

// ---------------------------------------------------------------- config

ConfigReader::ConfigReader(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError(path_, "expected an object");
}

std::string ConfigReader::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ConfigReader::has(const std::string& key) const { return j_->contains(key); }

const json& ConfigReader::at(const std::string& key) const {
  if (!j_->contains(key)) throw ConfigError(key_path(key), "required key is missing");
  used_.insert(key);
  return j_->at(key);
}

double ConfigReader::number(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
  return v.get<double>();
}

double ConfigReader::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

double ConfigReader::extended(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw ConfigError(key_path(key), "expected a number or \"inf\"");
  }
  if (!v.is_number()) throw ConfigError(key_path(key), "expected a number or \"inf\"");
  return v.get<double>();
}

long long ConfigReader::integer(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
  return v.get<long long>();
}

bool ConfigReader::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(key_path(key), "expected true or false");
  return v.get<bool>();
}

std::string ConfigReader::string(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
  return v.get<std::string>();
}

std::string ConfigReader::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

std::vector<double> ConfigReader::list(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_array()) throw ConfigError(key_path(key), "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> ConfigReader::list(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? list(key) : fallback;
}

Vec ConfigReader::vec(const std::string& key) const {
  const auto l = list(key);
  return Eigen::Map<const Vec>(l.data(), static_cast<Eigen::Index>(l.size()));
}

const json& ConfigReader::raw(const std::string& key) const { return at(key); }

ConfigReader& ConfigReader::object(const std::string& key) {
  const json& v = at(key);
  children_.push_back(std::make_unique<ConfigReader>(v, key_path(key)));
  return *children_.back();
}

void ConfigReader::finish() const {
  for (const auto& [k, v] : j_->items())
    if (!used_.count(k)) throw ConfigError(key_path(k), "unknown key");
  for (const auto& c : children_) c->finish();
}

// ---------------------------------------------------------------- output

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json sanitize(const json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    return std::isfinite(x) ? j : json(format_number(x));
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(sanitize(e));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) out[k] = sanitize(v);
    return out;
  }
  return j;
}

json to_json(const ExperimentReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = r.version;
  j["operation"] = r.operation;
  j["seed"] = r.seed;
  j["config"] = r.config;
  j["verdict"] = to_string(r.verdict);
  if (!r.message.empty()) j["message"] = r.message;
  j["summary"] = sanitize(r.summary);
  j["records"] = sanitize(r.records);
  json curves = json::array();
  for (const auto& c : r.curves)
    curves.push_back({{"name", c.name}, {"file", c.name + ".csv"}, {"columns", c.columns},
                      {"rows", c.rows.size()}});
  j["curves"] = curves;
  j["timing"] = {{"wall_seconds", r.wall_seconds}};
  return j;
}

std::string to_csv(const Curve& c) {
  std::string out;
  for (std::size_t i = 0; i < c.columns.size(); ++i) out += (i ? "," : "") + c.columns[i];
  out += "\n";
  for (const auto& row : c.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

std::filesystem::path write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "report.json";
  std::ofstream(path) << to_json(r).dump(2) << "\n";
  for (const auto& c : r.curves) std::ofstream(dir / (c.name + ".csv")) << to_csv(c);
  return path;
}

}  // namespace lcd
