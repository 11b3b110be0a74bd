#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lcd/examples.hpp"
#include "lcd/runner.hpp"
#include "lcd/suites.hpp"

namespace {

using lcd::json;

void print_report(const lcd::ExperimentReport& r) {
  std::cout << r.operation << ": " << lcd::to_string(r.verdict);
  if (!r.message.empty()) std::cout << " (" << r.message << ")";
  std::cout << "\n" << lcd::sanitize(r.summary).dump(2) << "\n";
}

int list_examples() {
  for (const auto& e : lcd::examples::list_examples()) {
    std::cout << e.name << "\n  " << e.summary << "\n";
    for (const auto& p : e.params)
      std::cout << "    " << p.name << " (default " << p.default_value << "): " << p.description
                << "\n";
  }
  return 0;
}

int verify(const std::string& suite, std::optional<std::uint64_t> seed, const std::string& out) {
  json cfg = {{"operation", "verify"}, {"params", {{"suite", suite}}}};
  const lcd::ExperimentReport r = lcd::run(cfg, seed);
  for (const auto& rec : r.records)
    std::cout << (rec["pass"].get<bool>() ? "PASS" : "FAIL") << " criterion "
              << rec["criterion"].get<int>() << " (" << rec["title"].get<std::string>()
              << "): " << rec["detail"].get<std::string>() << "\n";
  std::cout << "suite " << suite << ": " << lcd::to_string(r.verdict) << " in "
            << lcd::format_number(r.wall_seconds) << " s\n";
  if (!out.empty()) lcd::write_report(r, out);
  return lcd::exit_code(r.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature-dimension checks for Lagrangians on weighted charts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lcd::kVersion);

  std::string config_path, out_dir, suite = "smoke";
  std::optional<std::uint64_t> seed;

  std::vector<CLI::App*> ops;
  for (const auto& name : lcd::operation_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " operation");
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "directory for report.json and CSV curves");
    if (name == "verify") sub->add_option("--suite", suite, "smoke, curvature, needles, transport, inequalities or full");
    if (name == "examples") sub->add_subcommand("list", "print the registry")->fallthrough();
    ops.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string op = sub->get_name();
  try {
    if (op == "examples" && config_path.empty()) return list_examples();
    if (op == "verify" && config_path.empty()) return verify(suite, seed, out_dir);
    if (config_path.empty()) throw lcd::ConfigError("", "--config is required for " + op);

    json cfg = lcd::load_config(config_path);
    if (!cfg.is_object()) throw lcd::ConfigError("", "config must be a JSON object");
    if (!cfg.contains("operation")) cfg["operation"] = op;
    if (cfg["operation"] != op)
      throw lcd::ConfigError("operation", "config is for '" + cfg["operation"].dump() +
                                              "', not '" + op + "'");
    if (out_dir.empty() && cfg.contains("output") && cfg["output"].is_object() &&
        cfg["output"].contains("dir") && cfg["output"]["dir"].is_string())
      out_dir = cfg["output"]["dir"].get<std::string>();

    const lcd::ExperimentReport r = lcd::run(cfg, seed);
    print_report(r);
    if (!out_dir.empty()) std::cout << "report: " << lcd::write_report(r, out_dir).string() << "\n";
    return lcd::exit_code(r.verdict);
  } catch (const lcd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
