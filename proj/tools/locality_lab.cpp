// locality_lab: command-line runner for the locality experiments.
//
//   locality_lab <command> [--flag value ...] [--config file.json]
//
// Flags override fields of the config file. The JSON report goes to stdout;
// with --out PREFIX it is also written to PREFIX.json together with
// PREFIX.csv and any command-specific files (PREFIX.graph, PREFIX.jsonl).

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "locality/experiments.hpp"

namespace {

using locality::Json;

struct Flags {
  std::map<std::string, std::string> values;
  std::string config_path;
};

// Option name -> JSON type of the config field it sets.
enum class Kind { text, integer, real, list };

const std::map<std::string, Kind>& option_kinds() {
  static const std::map<std::string, Kind> kinds{
      {"graph", Kind::text},     {"alg", Kind::text},      {"tree", Kind::text},
      {"t", Kind::integer},      {"delta", Kind::integer}, {"n-rule", Kind::text},
      {"h", Kind::text},         {"family", Kind::text},   {"k", Kind::integer},
      {"eps", Kind::real},       {"trials", Kind::integer}, {"seed", Kind::integer},
      {"mode", Kind::text},      {"samples", Kind::integer}, {"n", Kind::integer},
      {"N", Kind::integer},      {"n-values", Kind::list}, {"max-retries", Kind::integer},
      {"order", Kind::text},     {"out", Kind::text}};
  return kinds;
}

Json convert(const std::string& name, const std::string& raw, Kind kind) {
  try {
    switch (kind) {
      case Kind::text: return raw;
      case Kind::integer: {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(raw, &pos, 0);
        if (pos != raw.size() || raw.front() == '-') throw std::invalid_argument(raw);
        return static_cast<std::uint64_t>(v);
      }
      case Kind::real: {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
      }
      case Kind::list: {
        Json out = Json::array();
        std::size_t start = 0;
        while (start <= raw.size()) {
          std::size_t end = raw.find(',', start);
          if (end == std::string::npos) end = raw.size();
          out.push_back(convert(name, raw.substr(start, end - start), Kind::integer));
          start = end + 1;
        }
        return out;
      }
    }
  } catch (const std::logic_error&) {
    throw locality::SchemaError("flag --" + name + " has an invalid value '" + raw + "'");
  }
  return nullptr;
}

Json build_config(const std::string& command, const Flags& flags) {
  Json j = Json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw locality::SchemaError("cannot read config file " + flags.config_path);
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw locality::SchemaError(std::string("config file is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw locality::SchemaError("config must be a JSON object");
    if (j.contains("command") && j["command"] != command) {
      throw locality::SchemaError("config command differs from the subcommand");
    }
  }
  j["command"] = command;
  for (const auto& [name, raw] : flags.values) {
    const Json v = convert(name, raw, option_kinds().at(name));
    if (name == "family") {
      j["family"]["kind"] = v;
    } else if (name == "eps") {
      j["family"]["eps"] = v;
    } else if (name == "k" && command != "perm-test") {
      j["family"]["k"] = v;
    } else {
      j[name] = v;
    }
  }
  return j;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw locality::SchemaError("cannot write " + path);
  out << contents;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locality_lab: simulation experiments for local graph algorithms"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  std::map<std::string, Flags> flags;
  for (const auto& command : locality::command_ids()) {
    auto* sub = app.add_subcommand(command);
    sub->set_help_flag("--help", "Print this help message and exit");
    auto& f = flags[command];
    sub->add_option("--config", f.config_path, "JSON config file");
    for (const auto& [name, kind] : option_kinds()) {
      sub->add_option_function<std::string>("--" + name,
                                            [&f, name = name](const std::string& v) { f.values[name] = v; });
    }
    sub->add_option_function<std::string>("--base", [&f](const std::string& v) { f.values["graph"] = v; },
                                          "alias of --graph");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << locality::error_record("schema", e.what()).dump() << '\n';
    return 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  std::string out_prefix;
  try {
    auto config = locality::parse_config(build_config(command, flags[command]));
    out_prefix = config.out;
    auto result = locality::run_command(config);
    const std::string report = result.report.dump(2) + "\n";
    std::cout << report;
    if (!out_prefix.empty()) {
      write_file(out_prefix + ".json", report);
      write_file(out_prefix + ".csv", result.csv);
      for (const auto& [suffix, contents] : result.files) write_file(out_prefix + suffix, contents);
    }
    if (result.failed_check) {
      std::cerr << locality::error_record("check-failed", *result.failed_check).dump() << '\n';
      return 2;
    }
    return 0;
  } catch (const locality::Error& e) {
    const Json record = locality::error_record(e.kind(), e.what());
    std::cout << record.dump() << '\n';
    if (!out_prefix.empty()) write_file(out_prefix + ".error.json", record.dump() + "\n");
    return locality::exit_code_for(e);
  }
}
