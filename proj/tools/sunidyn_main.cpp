// Command line front end: sunidyn <command> --config <path> [--out <path>]
// [--seed <u64>]. Reports go to --out or stdout; diagnostics go to stderr.
// Exit codes: 0 success, 2 usage/precondition/schema errors (no report),
// 3 search or budget exhaustion (report with partial results).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sunidyn/report.hpp"

namespace {

struct CommandArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
};

int run_command(const std::string& command, const CommandArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) {
    std::cerr << "sunidyn: cannot open config file " << args.config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  try {
    nlohmann::json config = nlohmann::json::parse(buffer.str());
    // The subcommand fixes the command; a config may restate it but not
    // contradict it.
    auto stamp = [&](nlohmann::json& entry) {
      if (!entry.is_object()) throw sunidyn::UsageError("config must be an object");
      if (entry.contains("command") && entry["command"] != command) {
        throw sunidyn::UsageError("config command \"" +
                                  entry["command"].get<std::string>() +
                                  "\" does not match subcommand \"" + command + "\"");
      }
      entry["command"] = command;
    };
    if (config.is_array()) {
      for (auto& entry : config) stamp(entry);
    } else {
      stamp(config);
    }

    const sunidyn::RunResult result = sunidyn::run_config(config, args.seed);
    const std::string text = result.report.dump(2);
    if (args.out_path.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream out(args.out_path);
      if (!out) {
        std::cerr << "sunidyn: cannot open output file " << args.out_path << "\n";
        return 2;
      }
      out << text << "\n";
    }
    return result.exit_code;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "sunidyn: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const sunidyn::UsageError& e) {
    std::cerr << "sunidyn: " << e.what() << "\n";
    return 2;
  } catch (const sunidyn::CapacityError& e) {
    std::cerr << "sunidyn: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simultaneous-universality laboratory"};
  app.require_subcommand(1);

  const char* commands[] = {"decide", "construct", "dirichlet", "orbit", "probe"};
  const char* descriptions[] = {
      "decision procedures for shift families",
      "build and verify an approximation certificate",
      "simultaneous return times on the unit circle",
      "scan joint orbits for the best simultaneous index",
      "sampled transitivity probe",
  };

  CommandArgs args;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
    sub->add_option("--config", args.config_path, "JSON experiment config")->required();
    sub->add_option("--out", args.out_path, "report path (default: stdout)");
    sub->add_option("--seed", args.seed, "seed override");
  }

  CLI11_PARSE(app, argc, argv);

  for (const char* command : commands) {
    if (app.get_subcommand(command)->parsed()) {
      return run_command(command, args);
    }
  }
  return 2;
}
