#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "codemix/error.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace codemix::cli {
namespace {

nlohmann::json read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "config file not found: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, path + ": " + e.what());
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Offensive-language classifier for code-mixed text"};
  app.name("codemix");
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file (RunConfig field names)");
  app.add_option("--seed", seed, "Seed for sampling, shuffling, dropout and init")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // One flag per config field, named after it.
  const nlohmann::json defaults = RunConfig{};
  std::map<std::string, std::string> flag_values;
  for (const auto& [key, value] : defaults.items()) {
    if (key == "seed") continue;
    app.add_option("--" + kebab_case(key), flag_values[key],
                   value.is_array() ? "comma-separated list" : "overrides '" + key + "'")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  auto* prepare = app.add_subcommand("prepare", "Clean raw TSVs, build the vocabulary");
  auto* train = app.add_subcommand("train", "Train on the prepared corpus");
  auto* eval = app.add_subcommand("eval", "Score a labeled TSV with a checkpoint");
  auto* predict = app.add_subcommand("predict", "Predict labels for a TSV or stdin lines");
  for (auto* sub : {prepare, train, eval, predict}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[config]: " << e.what() << '\n';
    return exit_code_for(ErrorKind::kConfig);
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = merge(cfg, read_config_file(config_path));
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& [key, text] : flag_values) {
      if (app.count("--" + kebab_case(key)) > 0) {
        overrides[key] = parse_flag_value(defaults.at(key), key, text);
      }
    }
    if (seed) overrides["seed"] = *seed;
    cfg = merge(cfg, overrides);

    if (prepare->parsed()) cmd_prepare(cfg, out);
    if (train->parsed()) cmd_train(cfg, out);
    if (eval->parsed()) cmd_eval(cfg, out);
    if (predict->parsed()) cmd_predict(cfg, in, out);
    return 0;
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[io]: " << e.what() << '\n';
    return exit_code_for(ErrorKind::kIo);
  }
}

}  // namespace codemix::cli
