#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "lagexp/errors.hpp"
#include "lagexp/io.hpp"

using namespace lagexp;

int main(int argc, char** argv) {
  CLI::App app{"Equivariant Lagrangian self-expanders in C^2"};
  app.require_subcommand(1);

  const auto& specs = cli::commands();
  std::vector<std::map<std::string, std::string>> raw(specs.size());
  std::vector<std::string> configPath(specs.size());
  std::vector<std::vector<std::pair<std::string, CLI::Option*>>> options(specs.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto* sub = app.add_subcommand(specs[i].name, specs[i].help);
    sub->add_option("--config", configPath[i], "JSON config file (flags win)");
    for (const auto& o : specs[i].options) {
      auto* opt = sub->add_option("--" + cli::flag_name(o.key), raw[i][o.key], o.help);
      if (!o.fallback.is_null()) opt->default_str(o.fallback.dump());
      options[i].emplace_back(o.key, opt);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitPass : cli::kExitFailure;
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    nlohmann::json file;
    try {
      if (!configPath[i].empty()) file = parse_json(read_text(configPath[i]), configPath[i]);
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return cli::kExitIo;
    }
    std::map<std::string, std::string> given;
    for (const auto& [key, opt] : options[i]) {
      if (opt->count() > 0) given[key] = raw[i][key];
    }
    nlohmann::json config;
    try {
      config = cli::resolve(specs[i], file, given);
    } catch (const DomainError& e) {
      std::cerr << "domain error: " << e.what() << std::endl;
      return cli::kExitFailure;
    }
    return cli::execute(specs[i], config);
  }
  return cli::kExitFailure;
}
