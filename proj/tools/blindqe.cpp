#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blindqe/cli/commands.hpp"

namespace {

struct Sub {
  CLI::App* app = nullptr;
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d{
      {"bounds", "correctness/security bounds of the threshold gadget"},
      {"gadget-sim", "Monte Carlo of the threshold or post-selected gadget"},
      {"rsp-sim", "blind graph state preparation fidelity"},
      {"ubqc-sim", "delegated computation output distribution"},
      {"sdqc-sim", "verified delegated computation with hidden test rounds"},
      {"blindness-verify", "exact server-view distances for small pulse trains"},
      {"physics-sweep", "two-level / Lambda emitter efficiency against p2 over alpha_sq"},
      {"physics-opt", "optimal pulse area for one alpha_sq, or the gap crossing"},
  };
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace blindqe::cli;
  CLI::App app{"blindqe: delegated quantum computation with quantum-emitter clients"};
  app.require_subcommand(1);
  std::map<std::string, std::unique_ptr<Sub>> subs;
  for (const auto& [name, keys] : command_table()) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, descriptions().at(name));
    sub->app->add_option("--config", sub->config, "flat JSON config; flags override its keys")
        ->check(CLI::ExistingFile);
    for (const auto* list : {&common_keys(), &keys})
      for (const auto& k : *list) sub->options[k.name] = sub->app->add_option(flag_name(k.name), sub->values[k.name], k.help);
    subs[name] = std::move(sub);
  }
  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, sub] : subs) {
    if (!sub->app->parsed()) continue;
    try {
      std::map<std::string, std::string> flags;
      for (const auto& [key, opt] : sub->options)
        if (opt->count() > 0) flags[key] = sub->values[key];
      const auto rc = make_run_config(
          name, sub->config.empty() ? std::nullopt : std::optional<std::string>(sub->config), flags);
      const auto result = execute_command(rc);
      if (rc.out) {
        std::ofstream os(*rc.out);
        if (!os) throw std::runtime_error("cannot write '" + *rc.out + "'");
        write_output(os, rc, result.table);
      } else {
        write_output(std::cout, rc, result.table);
      }
      if (result.status != 0) std::cerr << name << ": verification failed\n";
      return result.status;
    } catch (const ConfigError& e) {
      std::cerr << name << ": config error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << name << ": error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
