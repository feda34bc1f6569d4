#include "commands.hpp"

#include "fracheat/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using fracheat::cli::json;

int fail(const std::string& command, const std::string& type, const std::string& message, int code) {
  json err{{"error", {{"type", type}, {"message", message}}}, {"command", command}, {"exit_code", code}};
  std::cout << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = fracheat::cli;

  CLI::App app{"Fractional heat equation toolkit"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  std::string config_path;
  cli::Overrides ov;
  std::map<std::string, CLI::App*> subs;

  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->set_help_flag("--help", "print help");  // -h would clash with --h
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", ov.out, "output directory");
    sub->add_option("--seed", ov.seed, "random seed");
    sub->add_option("--threads", ov.threads, "worker threads");
    sub->add_option("--s", ov.s, "order s");
    sub->add_option("--n", ov.n, "dimension n");
    sub->add_option("--h", ov.h, "grid spacing");
    sub->add_option("--m", ov.m, "number of eigenpairs");
    sub->add_option("--t0", ov.t0, "reference time t0");
    sub->add_option("--eps", ov.eps, "Holder exponent loss eps");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("", "validation", e.what(), 1);
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    const json doc = config_path.empty() ? json::object() : cli::load_config(config_path);
    const auto config = cli::make_config(doc, ov);
    if (command == "audit-all") {
      const auto outcome = cli::audit_all(config, [](const fracheat::audit::CriterionResult& r) {
        std::fprintf(stderr, "[%s] criterion %d (%s): %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                     r.summary.c_str());
      });
      std::cout << outcome.summary.report.dump(2) << std::endl;
      return outcome.all_passed ? 0 : 3;
    }
    const auto artifacts = cli::run_command(command, config);
    cli::write_artifacts(config.out(), command, config.hash, artifacts);
    std::cout << artifacts.report.dump(2) << std::endl;
    return 0;
  } catch (const fracheat::ValidationError& e) {
    return fail(command, "validation", e.what(), 1);
  } catch (const json::exception& e) {
    return fail(command, "validation", e.what(), 1);
  } catch (const fracheat::NumericalError& e) {
    return fail(command, "numerical", e.what(), 2);
  } catch (const std::exception& e) {
    return fail(command, "numerical", e.what(), 2);
  }
}
