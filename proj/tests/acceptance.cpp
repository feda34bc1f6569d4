#include "commands.hpp"

#include <cstdio>
#include <string>
#include <thread>

int main(int argc, char** argv) {
  namespace cli = fracheat::cli;
  const std::string out = argc > 1 ? argv[1] : "acceptance_artifacts";
  cli::Overrides ov;
  ov.out = out;
  ov.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto config = cli::make_config(cli::json::object(), ov);
  const auto outcome = cli::audit_all(config, [](const fracheat::audit::CriterionResult& r) {
    std::printf("criterion %2d %-32s %s  %s  (%.1f s)\n", r.id, r.name.c_str(), r.passed ? "PASS" : "FAIL",
                r.summary.c_str(), r.seconds);
    std::fflush(stdout);
  });
  std::printf("%s\n", outcome.all_passed ? "all criteria pass" : "some criteria FAIL");
  return outcome.all_passed ? 0 : 1;
}
