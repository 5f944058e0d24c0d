#include <doctest.h>

#include "cli_smoke.hpp"

TEST_CASE("every subcommand runs end to end") {
  const auto dir = std::filesystem::temp_directory_path() / "rankinfer_cli_test";
  const auto failures = cli_smoke::run_all(RANKINFER_CLI_PATH, dir);
  for (const auto& f : failures) FAIL_CHECK(f);
  CHECK(failures.empty());
  std::filesystem::remove_all(dir);
}
