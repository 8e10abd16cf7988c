#ifndef PSVD_TESTS_CLI_RUN_HPP
#define PSVD_TESTS_CLI_RUN_HPP

// In-process CLI driver shared by the CLI and acceptance tests.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace psvd::testing {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

inline CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "psvd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = psvd::cli::run_cli(static_cast<int>(argv.size()), argv.data(),
                                      out, err);
  return {code, out.str(), err.str()};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("psvd_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace psvd::testing

#endif  // PSVD_TESTS_CLI_RUN_HPP
