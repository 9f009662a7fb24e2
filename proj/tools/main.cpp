#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"

int main(int argc, char** argv) {
  // Diagnostics go to stderr so stdout stays machine-readable.
  spdlog::set_default_logger(spdlog::stderr_color_mt("legalrag"));
  if (const char* level = std::getenv("LEGALRAG_LOG")) spdlog::set_level(spdlog::level::from_str(level));

  std::vector<std::string> args(argv + 1, argv + argc);
  return legalrag::cli::Run(args, std::cin, std::cout, std::cerr);
}
