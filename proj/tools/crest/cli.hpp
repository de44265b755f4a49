#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace crest::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kIoError = 2,
  kProviderError = 3,
};

// Entry points. `args` excludes the program name.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommands, each a thin composition over the library. They throw crest
// errors; run() maps them to exit codes.
int cmd_score(const RunConfig& config, std::ostream& out);
int cmd_prompts(const RunConfig& config, std::ostream& out);
int cmd_mask(const RunConfig& config, std::ostream& out);
int cmd_select(const RunConfig& config, std::ostream& out);
int cmd_corrupt(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace crest::cli
