#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radon::cli {

enum ExitCode : int {
  kPass = 0,
  kVerdictFail = 1,
  kConfigError = 2,
  kStageError = 3,
};

/// Runs `radon_cert <command> [flags]`; args excludes the program name.
/// Commands: solve, certify, growth, transport, report.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace radon::cli
