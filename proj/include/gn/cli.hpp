#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gn {

// Full command-line entry point (argument parsing, dispatch, exit-code
// mapping): 0 on success, 1 on a physics-invariant violation, 2 on a
// configuration error.  Progress goes to stderr; numeric results go to files
// in the configured output directory.
int cli_main(int argc, const char* const* argv);

// One self-contained invariant check: `run` throws on violation.
struct ValidationCheck {
  std::string name;
  std::function<void()> run;
};

// The cross-module invariant suite behind the `validate` subcommand, exposed
// so test harnesses can run the same checks in-process.
std::vector<ValidationCheck> validation_checks();

} // namespace gn
