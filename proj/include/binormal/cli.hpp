#pragma once

#include <iosfwd>

namespace binormal::cli {

/// Entry point of the `binormal` tool. Exit codes: 0 pass, 1 usage or config
/// error, 2 verification failure, 3 numeric singularity.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace binormal::cli
