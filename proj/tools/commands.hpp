#pragma once

namespace nctf::cli {

/// Parses argv and runs one subcommand. Returns the process exit status.
int run(int argc, char** argv);

}  // namespace nctf::cli
