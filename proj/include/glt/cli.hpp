#pragma once

namespace glt {

// Entry point of the glt-factor tool; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace glt
