#pragma once

namespace phaseless {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDispatch = 3, kExitSolver = 4 };

/// Entry point of the `phaseless` command line tool.
int run_cli(int argc, char** argv);

}  // namespace phaseless
