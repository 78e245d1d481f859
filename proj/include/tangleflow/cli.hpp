#pragma once

namespace tangleflow {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitViolation = 1,
    kExitUsage = 2,
};

/// Entry point of the `tangleflow` tool: classify, relax, scaling, spectrum, verify.
/// Results go to stdout, diagnostics to stderr. TANGLEFLOW_LOG selects the
/// log level (quiet, info, debug; default info).
int cli_main(int argc, char** argv);

} // namespace tangleflow
