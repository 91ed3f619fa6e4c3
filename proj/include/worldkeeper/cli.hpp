#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace worldkeeper {

enum ExitCode : int { kExitOk = 0, kExitFatal = 1, kExitUsage = 2 };

/// Entry point of the `worldkeeper` tool. `args` excludes the program name.
///
///   play  --world <file> [--backend scripted|http] [--script <file>]
///         [--config <file>] [--transcript <file>] [--seed <int>]
///         [--quiet-rejections] [--templates <file>] [--fewshot <file>]
///   serve [--host <addr>] [--port <n>] [--cors] [--redact-raw]
///         [--snapshot-dir <dir>]
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace worldkeeper
