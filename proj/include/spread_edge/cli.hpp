#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace spread_edge {

class EdgeService;

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitOutOfModel = 3,
    kExitIo = 4,
};

struct CliHooks {
    /// Called by `serve` once the socket is bound, before blocking. Tests use it to stop the server.
    std::function<void(EdgeService&, int port)> on_serving;
};

/// Runs one invocation. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliHooks& hooks = {});

} // namespace spread_edge
