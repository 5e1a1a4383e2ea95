#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace feedql {
class HttpServer;
}

namespace feedql::cli {

enum ExitCode { ok = 0, usage = 1, rejected = 2, transport = 3 };

/// Called once `serve` has bound its socket, before it starts accepting.
using ServeHook = std::function<void(HttpServer&)>;

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const ServeHook& on_bound = {});

} // namespace feedql::cli
