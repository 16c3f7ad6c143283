// Stand-in for the Lean REPL used by tests. Speaks the same JSON protocol,
// answers from the simulator, and honors fake:sleep/crash/hang/error/warn.
//
// Environment: FAKE_LEAN_VERSION (reported by --version),
// FAKE_LEAN_IMPORT_MS (delay for the header import),
// FAKE_LEAN_FAIL_IMPORT (answer the import with an error).

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "forge/repl/simulator.hpp"

namespace {

void sleep_ms(long ms) {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

void reply(const forge::Json& j) {
    std::cout << j.dump(2) << "\n\n" << std::flush;
}

}  // namespace

int main(int argc, char** argv) {
    const char* version = std::getenv("FAKE_LEAN_VERSION");
    if (argc > 1 && std::string(argv[1]) == "--version") {
        std::cout << "Lean (version " << (version ? version : "4.8.0-rc1") << ", simulated)\n";
        return 0;
    }

    int next_env = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        forge::Json req = forge::Json::parse(line, nullptr, false);
        if (req.is_discarded() || !req.is_object() || !req.contains("cmd")) {
            reply({{"message", "could not parse request"}});
            continue;
        }
        const std::string cmd = req["cmd"].get<std::string>();

        if (cmd.rfind("import", 0) == 0) {
            if (const char* d = std::getenv("FAKE_LEAN_IMPORT_MS")) sleep_ms(std::atol(d));
            if (std::getenv("FAKE_LEAN_FAIL_IMPORT")) {
                reply({{"env", next_env++},
                       {"messages", {{{"severity", "error"}, {"data", "unknown package 'Mathlib'"}}}}});
            } else {
                reply({{"env", next_env++}});
            }
            continue;
        }

        auto d = forge::repl::parse_directives(cmd);
        sleep_ms(d.sleep_ms);
        if (d.crash) std::_Exit(3);
        if (d.hang) {
            for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
        }
        if (req.contains("env") && req["env"].is_number_integer() && req["env"].get<int>() >= next_env) {
            reply({{"message", "unknown environment."}});
            continue;
        }
        reply(forge::repl::simulate_response(cmd, next_env++));
    }
    return 0;
}
