#pragma once

#include "eds/parser.hpp"
#include "eds/prolong.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace eds {

struct CommandOptions {
    bool json = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_steps;
    std::optional<std::string> solve_for;
    int samples = 20;
};

struct CommandResult {
    int exit_code = 0;   // 0 computed, 1 domain error, 2 parse error
    std::string output;  // report text or JSON
    std::string error;   // diagnostic when exit_code != 0
};

/// Commands: check-element, characters, cartan-test, prolong, torsion, symbol, charvar.
CommandResult run_command(const std::string &command, const std::string &file_text,
                          const CommandOptions &opts);

/// Element resolution shared with the test suites: builds the element described
/// by the spec file (chart matrix or explicit basis).
IntegralElement element_of(const SpecFile &spec);

} // namespace eds
