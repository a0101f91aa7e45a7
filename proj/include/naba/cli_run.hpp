#pragma once

#include <stdexcept>

#include "naba/chain.hpp"
#include "naba/report.hpp"

namespace naba {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Build a chain from its JSON description:
// {"algebra": "A2", "remove": 1, "aux": "defining"|"spin1",
//  "length": 2 | "sites": [{"shift": "1/3"}, ...], "twist": ["1",...], "hbar": "1"}
ChainSpec chain_from_json(const Json& cfg);

// Execute one fully-specified run configuration and return the report.
// The report embeds the configuration so that it can be re-executed.
Json run_config(const Json& config);

// Re-run the embedded configuration of a report and compare the deterministic
// sections; throws Mismatch on disagreement.
Json reproduce_report(const Json& report);

// Command-line front end; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace naba
