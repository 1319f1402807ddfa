#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace envlab {

/// Entry point for the `envlab` command; returns the process exit code.
///
/// Subcommands: eval, table, roots, verify, catalog, simulate, serve.
/// eval exits 0 for an attainable observation, 2 for an unattainable one and
/// 1 for bad input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace envlab
