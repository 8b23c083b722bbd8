#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace greenwalk {

/**
 * Runs the CLI. Exit codes:
 *   0  success
 *   2  a theory-violation finding (an invariant the run was asked to certify
 *      failed; the report is still written)
 *   3  invalid configuration or unsupported request
 *   4  resource/accuracy/numerical failure while executing a valid request
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

} // namespace greenwalk
