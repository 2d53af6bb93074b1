// Command-line front end: `run` executes a program against the runtime,
// `analyze` prints type flow results, `mine` classifies an allocation
// trace, `report` produces the histogram tables. Exit codes: 0 success,
// 1 runtime fault, 2 usage or input error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flexgc {

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace flexgc
