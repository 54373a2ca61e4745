#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hardedge {

/// Exit codes: 0 success, 1 a threshold check failed, 2 usage or config error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, char** argv);

/// Human-readable description of the configuration file format.
const char* config_schema_help();

}  // namespace hardedge
