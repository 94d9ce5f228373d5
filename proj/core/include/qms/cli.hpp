#pragma once

#include <string>
#include <vector>

namespace qms {

// Command-line front end.  `args` excludes the program name.  Returns the
// process exit code: 0 on success, 1 for configuration problems (bad flags,
// unreadable files, invalid parameter combinations), 2 when a resource
// guard or runtime failure stops an otherwise valid run.
int run_cli(const std::vector<std::string>& args);

}  // namespace qms
