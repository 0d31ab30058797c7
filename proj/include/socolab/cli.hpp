#pragma once

#include <string>
#include <vector>

namespace socolab {

// Exit codes: 0 success, 2 config error, 3 runtime failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace socolab
