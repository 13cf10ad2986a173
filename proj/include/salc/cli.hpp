#pragma once

#include <string>
#include <vector>

namespace salc::cli {

/// Entry point shared by the salc binary and in-process tests.
/// `args` excludes the program name. Exit codes: 0 success, 1 when --strict
/// is set and some instances were unparseable, 2 for usage/config/IO errors.
int run(const std::vector<std::string>& args);

}  // namespace salc::cli
