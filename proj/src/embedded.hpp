#pragma once

#include <string_view>
#include <vector>

// Data files compiled into the library (see data/ and cmake/embedded.cpp.in).
namespace exportscope::embedded {

std::string_view signatures();
std::vector<std::string_view> rule_files();

}  // namespace exportscope::embedded
