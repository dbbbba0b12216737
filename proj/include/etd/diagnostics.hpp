#pragma once
// Process-wide sink for non-fatal validity warnings (defaults to stderr).

#include <functional>
#include <string>

namespace etd {

using WarningHandler = std::function<void(const std::string&)>;

void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace etd
