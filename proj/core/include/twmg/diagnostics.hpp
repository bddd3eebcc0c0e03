#pragma once

#include <functional>
#include <string_view>

namespace twmg {

// Non-fatal conditions (weak-limit violations, focus spread) are routed here.
// The default handler prints to stderr.
using WarningHandler = std::function<void(std::string_view)>;

WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace twmg
