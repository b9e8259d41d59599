#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace bimodal::diag {

using WarningHandler = std::function<void(std::string_view)>;

// Invariant warnings (clamped round-off, truncation health, ...). Counted
// process-wide so the CLI can honour --strict.
void warn(std::string_view message);

std::size_t warning_count();
void reset_warning_count();

// Default handler writes to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace bimodal::diag
