#include "bimodal/diagnostics.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace bimodal::diag {
namespace {

std::atomic<std::size_t> g_count{0};
std::mutex g_mutex;

WarningHandler& handler_slot() {
    static WarningHandler handler = [](std::string_view msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}

}  // namespace

void warn(std::string_view message) {
    ++g_count;
    std::lock_guard lock(g_mutex);
    if (auto& h = handler_slot()) h(message);
}

std::size_t warning_count() { return g_count.load(); }

void reset_warning_count() { g_count = 0; }

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_mutex);
    auto previous = std::move(handler_slot());
    handler_slot() = std::move(handler);
    return previous;
}

}  // namespace bimodal::diag
