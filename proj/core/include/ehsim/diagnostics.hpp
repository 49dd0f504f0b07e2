// Warning sink used for non-fatal configuration diagnostics.
#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace ehsim {

using WarningSink = std::function<void(std::string_view)>;

/// Emits a warning through the installed sink (stderr by default).
void warn(std::string_view message);

/// Replaces the warning sink; returns the previous one.
WarningSink set_warning_sink(WarningSink sink);

/// Restores the previous sink when it goes out of scope.
class ScopedWarningSink {
public:
    explicit ScopedWarningSink(WarningSink sink) : previous_(set_warning_sink(std::move(sink))) {}
    ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
    ScopedWarningSink(const ScopedWarningSink&) = delete;
    ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

private:
    WarningSink previous_;
};

}  // namespace ehsim
