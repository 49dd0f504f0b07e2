#pragma once

#include <cstdint>
#include <string>

namespace ehsim {

enum class Mode { BatteryOnly, Joint };

inline std::string to_string(Mode mode) { return mode == Mode::Joint ? "joint" : "battery-only"; }

/// Battery level in [0, M], queue level in [0, K], slot index.
struct NodeState {
    double battery = 0.0;
    double queue = 0.0;
    std::uint64_t slot = 0;
};

}  // namespace ehsim
