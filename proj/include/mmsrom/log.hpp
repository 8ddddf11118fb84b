#pragma once

// Minimal leveled logging to std::clog. Level from MMSROM_LOG (0 quiet, 1 warn, 2 info).

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

namespace mmsrom::log {

inline std::atomic<int>& level() {
    static std::atomic<int> lvl{[] {
        const char* env = std::getenv("MMSROM_LOG");
        return env ? std::atoi(env) : 1;
    }()};
    return lvl;
}

inline void warn(const std::string& msg) {
    if (level() >= 1) std::clog << "[mmsrom] warning: " << msg << '\n';
}

inline void info(const std::string& msg) {
    if (level() >= 2) std::clog << "[mmsrom] " << msg << '\n';
}

}  // namespace mmsrom::log
