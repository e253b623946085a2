#pragma once

#include <string_view>

namespace cdolab {

enum class Verdict { Pass, Fail, Indeterminate };

constexpr std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

// Fail dominates Indeterminate, which dominates Pass.
constexpr Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Indeterminate || b == Verdict::Indeterminate) return Verdict::Indeterminate;
    return Verdict::Pass;
}

}  // namespace cdolab
