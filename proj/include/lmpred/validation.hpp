#pragma once

#include <string>
#include <vector>

namespace lmpred {

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // what it was compared against
    std::string detail;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    const Check* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

}  // namespace lmpred
