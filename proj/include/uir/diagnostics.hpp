#pragma once

#include <string>
#include <utility>
#include <vector>

namespace uir {

struct DiagnosticCheck {
    std::string name;
    bool pass = false;
    std::vector<std::pair<std::string, double>> observed;
};

struct DiagnosticOptions {
    // Test hook: offsets the top atom of each quadrature-pair P by this
    // amount, falsifying the moment-matching claim when nonzero.
    double moment_perturbation = 0.0;
};

struct DiagnosticReport {
    std::vector<DiagnosticCheck> checks;

    bool all_pass() const;
    // Flat key value lines: "<check>.status pass|fail" plus one line per
    // observed constant, then "overall.status".
    std::string to_table() const;
};

// Runs every inequality sweep and kernel check once, recording the observed
// constants next to each verdict.
DiagnosticReport diagnose(const DiagnosticOptions& opts = {});

}  // namespace uir
