#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace birot {

struct CriterionResult {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Run one verification suite, printing a PASS/FAIL line per criterion with
/// the measured values. Suites: kernel (C1-C4), lorentz (C11), routes
/// (C5-C6), conservation (C7-C8), estimates (C9, C10, C12), all.
/// Scenario artifacts produced along the way land under out_dir.
std::vector<CriterionResult> verify_suite(const std::string& suite, std::ostream& log,
                                          const std::string& out_dir = "verify_out");

/// Convenience wrapper: returns 0 when every criterion passed, 1 otherwise.
int verify_main(const std::string& suite, std::ostream& log,
                const std::string& out_dir = "verify_out");

}  // namespace birot
