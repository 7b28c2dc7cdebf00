#pragma once

#include <string>
#include <vector>

namespace hetreg {

/// The three p-value procedures the tool can run.
enum class TestMethod { kChiSquared, kFiducial, kGeneralized };

const char* to_string(TestMethod method);

/// Parses "chi2", "fiducial", "generalized" or "all" (case-sensitive);
/// throws InvalidArgument otherwise.
std::vector<TestMethod> parse_methods(const std::string& spec);

}  // namespace hetreg
