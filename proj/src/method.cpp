#include "hetreg/method.hpp"

#include "hetreg/error.hpp"

namespace hetreg {

const char* to_string(TestMethod method) {
  switch (method) {
    case TestMethod::kChiSquared:
      return "chi2";
    case TestMethod::kFiducial:
      return "fiducial";
    case TestMethod::kGeneralized:
      return "generalized";
  }
  return "unknown";
}

std::vector<TestMethod> parse_methods(const std::string& spec) {
  if (spec == "chi2") {
    return {TestMethod::kChiSquared};
  }
  if (spec == "fiducial") {
    return {TestMethod::kFiducial};
  }
  if (spec == "generalized") {
    return {TestMethod::kGeneralized};
  }
  if (spec == "all") {
    return {TestMethod::kChiSquared, TestMethod::kFiducial,
            TestMethod::kGeneralized};
  }
  fail(ErrorCode::InvalidArgument,
       "unknown method \"" + spec +
           "\" (expected chi2, fiducial, generalized or all)");
}

}  // namespace hetreg
