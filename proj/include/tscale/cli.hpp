// Command-line front end shared by the tscale executable and the tests.
#pragma once

#include <ostream>

namespace tscale {

/// Exit codes: 0 scaled or in, 1 not in polytope or eps-far, 2 usage or input
/// error, 3 numeric failure.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tscale
