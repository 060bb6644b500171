#pragma once

#include <ostream>

namespace hjplan {

/// Entry point for the hjplan tool. Results go to `out` as JSON; failures
/// print {"error": ..., "key": ...} to `err`. Returns 0 on success, 1 on a
/// failed run or invalid input, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hjplan
