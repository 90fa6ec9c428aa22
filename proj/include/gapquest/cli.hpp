#pragma once

#include <ostream>

namespace gapquest {

/// Exit codes: 0 success, 1 validation/usage errors, 2 I/O errors.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace gapquest
