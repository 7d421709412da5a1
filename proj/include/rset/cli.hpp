#pragma once

namespace rset {

// Command-line front end. Returns the process exit code: 0 on success, 1 on
// usage errors, 2 on data errors.
int run(int argc, const char* const* argv);

}  // namespace rset
