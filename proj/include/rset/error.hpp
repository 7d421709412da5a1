#pragma once

#include <stdexcept>
#include <string>

namespace rset {

// Failure categories surfaced by the library. The CLI maps bad_usage to exit
// code 1 and everything else to exit code 2.
enum class Errc {
  bad_usage,
  bad_input,
  io_error,
  empty_set,
  degenerate_boundary,
  domain_mismatch,
  empty_stack,
  stack_too_small,
  empty_window,
  unsupported_model,
  unsupported_domain,
  rank_deficient,
  dimension_mismatch,
  domain_violation,
  not_psd,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace rset
