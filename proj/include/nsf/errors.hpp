#pragma once

#include <stdexcept>
#include <string>

namespace nsf {

enum class Errc {
  Domain,
  Validation,
  Io,
  Misuse,
  Numeric,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Root bracket did not contain a sign change.
class BracketError : public Error {
 public:
  BracketError(const std::string& what, double lo, double hi)
      : Error(Errc::Numeric, what), lo(lo), hi(hi) {}
  double lo;
  double hi;
};

}  // namespace nsf
