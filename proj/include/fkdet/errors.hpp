#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fkdet {

// Failure taxonomy shared by the library and the CLI exit codes.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed expression / file syntax; carries the byte offset of the problem.
struct parse_error : error {
  std::size_t position;
  parse_error(const std::string& msg, std::size_t pos)
      : error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

// Caller violated a documented contract (wrong model, bad parameter, ...).
struct precondition_error : error {
  using error::error;
};

// A numeric procedure failed to produce a trustworthy result.
struct numeric_error : error {
  using error::error;
};

// Positivity breakdown in a factorization or recursion; `index` is the first
// failing leading dimension / chain step (1-based).
struct not_positive_definite : numeric_error {
  std::int64_t index;
  not_positive_definite(const std::string& msg, std::int64_t k)
      : numeric_error(msg + " (at index " + std::to_string(k) + ")"), index(k) {}
};

// A configured budget (ball size, grid size, matrix dimension) was exceeded.
// `reached` reports how far the computation got before giving up.
struct resource_error : error {
  std::int64_t reached;
  explicit resource_error(const std::string& msg, std::int64_t r = 0)
      : error(msg), reached(r) {}
};

struct io_error : error {
  using error::error;
};

}  // namespace fkdet
