#pragma once

#include <stdexcept>
#include <string>

namespace ppnn {

// Error categories map 1:1 onto CLI exit codes (see tools/ppnn_main.cpp).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration, arguments, or domain preconditions. Exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// File I/O and container format problems (bad magic, truncation, ...). Exit code 3.
struct IoError : Error {
  using Error::Error;
};

// Non-finite values where finite ones are required. Exit code 4.
struct DivergedError : Error {
  using Error::Error;
};

}  // namespace ppnn
