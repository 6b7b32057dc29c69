#pragma once

#include <stdexcept>
#include <string>

namespace hcrn {

// Error taxonomy shared by the whole library. Throw sites pick the narrowest
// category; the CLI maps any Error to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct StateError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct InputError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

}  // namespace hcrn
