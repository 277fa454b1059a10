#pragma once

#include <stdexcept>
#include <string>

namespace ekphd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateGeometry : Error {
  using Error::Error;
};
struct SingularInformation : Error {
  using Error::Error;
};
struct SingularInnovation : Error {
  using Error::Error;
};
struct SingularPrior : Error {
  using Error::Error;
};
struct SingularFim : Error {
  using Error::Error;
};
struct UnknownLandmark : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ekphd
