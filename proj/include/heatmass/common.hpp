#pragma once

#include <stdexcept>
#include <string>

namespace heatmass {

enum class BoundaryCase { Dirichlet, Neumann };
enum class Scheme { BackwardEuler, CrankNicolson };
enum class PrecisionMode { Double, Extended };

enum class Errc {
  InvalidArgument = 1,
  MeshMismatch,
  PoleProximity,
  NonConverged,
  IllConditioned,
  Io,
  Internal,
};

/// Library error; carries a machine-usable code next to the message.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

const char* to_string(BoundaryCase c);
const char* to_string(Scheme s);
const char* to_string(PrecisionMode p);

}  // namespace heatmass
