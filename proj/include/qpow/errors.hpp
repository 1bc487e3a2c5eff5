#pragma once

#include <stdexcept>

namespace qpow {

/// The requested schedule cannot exist under the given consensus rules —
/// e.g. a retarget jump larger than the clamp window, or a ramp strategy
/// asked to run without a clamp to ramp against. Distinct from plain
/// argument errors: the inputs are individually fine, they just cannot be
/// combined.
class incompatibility_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// The request is well-formed but exceeds the generator's supported size
/// budget (e.g. a revenue target that would need more peak epochs than the
/// search is willing to build).
class capacity_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace qpow
