#pragma once

#include "minivl/design.hpp"
#include "minivl/minivl.hpp"

namespace minivl {

// Runs an elaborated design. Runtime problems (step, delta or time limits,
// oversized values) end the run with exit code 2 and a diagnostic.
SimResult simulate(Design design, const SimOptions& options);

}  // namespace minivl
