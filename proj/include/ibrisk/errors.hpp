#pragma once

#include <stdexcept>
#include <string>

namespace ibrisk {

// Error taxonomy mirrored by the CLI exit codes:
//   validation_error -> 2, infeasible_error -> 3, io_error -> 4.

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration that cannot be satisfied by any output (e.g. a target
// density above what the fitness support admits).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ibrisk
