#ifndef TYPELAB_ERRORS_HPP
#define TYPELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace typelab {

// Base class for all typelab failures.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: malformed measures, non-monotone grids, parameter domain violations.
struct validation_error : error {
    using error::error;
};

// A grid too coarse for the exponentially shrinking windows it must resolve.
// Raised instead of silently producing a verdict from an undersampled sweep.
struct grid_error : error {
    using error::error;
};

// Requested a finite product value exactly at a stored zero.
struct at_zero_error : error {
    explicit at_zero_error(double where)
        : error("evaluation point coincides with a stored zero at " + std::to_string(where)),
          position(where) {}
    double position;
};

} // namespace typelab

#endif
