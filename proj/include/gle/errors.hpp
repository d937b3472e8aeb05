#pragma once

#include <stdexcept>
#include <string>

namespace gle {

/// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A lattice path increment outside {0,1}.
struct step_violation : error {
    using error::error;
};

/// Ensemble and spec shapes do not line up (k, window, vector sizes).
struct dimension_mismatch : error {
    using error::error;
};

/// Boundary data admits no ensemble; message carries the failed conditions.
struct infeasible_boundary : error {
    using error::error;
};

/// Enumeration would exceed the configured cap.  `count` holds the decimal
/// size the enumeration would have had.
struct cap_exceeded : error {
    std::string count;
    cap_exceeded(const std::string& msg, std::string count_)
        : error(msg), count(std::move(count_)) {}
};

/// Rejection sampler gave up.  `tries` is the number of attempts made.
struct max_tries_exceeded : error {
    long long tries;
    max_tries_exceeded(const std::string& msg, long long tries_)
        : error(msg), tries(tries_) {}
};

/// A chain state handed to a dynamics routine is not admissible for its spec.
struct inadmissible_state : error {
    using error::error;
};

/// Conditioning event has probability zero (zero avoiding count).
struct degenerate_denominator : error {
    using error::error;
};

/// Numerical integration failed to reach the requested tolerance.
struct quadrature_failure : error {
    using error::error;
};

/// Ensemble window cannot support the requested rescaling.
struct window_too_small : error {
    using error::error;
};

/// A pair of specs violates the hypotheses of a coupled run.
struct incompatible_specs : error {
    using error::error;
};

/// Malformed input document.
struct parse_error : error {
    using error::error;
};

} // namespace gle
