#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An intermediate or final value left the admissible magnitude range.
struct ArithmeticOverflow : Error {
    using Error::Error;
};

/// A bipartite graph references vertices outside its color classes, or its
/// orders do not match the sets it is paired with.
struct MalformedGraph : Error {
    using Error::Error;
};

/// An enumeration or allocation guard was exceeded.
struct TooLarge : Error {
    using Error::Error;
};

/// Pair refinement exhausted its search without producing a verified subset.
/// A qualifying subset exists for every positive-density input, so this
/// indicates a violated precondition or an implementation bug, never an
/// expected outcome.
struct RefinementFailed : Error {
    using Error::Error;
};

/// The edge density of a graph is too low for the dense-extraction routine.
struct GraphNotDenseEnough : Error {
    using Error::Error;
};

/// A pipeline stage could not realize its existence claim; the message names
/// the stage.
struct PipelineFailed : Error {
    explicit PipelineFailed(const std::string& stage, const std::string& what)
        : Error("pipeline failed at stage '" + stage + "': " + what), stage_name(stage) {}
    std::string stage_name;
};

/// A self-check attached to a returned result did not re-verify. Results are
/// never returned with failing certificates; this throws instead.
struct CertificateViolation : Error {
    using Error::Error;
};

/// Textual input (set files, GAP descriptors) could not be parsed; the
/// message names the offending token.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace dlab
