#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace valtree {

// Base class for everything thrown by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed external input: unparsable text, bad JSON, non-prime modulus, ...
struct input_error : error {
    using error::error;
};

// An operation was called outside its contract (wrong argument shape,
// value out of the legal range, operation undefined for this object).
struct precondition_error : error {
    using error::error;
};

// The configured model cannot represent the request: slot-rank exhausted,
// mismatched ranks, more incommensurable generators than the descriptor holds.
struct config_error : error {
    using error::error;
};

// A bounded computation ran out of certified prefix: a limit-family value
// could not be stabilised (or a supremum recognised) within the materialised
// members.  Carries how many members were tried.
struct stability_error : error {
    std::size_t prefix_tried;
    stability_error(const std::string& what, std::size_t tried)
        : error(what), prefix_tried(tried) {}
};

} // namespace valtree
