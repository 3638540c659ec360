#pragma once

#include <stdexcept>

namespace epd {

// Problems with user-supplied files: missing, unparseable, or structurally
// broken. The CLI maps these to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input parsed but violates the expected annotation/detection schema.
struct SchemaError : InputError {
    using InputError::InputError;
};

}  // namespace epd
