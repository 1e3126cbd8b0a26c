#ifndef LANDMARK_COMMON_ERROR_HPP
#define LANDMARK_COMMON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace landmark {

// Error categories shared by the C++ core and the C API status codes.
enum class Errc {
    kZeroVector = 1,
    kDimMismatch,
    kInvalidP,
    kIoError,
    kFormatError,
    kInvalidFraction,
    kBatchTooSmall,
    kInvalidTarget,
    kMissingCheckpoint,
    kDuplicateId,
    kIdMisalignment,
    kConfigError,
    kInvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace landmark

#endif
