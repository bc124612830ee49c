#pragma once

#include <stdexcept>
#include <string>

namespace ccb {

// One error kind per failure class the library reports. The C API maps
// these 1:1 onto ccb_status codes, so keep the list in sync with ccbench.h.
enum class ErrorKind {
    io = 1,
    parse = 2,
    invalid_argument = 3,
    missing_label = 4,
    unknown_label = 5,
    dim_mismatch = 6,
    duplicate_id = 7,
    no_positive_partner = 8,
    no_negative_partner = 9,
    single_class = 10,
    no_convergence = 11,
    non_finite = 12,
    empty_vocabulary = 13,
    length_mismatch = 14,
    missing_label_score = 15,
    wrong_language_count = 16,
    seq_too_long = 17,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace ccb
