#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigclass {

// Common base so callers can catch every library error with one handler.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptySampleSet : Error {
    EmptySampleSet() : Error("sample set is empty") {}
};

struct NonFiniteSample : Error {
    std::size_t index;
    explicit NonFiniteSample(std::size_t i)
        : Error("non-finite sample value at index " + std::to_string(i)), index(i) {}
};

// A class with zero total membership weight: its mean and spread are undefined.
struct EmptyClass : Error {
    int class_index;
    explicit EmptyClass(int k)
        : Error("class " + std::to_string(k) + " has zero total membership"), class_index(k) {}
};

// A class variance sits at the configured floor; the objective's gradient is
// not valid at a clamped point.
struct ClampActive : Error {
    int class_index;
    explicit ClampActive(int k)
        : Error("variance of class " + std::to_string(k) + " is clamped at the floor"),
          class_index(k) {}
};

// Raised by iterative optimizers when an assignment step empties a class;
// multi-start treats it as a signal to discard the restart.
struct ClassCollapse : Error {
    ClassCollapse() : Error("a class emptied during optimization") {}
};

struct AllRestartsCollapsed : Error {
    AllRestartsCollapsed() : Error("every restart collapsed to a single class") {}
};

struct TooLarge : Error {
    std::size_t n;
    explicit TooLarge(std::size_t n_)
        : Error("exhaustive search handles 2 to 20 samples, got " + std::to_string(n_)), n(n_) {}
};

struct NotADistribution : Error {
    explicit NotADistribution(const std::string& what) : Error("not a distribution: " + what) {}
};

// A type histogram contains samples beyond the grid bound; the quantized
// machinery assumes none.
struct OutliersPresent : Error {
    long long count;
    explicit OutliersPresent(long long c)
        : Error(std::to_string(c) + " sample(s) beyond the grid bound"), count(c) {}
};

struct BadConstants : Error {
    explicit BadConstants(const std::string& what) : Error("bad grid constants: " + what) {}
};

struct EmptyRegionGrid : Error {
    EmptyRegionGrid() : Error("no candidate parameter grid point passed the membership filter") {}
};

struct AllCensored : Error {
    AllCensored() : Error("no trial landed in the region at any sample size") {}
};

struct SoftMembership : Error {
    SoftMembership() : Error("operation requires hard memberships") {}
};

// Input-file and plan-file syntax problems; the CLI maps these to exit code 2.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace sigclass
