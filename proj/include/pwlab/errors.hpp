#pragma once

#include <stdexcept>
#include <string>

namespace pwlab {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidGeometry : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KernelNotContained : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DisconnectedUnion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateKernel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroMeasure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyOverlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConvex : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridTooCoarse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pwlab
