#pragma once

#include <stdexcept>
#include <string>

namespace diner {

// Shape disagreement between operands. Messages name both shapes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Non-finite values reached a computation that requires finite input.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A model was paired with a signal of a different size or attribute count.
class BindingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Violated internal contract (cache produced by another network, etc.).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace diner
