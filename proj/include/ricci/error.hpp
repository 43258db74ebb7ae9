#pragma once

#include <stdexcept>
#include <string>

namespace ricci {

/// Base for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, invalid graphs, out-of-range arguments.
class InputError : public Error {
public:
    using Error::Error;
};

/// A computation could not be completed on otherwise valid input.
class NumericalError : public Error {
public:
    using Error::Error;
};

class InvalidGraph : public InputError {
public:
    using InputError::InputError;
};

class UnknownVertex : public InputError {
public:
    using InputError::InputError;
};

class EpsilonTooLarge : public InputError {
public:
    using InputError::InputError;
};

class DegenerateMetric : public InputError {
public:
    using InputError::InputError;
};

class NotATree : public InputError {
public:
    using InputError::InputError;
};

class NotUniformMeasure : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    using InputError::InputError;
};

class DisconnectedAfterSurgery : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LpError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepSizeTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace ricci
