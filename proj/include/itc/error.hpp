#ifndef ITC_ERROR_HPP
#define ITC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace itc {

/// Malformed input: unknown vertex, bad file, violated precondition on arguments.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented contract of an operation.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Singular systems, degenerate data.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A bounded computation (e.g. DAG enumeration) hit its cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace itc

#endif  // ITC_ERROR_HPP
