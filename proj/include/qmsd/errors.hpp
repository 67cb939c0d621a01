#pragma once

#include <stdexcept>
#include <string>

namespace qmsd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// zd-algebra
struct ZeroInverseError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };

// stabilizer codes
struct InvalidCodeError : Error { using Error::Error; };

// wigner / dense states
struct ShapeError : Error { using Error::Error; };
struct BudgetExceededError : Error { using Error::Error; };

// distillation
struct ZeroAcceptanceError : Error { using Error::Error; };
struct NegativeInputError : Error { using Error::Error; };
struct EmptyCodespaceError : Error { using Error::Error; };

// file formats
struct ParseError : Error { using Error::Error; };

}  // namespace qmsd
