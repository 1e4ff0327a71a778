#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (bad graph, unbalanced supply, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// graph / cycle machinery
class SingularityError : public Error { public: using Error::Error; };
class AcyclicGraphError : public Error { public: using Error::Error; };
class CyclicGraphError : public Error { public: using Error::Error; };
class RankError : public Error { public: using Error::Error; };
class BasisKindError : public Error { public: using Error::Error; };
class WeightError : public Error { public: using Error::Error; };

// torus geometry
class PuncturedTorusError : public Error { public: using Error::Error; };
class NonIntegerWindingError : public Error { public: using Error::Error; };
class PolytopeMembershipError : public Error { public: using Error::Error; };

// flow solver
class BalanceError : public Error { public: using Error::Error; };
class ConvergenceBudgetError : public Error { public: using Error::Error; };
class FeasibilityError : public Error { public: using Error::Error; };
class MonotonicityError : public InputError { public: using InputError::InputError; };

// power-flow application layer
class GammaError : public InputError { public: using InputError::InputError; };
class UnknownCaseError : public InputError { public: using InputError::InputError; };
class MissingDataError : public InputError { public: using InputError::InputError; };

}  // namespace torusflow
