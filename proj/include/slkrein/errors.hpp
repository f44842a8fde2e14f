#pragma once

#include <stdexcept>
#include <string>

namespace slkrein {

// Error categories, used by the CLI to map exceptions onto exit codes.
enum class ErrorKind {
    Input,     // malformed or inconsistent user input
    Numeric,   // a computation hit a mathematical obstruction
    Property,  // a verified identity failed beyond tolerance
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define SLKREIN_DEFINE_ERROR(NAME, KIND)                                                 \
    class NAME : public Error {                                                          \
    public:                                                                              \
        explicit NAME(const std::string& what) : Error(ErrorKind::KIND, #NAME ": " + what) {} \
    }

SLKREIN_DEFINE_ERROR(BadInterval, Input);
SLKREIN_DEFINE_ERROR(BadGrid, Input);
SLKREIN_DEFINE_ERROR(NonPositiveCoefficient, Input);
SLKREIN_DEFINE_ERROR(UnknownPreset, Input);
SLKREIN_DEFINE_ERROR(RankDeficient, Input);
SLKREIN_DEFINE_ERROR(NotLagrangian, Input);
SLKREIN_DEFINE_ERROR(GridMismatch, Input);
SLKREIN_DEFINE_ERROR(WrongCoefficients, Input);

SLKREIN_DEFINE_ERROR(IntegratorFailure, Numeric);
SLKREIN_DEFINE_ERROR(DirichletEigenvalue, Numeric);
SLKREIN_DEFINE_ERROR(SpectralPoint, Numeric);
SLKREIN_DEFINE_ERROR(SingularS, Numeric);
SLKREIN_DEFINE_ERROR(WindowEdgeEigenvalue, Numeric);
SLKREIN_DEFINE_ERROR(NotStrictlyPositive, Numeric);
SLKREIN_DEFINE_ERROR(DegenerateN, Numeric);
SLKREIN_DEFINE_ERROR(PathThroughSpectrum, Numeric);
SLKREIN_DEFINE_ERROR(InsufficientEigs, Numeric);

SLKREIN_DEFINE_ERROR(GramMismatch, Property);
SLKREIN_DEFINE_ERROR(NonIntegerValue, Property);

#undef SLKREIN_DEFINE_ERROR

}  // namespace slkrein
