#ifndef NLSE_TYPES_HPP
#define NLSE_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace nlse {

using cdouble = std::complex<double>;

inline constexpr cdouble I{0.0, 1.0};

/// Invalid or inconsistent input parameters / configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed (divergence, instability, pole, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergence : public NumericalError {
public:
    explicit NonConvergence(const std::string& what) : NumericalError(what) {}
};

/// Root polishing landed on a trivial solution (zero wavefunction).
class ConvergedToTrivial : public NumericalError {
public:
    explicit ConvergedToTrivial(const std::string& what) : NumericalError(what) {}
};

/// Continuation step jumped off the tracked branch.
class BranchJump : public NumericalError {
public:
    explicit BranchJump(const std::string& what) : NumericalError(what) {}
};

/// Evaluation point sits on (or numerically too close to) an antiresonance.
class AntiresonanceError : public NumericalError {
public:
    explicit AntiresonanceError(const std::string& what) : NumericalError(what) {}
};

inline double sqr(double x) { return x * x; }
inline double abs2(cdouble z) { return std::norm(z); }

} // namespace nlse

#endif
