#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

/// Base class for all failures raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input domain violates a structural precondition (self-intersection,
/// touching boundaries, empty interior, ...).
class InvalidDomain : public Error {
public:
    using Error::Error;
};

/// A linear or nonlinear solve failed to converge or produced NaN.
class NumericsFailure : public Error {
public:
    using Error::Error;
};

/// Geometric quantity violated a sign/positivity requirement
/// (e.g. Hopf positivity of -d_n H^+ on the free boundary).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// lambda outside the asymptotic window the scaling formulas assume.
class OutOfAsymptoticRange : public Error {
public:
    using Error::Error;
};

/// Modulation f so large that 1 + d_eta f <= 0 somewhere.
class ModulationTooLarge : public Error {
public:
    using Error::Error;
};

/// alpha * R * log(R1/R2) == 2: the mode-0 matching system is singular.
class ResonantMode0 : public Error {
public:
    using Error::Error;
};

/// alpha coincides with a resonance value alpha_n.
class ResonantModeN : public Error {
public:
    using Error::Error;
};

/// alpha rejected by the admissibility gap test.
class ResonanceRejected : public Error {
public:
    using Error::Error;
};

/// Mode solve in the resonant band |omega - theta| <= eps needs a
/// compactly supported right hand side.
class RequiresCompactSupport : public Error {
public:
    using Error::Error;
};

/// Q calibration could not reach the invertibility floor, or a
/// projection matrix turned out singular after calibration.
class CalibrationFailed : public Error {
public:
    using Error::Error;
};

/// Cutoff supports would leave the Fermi chart of the free boundary.
class InnerRegionTooWide : public Error {
public:
    using Error::Error;
};

/// Damped Newton ran out of iterations or the line search stalled.
class NewtonFailed : public Error {
public:
    NewtonFailed(const std::string& msg, double last_residual, int iters)
        : Error(msg), last_residual(last_residual), iters(iters) {}
    double last_residual;
    int iters;
};

/// No root of the radial boundary system (lambda beyond the fold).
class NoSolution : public Error {
public:
    using Error::Error;
};

} // namespace liouville
