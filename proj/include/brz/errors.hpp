#pragma once

#include <stdexcept>
#include <string>

namespace brz {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter triple violates (I), (II) or D_c membership.
struct ConstraintViolation : Error {
    explicit ConstraintViolation(const std::string& msg) : Error(msg) {}
};

// Break parameter c = 1, or an operation that requires c in (0.5,2) got one outside.
struct UnsupportedBreak : Error {
    explicit UnsupportedBreak(const std::string& msg) : Error(msg) {}
};

// A Moebius denominator vanishes inside the declared evaluation interval.
struct PoleOnDomain : Error {
    explicit PoleOnDomain(const std::string& msg) : Error(msg) {}
};

// Height iteration exceeded the cap without crossing zero or finding a fixed point.
struct HeightCapExceeded : Error {
    explicit HeightCapExceeded(const std::string& msg, long cap_) : Error(msg), cap(cap_) {}
    long cap;
};

struct NotRenormalizable : Error {
    explicit NotRenormalizable(const std::string& msg) : Error(msg) {}
};

// Renormalized matrices fail the model-family proportionality tolerance
// (conditioning exhausted, e.g. extreme heights near a parabolic boundary).
struct FamilyDeviation : Error {
    explicit FamilyDeviation(const std::string& msg, double residual_)
        : Error(msg), residual(residual_) {}
    double residual;
};

// b' fell below threshold, the v' = (c'-a'-b')/b' extraction is singular.
struct DegenerateExtraction : Error {
    explicit DegenerateExtraction(const std::string& msg) : Error(msg) {}
};

// Involution image fails D_{1/c} membership.
struct DomainViolation : Error {
    explicit DomainViolation(const std::string& msg) : Error(msg) {}
};

// Transversal's rotation-number range excludes the requested word.
struct PrefixUnreachable : Error {
    explicit PrefixUnreachable(const std::string& msg) : Error(msg) {}
};

// Bisection bracket stopped shrinking before the prefix matched.
struct ToleranceStall : Error {
    explicit ToleranceStall(const std::string& msg) : Error(msg) {}
};

// Heights drifted away from the requested word during iteration.
struct CombinatoricsMismatch : Error {
    explicit CombinatoricsMismatch(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct NoIntersection : Error {
    explicit NoIntersection(const std::string& msg) : Error(msg) {}
};

// Eigenvalues complex or not straddling modulus one with the required margin.
struct NotHyperbolic : Error {
    explicit NotHyperbolic(const std::string& msg) : Error(msg) {}
};

// Stable and unstable directions became numerically parallel.
struct DegenerateAlignment : Error {
    explicit DegenerateAlignment(const std::string& msg) : Error(msg) {}
};

// Finite-difference cross-check of a propagated Jacobian exceeded tolerance.
struct IllConditioned : Error {
    explicit IllConditioned(const std::string& msg) : Error(msg) {}
};

struct IterateBudgetExceeded : Error {
    explicit IterateBudgetExceeded(const std::string& msg) : Error(msg) {}
};

} // namespace brz
