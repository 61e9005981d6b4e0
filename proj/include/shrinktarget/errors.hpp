#pragma once

#include <stdexcept>
#include <string>

namespace st {

// Base for every library error so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("DomainError: " + msg) {}
};

struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& msg) : Error("SingularMatrix: " + msg) {}
};

struct Unsupported : Error {
    explicit Unsupported(const std::string& msg) : Error("Unsupported: " + msg) {}
};

struct NoValidIndex : Error {
    explicit NoValidIndex(const std::string& msg) : Error("NoValidIndex: " + msg) {}
};

// Exact preimage enumeration would exceed the configured cap.
struct CapExceeded : Error {
    CapExceeded(const std::string& msg, const std::string& required)
        : Error("CapExceeded: " + msg + " (required " + required + ")") {}
};

struct RadiusTooLarge : Error {
    explicit RadiusTooLarge(const std::string& msg) : Error("RadiusTooLarge: " + msg) {}
};

struct TooFewCenters : Error {
    explicit TooFewCenters(const std::string& msg) : Error("TooFewCenters: " + msg) {}
};

struct RationalEigenvalue : Error {
    explicit RationalEigenvalue(const std::string& msg) : Error("RationalEigenvalue: " + msg) {}
};

struct NotIrrational : Error {
    explicit NotIrrational(const std::string& msg) : Error("NotIrrational: " + msg) {}
};

struct InsufficientMass : Error {
    explicit InsufficientMass(const std::string& msg) : Error("InsufficientMass: " + msg) {}
};

struct ConstructionFailed : Error {
    explicit ConstructionFailed(const std::string& msg) : Error("ConstructionFailed: " + msg) {}
};

struct ManifestError : Error {
    explicit ManifestError(const std::string& msg) : Error("ManifestError: " + msg) {}
};

} // namespace st
