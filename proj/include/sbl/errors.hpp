#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sbl {

/// Base class for all toolkit errors. `name()` is a stable machine-readable
/// identifier (used verbatim in CLI error objects and exit diagnostics).
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define SBL_DEFINE_ERROR(ClassName)                                      \
    class ClassName : public Error {                                     \
    public:                                                              \
        explicit ClassName(const std::string& message)                   \
            : Error(#ClassName, message) {}                              \
    }

SBL_DEFINE_ERROR(DegenerateImmersion);
SBL_DEFINE_ERROR(OutOfDomain);
SBL_DEFINE_ERROR(NonConvergent);
SBL_DEFINE_ERROR(NotUnit);
SBL_DEFINE_ERROR(NonPositiveDenominator);
SBL_DEFINE_ERROR(TangentiallyDegenerate);
SBL_DEFINE_ERROR(BisectionFailure);
SBL_DEFINE_ERROR(BadParameter);
SBL_DEFINE_ERROR(DegenerateTriangle);
SBL_DEFINE_ERROR(SolverFailure);
SBL_DEFINE_ERROR(ParseError);
SBL_DEFINE_ERROR(NonTriangleFace);
SBL_DEFINE_ERROR(IoError);

#undef SBL_DEFINE_ERROR

} // namespace sbl
