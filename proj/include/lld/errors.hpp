#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lld {

/// Base of every error raised by the library. `module()` names the component
/// that failed; the CLI maps it into its exit-code payload.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

#define LLD_DECLARE_ERROR(Name, Module)                                   \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(Module, what) {}   \
    }

LLD_DECLARE_ERROR(ConfigError, "model");
LLD_DECLARE_ERROR(ContractViolation, "core");
LLD_DECLARE_ERROR(RefineRequest, "fem");
LLD_DECLARE_ERROR(AssemblyError, "fem");
LLD_DECLARE_ERROR(SingularOperator, "elliptic");
LLD_DECLARE_ERROR(PreconditionViolation, "elliptic");
LLD_DECLARE_ERROR(NumericalFailure, "numerics");
LLD_DECLARE_ERROR(AmbiguityError, "spectral");
LLD_DECLARE_ERROR(CutSelectionError, "spectral");
LLD_DECLARE_ERROR(HyperbolicityFailure, "equilibria");
LLD_DECLARE_ERROR(UniquenessViolation, "equilibria");
LLD_DECLARE_ERROR(StiffnessError, "semigroup");
LLD_DECLARE_ERROR(BoxEscape, "manifold");
LLD_DECLARE_ERROR(NoContraction, "manifold");
LLD_DECLARE_ERROR(AlignmentError, "manifold");
LLD_DECLARE_ERROR(DynamicsAnomaly, "attractor");
LLD_DECLARE_ERROR(StructuralChange, "attractor");
LLD_DECLARE_ERROR(FitRejected, "ratefit");

#undef LLD_DECLARE_ERROR

/// Newton failed; the last iterate is kept for diagnosis.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, Eigen::VectorXd last_iterate)
        : Error("equilibria", what), last_(std::move(last_iterate)) {}

    const Eigen::VectorXd& last_iterate() const noexcept { return last_; }

private:
    Eigen::VectorXd last_;
};

}  // namespace lld
