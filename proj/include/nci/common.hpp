#ifndef NCI_COMMON_HPP
#define NCI_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>

namespace nci {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Central tolerance table. Values are fixed by the operation contracts;
// keeping them in one place makes the acceptance thresholds auditable.
struct Tol {
    static constexpr double associativity   = 1e-12;
    static constexpr double unit            = 1e-12;
    static constexpr double trace           = 1e-10;
    static constexpr double inverse         = 1e-10;
    static constexpr double inverse_fail    = 1e-8;
    static constexpr double idempotent      = 1e-10;
    static constexpr double homomorphism    = 1e-10;
    static constexpr double involution      = 1e-12;
    static constexpr double chern_cycle     = 1e-10;
    static constexpr double operator_ids    = 1e-12;
    static constexpr double transgression   = 1e-10;
    static constexpr double rank_cutoff     = 1e-9;
    static constexpr double jlo_spread      = 1e-6;
    static constexpr double cross_method    = 1e-6;
    static constexpr double residue_match   = 1e-9;
    static constexpr double zeta_eval       = 1e-10;
    static constexpr double anomaly_integer = 1e-4;
    static constexpr double anomaly_paths   = 1e-5;
    static constexpr double trace_property  = 1e-8;
    static constexpr double todd_residual   = 1e-6;
    static constexpr double quad_oracle     = 1e-4;
    static constexpr double jet_closed_form = 1e-12;
    static constexpr double chart_invariance = 1e-10;
    static constexpr double refit_residual  = 1e-8;
};

struct Error : std::runtime_error {
    explicit Error(const std::string& m) : std::runtime_error(m) {}
};

#define NCI_DEFINE_ERROR(NAME)                                   \
    struct NAME : Error {                                        \
        explicit NAME(const std::string& m = #NAME) : Error(m) {} \
    }

NCI_DEFINE_ERROR(ParentMismatch);
NCI_DEFINE_ERROR(Singular);
NCI_DEFINE_ERROR(NotAGroup);
NCI_DEFINE_ERROR(NotIdempotent);
NCI_DEFINE_ERROR(ParityMismatch);
NCI_DEFINE_ERROR(SummabilityViolation);
NCI_DEFINE_ERROR(DegreeUnsupported);
NCI_DEFINE_ERROR(IllConditioned);
NCI_DEFINE_ERROR(BackendUnsupported);
NCI_DEFINE_ERROR(DerivativeCapExceeded);
NCI_DEFINE_ERROR(ZeroMode);
NCI_DEFINE_ERROR(NonSummable);
NCI_DEFINE_ERROR(PathMissing);
NCI_DEFINE_ERROR(RootConditioning);
NCI_DEFINE_ERROR(OrderMismatch);
NCI_DEFINE_ERROR(SupportViolation);
NCI_DEFINE_ERROR(QuadratureNonConvergence);
NCI_DEFINE_ERROR(UnsupportedFixedManifold);
NCI_DEFINE_ERROR(ConfigInvalid);
NCI_DEFINE_ERROR(SchemaMismatch);
NCI_DEFINE_ERROR(TruncationLoss);

#undef NCI_DEFINE_ERROR

inline double sq(double x) { return x * x; }

} // namespace nci

#endif
