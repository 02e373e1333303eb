#ifndef NCI_FREDHOLM_HPP
#define NCI_FREDHOLM_HPP

#include "nci/circle.hpp"
#include "nci/forms.hpp"

namespace nci {

enum class Parity { Even, Odd };

// epsilon-component normalization of the odd supertrace, pinned so that
// the winding-one Toeplitz pairing equals +1 (see docs/constants)
inline const cplx kOddTrace = cplx(-1.0, -1.0); // -(1+i) = -sqrt(2i)

// Bounded p-summable module (H, rho, F) over a finite source algebra.
// Even case carries a diagonal grading; odd case follows the Clifford
// convention with the epsilon component extracted through kOddTrace.
struct FredholmModule {
    AlgebraPtr source;
    int h_dim = 0;
    Parity parity = Parity::Even;
    int p = 1;
    VectorXd grading;            // diagonal +-1, even case only
    std::vector<MatrixXcd> rho;  // one matrix per source basis element
    MatrixXcd F;

    MatrixXcd rep_plus(const VectorXcd& plus_coeffs) const; // over A+
    MatrixXcd rep(const VectorXcd& coeffs) const;

    double involution_residual() const;   // |F^2 - 1|
    double homomorphism_residual() const; // rho on basis products
    double grading_residual() const;      // F odd, rho even (even case)

    cplx supertrace(const MatrixXcd& x) const;
};

FredholmModule module_from_json(const AlgebraPtr& A, const std::string& text);
std::string module_to_json(const FredholmModule& m);

// dense test module: copies of the defining representation of M_k
// conjugated by a random invertible, with a random symmetry F
FredholmModule random_dense_module(const AlgebraPtr& A, int copies,
                                   Parity parity, std::mt19937_64& rng);

// ---------------------------------------------------------------------
// X-complex of a finite target algebra R: R <-> Omega^1 R_natural.
// Values and the two boundary maps; the quotient projector for
// Omega^1 R / b(Omega^2 R) is precomputed from structure constants.
class XComplexOps {
public:
    explicit XComplexOps(AlgebraPtr target);
    const AlgebraPtr& target() const { return target_; }
    Eigen::Index omega1_len() const { return P_.rows(); }

    VectorXcd project(const VectorXcd& omega1) const; // onto the quotient
    VectorXcd natural_d(const VectorXcd& r) const;    // R -> Omega1_nat
    VectorXcd bbar(const VectorXcd& omega1) const;    // Omega1_nat -> R

private:
    AlgebraPtr target_;
    MatrixXcd P_; // orthogonal projector on flattened (dimR+1) x dimR
};

struct XValue {
    AlgebraPtr target;
    VectorXcd even; // R coefficients
    VectorXcd odd;  // flattened Omega^1 R, natural-projected

    double norm() const { return std::sqrt(even.squaredNorm() + odd.squaredNorm()); }
};

// ---------------------------------------------------------------------
// word-level cocycle evaluators shared by all backends; slots are the
// represented operators of a0 d a1 ... d an
cplx chi0_word(int n, const FredholmModule& m,
               const std::vector<MatrixXcd>& slots);
cplx eta0_word(int n, const FredholmModule& m,
               const std::vector<MatrixXcd>& slots); // degree n+1 input
cplx chi1_word_scalar(int n, const FredholmModule& m,
                      const std::vector<MatrixXcd>& slots); // zero target C

// cochain evaluation on forms over the source algebra (target C)
cplx chi_scalar(int n, const FredholmModule& m, const NCForm& x);
cplx eta_scalar(int n_plus_1, const FredholmModule& m, const NCForm& x);

// Spec-facing evaluations returning X-complex values (target C here;
// the bivariant generalization lives in chi_bivariant below).
XValue chi_even(int n, const FredholmModule& m, const NCForm& x);
XValue eta(int n_plus_1, const FredholmModule& m, const NCForm& x);

// max residual of chi^n - chi^{n+2} = [d, eta^{n+1}] on random forms
double transgression_check(int n, const FredholmModule& m, int trials,
                           uint64_t seed);
// max residual of the cocycle identity chi o (b+B) = 0 (target C)
double cocycle_check(int n, const FredholmModule& m, int trials,
                     uint64_t seed);

enum class KClassKind { Idempotent, Invertible };
cplx index_pairing(const FredholmModule& m, const AlgebraElement& k_class,
                   KClassKind kind);

// ---------------------------------------------------------------------
// circle (Toeplitz) model: F = sign(D) on Fourier modes [-M, M]
struct ToeplitzModel {
    int M;
    MatrixXcd F;
    FredholmModule as_module() const; // odd, source unused (empty algebra)
};
ToeplitzModel toeplitz_model(int M);

// realize a Laurent form term as window operator slots
std::vector<MatrixXcd> window_slots(const LaurentTerm& t, int M);

// chi^n paired with the winding-k Chern chain; exact for M large enough
cplx toeplitz_chi_pairing(int k, int n, int M);

// independent ground truth: kernel counts of the compressed operator
int toeplitz_index_oracle(int k, int M);
// generic banded-Hardy oracle: index = null(T) - null(T*)
int hardy_kernel_index(const MatrixXcd& T_rect_domain_cols,
                       const MatrixXcd& Tstar_rect_domain_cols,
                       double cutoff = Tol::rank_cutoff);

// block sums respect addition (used for the even rank-r example)
int shift_block_index_oracle(int rank, int M, int shift = 1);

// summability diagnostics: partial sums of s_i([F, rho(a)])^p
std::vector<double> commutator_schatten_sums(const FredholmModule& m,
                                             const MatrixXcd& a, double p);

// ---------------------------------------------------------------------
// bivariant path: module with operator entries in a finite target algebra
struct BivariantModule {
    AlgebraPtr source;
    AlgebraPtr target;
    int h_dim = 0;
    Parity parity = Parity::Even;
    int p = 1;
    VectorXd grading;
    MatrixXcd F; // scalar (G x 1 form)
    // rho[i]: h x h matrix of target-algebra-plus coefficient vectors,
    // flattened as h_dim*h_dim blocks of length dimR+1
    std::vector<std::vector<VectorXcd>> rho;
};

XValue chi_bivariant(int n, const BivariantModule& m, const XComplexOps& xc,
                     const NCForm& x);
XValue eta_bivariant(int n_plus_1, const BivariantModule& m,
                     const XComplexOps& xc, const NCForm& x);
double transgression_check_bivariant(int n, const BivariantModule& m,
                                     const XComplexOps& xc, int trials,
                                     uint64_t seed);

} // namespace nci

#endif
