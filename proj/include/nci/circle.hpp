#ifndef NCI_CIRCLE_HPP
#define NCI_CIRCLE_HPP

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "nci/common.hpp"

namespace nci {

// ---------------------------------------------------------------------
// special functions (Euler-Maclaurin; accurate for |s| <~ 25)
double zeta_hurwitz(double s, double a);   // sum_{k>=0} (k+a)^{-s}, s != 1
double digamma(double a);                  // finite part of zeta_H at s = 1

// ---------------------------------------------------------------------
// Laurent polynomials on the circle, z = e^{i theta}
struct LaurentPoly {
    std::map<int, cplx> coeff;

    static LaurentPoly mode(int m, cplx c = 1.0);
    static LaurentPoly constant(cplx c);
    bool is_zero(double eps = 0.0) const;
    int degree() const; // max |m| with nonzero coefficient
    cplx mean() const;  // coefficient of z^0
    LaurentPoly conj() const;
};

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator*(cplx s, const LaurentPoly& a);

// multiplication operator on Fourier modes [-M, M]
MatrixXcd window_matrix(const LaurentPoly& a, int M);

// ---------------------------------------------------------------------
// noncommutative forms with trigonometric-polynomial entries; same term
// layout as nci::FormTerm but over the (infinite-dimensional) circle
// algebra, kept exact through Laurent arithmetic
struct LaurentTerm {
    cplx unit0 = 0.0;   // adjoined-unit part of slot 0
    LaurentPoly s0;     // algebra part of slot 0
    std::vector<LaurentPoly> slots;
    int degree() const { return (int)slots.size(); }
};

struct LaurentForm {
    std::vector<LaurentTerm> terms; // mixed degrees allowed
};

LaurentForm lf_d(const LaurentForm& x);
LaurentForm lf_b(const LaurentForm& x);
LaurentForm lf_B(const LaurentForm& x);
LaurentForm lf_mul(const LaurentForm& x, const LaurentForm& y);
void lf_add(LaurentForm& x, const LaurentForm& y, cplx coeff = 1.0);
LaurentForm lf_filter_degree(const LaurentForm& x, int degree);
LaurentPoly random_trig(int deg, std::mt19937_64& rng);

// odd Chern chain of the unitary z^k, degrees 1, 3, ..., <= top_degree,
// same coefficient convention as chern_invertible
LaurentForm chern_winding(int k, int top_degree);

// ---------------------------------------------------------------------
// Exact circle operators: banded in the Fourier basis, diagonals carry
// polynomials in the column mode index valid away from a finite
// exceptional block.  entry(r, c) nonzero only for |r - c| <= band.
class CircleOperator {
public:
    CircleOperator() = default;

    static CircleOperator from_symbol(const LaurentPoly& a);
    static CircleOperator dirac();       // diag(k), k = 0 mode shifted to 1/2
    static CircleOperator abs_dirac();   // diag |k|, same shift
    static CircleOperator sign_dirac();  // diag sign(k), sign(0) = +1
    static CircleOperator identity();

    int band() const { return band_; }
    int core() const { return core_; } // polynomial form valid for |c| > core
    bool is_zero(double eps = 1e-300) const;

    cplx entry(long r, long c) const;

    // polynomial (in the column index) of diagonal r - c = d on the given
    // side; empty when out of band
    const std::vector<cplx>& pos_poly(int d) const;
    const std::vector<cplx>& neg_poly(int d) const;

    friend CircleOperator operator*(const CircleOperator& x,
                                    const CircleOperator& y);
    friend CircleOperator operator+(const CircleOperator& x,
                                    const CircleOperator& y);
    friend CircleOperator operator*(cplx s, const CircleOperator& x);

    CircleOperator dirac_commutator() const;     // [D, x]
    CircleOperator laplace_commutator() const;   // [D^2, x]

    MatrixXcd window(int M) const;

private:
    int band_ = 0;
    int core_ = 0;
    // index d + band_, each a coefficient vector in the column index
    std::vector<std::vector<cplx>> pos_, neg_;
    std::map<std::pair<long, long>, cplx> exceptional_;
    void rebuild_exceptional(const CircleOperator& x, const CircleOperator& y);
    static const std::vector<cplx> empty_poly_;
};

// ---------------------------------------------------------------------
// Tr(X |D|^{-s}) as an exact sum of Hurwitz zeta terms plus an entire
// finite part; s may be shifted linearly, s = scale*z + offset
struct HurwitzTerm {
    cplx coeff;
    int power;    // contributes coeff * zeta_H(s - power, shift)
    double shift; // integer >= 1 in practice
};
struct EntireTerm {
    cplx coeff;
    double lambda; // contributes coeff * lambda^{-s}
};

class ZetaTrace {
public:
    std::vector<HurwitzTerm> hurwitz;
    std::vector<EntireTerm> entire;

    cplx eval(double s) const; // s away from poles
    // poles in s are at s = power + 1; residue there
    std::vector<double> pole_locations() const;
    cplx residue_at(double s0) const;
    // Laurent data of s -> Z(scale*z + offset) at z = 0
    struct Laurent {
        cplx res;  // coefficient of 1/z
        cplx fin;  // constant term
    };
    Laurent laurent_at_zero(double scale, double offset) const;
};

// exact symbolic trace against |D|^{-s}
ZetaTrace zeta_trace_of(const CircleOperator& X);

// brute-force oracle: direct eigen-sum over modes |k| <= kmax
cplx zeta_trace_direct(const CircleOperator& X, double s, long kmax);

} // namespace nci

#endif
