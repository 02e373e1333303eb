#ifndef NCI_ALGEBRA_HPP
#define NCI_ALGEBRA_HPP

#include <memory>
#include <random>
#include <vector>

#include "nci/common.hpp"

namespace nci {

class FiniteAlgebra;
using AlgebraPtr = std::shared_ptr<const FiniteAlgebra>;

// Coefficient vector over the basis of a fixed parent algebra.
struct AlgebraElement {
    AlgebraPtr parent;
    VectorXcd coeffs;
};

struct LinearFunctional {
    AlgebraPtr parent;
    VectorXcd weights;
    bool is_trace = false;

    cplx operator()(const AlgebraElement& a) const;
};

// Associative algebra over C given by structure constants
//   e_i e_j = sum_k c[i][j][k] e_k.
// Immutable after construction; all elements refer back to their parent.
class FiniteAlgebra : public std::enable_shared_from_this<FiniteAlgebra> {
public:
    FiniteAlgebra(int dim, std::vector<std::string> labels,
                  std::vector<cplx> structure, bool has_unit, VectorXcd unit);

    int dim() const { return dim_; }
    bool has_unit() const { return has_unit_; }
    const VectorXcd& unit_coeffs() const { return unit_; }
    const std::vector<std::string>& labels() const { return labels_; }

    cplx c(int i, int j, int k) const { return c_[(i * dim_ + j) * dim_ + k]; }

    // left regular representation of basis element i: (L_i)_{kj} = c[i][j][k]
    const MatrixXcd& left_regular(int i) const { return left_[i]; }

    // product of coefficient vectors
    VectorXcd mul(const VectorXcd& a, const VectorXcd& b) const;

    double associativity_residual() const;
    double unit_residual() const;

    AlgebraElement element(VectorXcd v) const;
    AlgebraElement basis_element(int i) const;
    AlgebraElement unit() const;
    AlgebraElement zero() const;

private:
    int dim_;
    std::vector<std::string> labels_;
    std::vector<cplx> c_;
    bool has_unit_;
    VectorXcd unit_;
    std::vector<MatrixXcd> left_;
};

AlgebraPtr make_matrix_algebra(int n);
AlgebraPtr make_group_algebra(const std::vector<std::vector<int>>& mult_table);

// parses {"dim":n,"labels":[...],"c":[[[ [re,im], ...]]],"unit":[...]}
AlgebraPtr algebra_from_json(const std::string& text);
std::string algebra_to_json(const FiniteAlgebra& A);

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(cplx s, const AlgebraElement& a);
AlgebraElement invert(const AlgebraElement& a);

bool verify_trace(LinearFunctional& phi);

LinearFunctional matrix_trace_functional(const AlgebraPtr& A, int n);

// uniform [-1,1]^2 complex entries
AlgebraElement random_element(const AlgebraPtr& A, std::mt19937_64& rng);

} // namespace nci

#endif
