#ifndef NCI_FORMS_HPP
#define NCI_FORMS_HPP

#include <functional>
#include <map>
#include <vector>

#include "nci/algebra.hpp"

namespace nci {

// One elementary form a0 d a1 ... d an over A, stored as slot vectors.
// slot0 lives in the unitization A+ (index dim = adjoined unit), the
// remaining slots in A.  Degree 0 terms use only the A part of slot0.
struct FormTerm {
    VectorXcd slot0;              // length dim+1
    std::vector<VectorXcd> slots; // each length dim
    int degree() const { return (int)slots.size(); }
};

// Chain of noncommutative differential forms, graded by degree and
// truncated above top_degree.  Components are kept as sums of
// elementary terms; norms and inner products go through Gram matrices
// so no dense dim^n expansion is ever required.
class NCForm {
public:
    NCForm(AlgebraPtr parent, int top_degree);

    const AlgebraPtr& parent() const { return parent_; }
    int top_degree() const { return top_; }
    bool truncation_loss() const { return truncation_loss_; }
    void flag_truncation() { truncation_loss_ = true; }

    const std::vector<FormTerm>& terms(int degree) const;
    bool degree_empty(int degree) const;
    std::vector<int> active_degrees() const;

    void add_term(FormTerm t);          // degree read off the term
    void add(const NCForm& other, cplx coeff = 1.0);

    // drops terms with a numerically zero slot
    void prune(double eps = 0.0);

    static NCForm zero_like(const NCForm& x) {
        return NCForm(x.parent(), x.top_degree());
    }

private:
    AlgebraPtr parent_;
    int top_;
    bool truncation_loss_ = false;
    std::map<int, std::vector<FormTerm>> comp_;
};

// elementary constructors
NCForm form_from_element(const AlgebraElement& a, int top_degree);
FormTerm term_from_elements(const std::vector<AlgebraElement>& a0_to_an,
                            bool leading_unit = false);

// operators of the (b,B,d) calculus
NCForm d(const NCForm& x);
NCForm hochschild_b(const NCForm& x);
NCForm connes_B(const NCForm& x);
NCForm b_plus_B(const NCForm& x);

// graded product on Omega A (Leibniz normalization of interior 0-forms)
NCForm mul(const NCForm& x, const NCForm& y);

// Chern chains
NCForm chern_idempotent(const AlgebraElement& e, int top_degree);
NCForm chern_invertible(const AlgebraElement& u, int top_degree);

// canonical projection onto the normalized mixed complex: slots 1..n are
// projected onto the complement of the algebra unit.  Forms with a unit
// slot span the degenerate subcomplex; every cocycle shipped here kills
// it ([F,1] = [D,1] = 0, d1 = 0 after projection), so pairings are
// unchanged.  The odd Chern chain is a (b+B)-cycle modulo degenerates.
NCForm normalized_projection(const NCForm& x);

// exact norms through Gram matrices (extended-precision accumulation)
double component_norm(const NCForm& x, int degree);
double total_norm(const NCForm& x);
cplx component_inner(const NCForm& x, const NCForm& y, int degree);
// exact l2 norm through per-position orthonormal bases; cheap when slot
// vectors span small subspaces (Chern chains and their boundaries)
double reduced_component_norm(const NCForm& x, int degree);

// dense expansion of one component, shape (dim+1) x dim^degree flattened
// (degree 0: length dim); guarded by an entry-count cap
VectorXcd dense_component(const NCForm& x, int degree, size_t cap = 1u << 24);

// identity-residual measure: exact coordinatewise max for components small
// enough to expand densely, and the maximum over `probes` random unit
// product-functionals for the rest (documented separating statistic)
double residual_maxabs(const NCForm& x, int probes, std::mt19937_64& rng,
                       size_t dense_cap = 1u << 16);

// cochains
struct CochainOnForms {
    std::function<cplx(const FormTerm&)> evaluator; // per elementary term
    std::vector<int> supported_degrees;
    int parity = 0; // 0 even, 1 odd
    bool strict = false;

    cplx operator()(const NCForm& x) const;
};

cplx pair(const CochainOnForms& phi, const NCForm& x);

// numerical homology of the truncated (b+B)-complex (dense; small algebras)
struct HomologyRanks {
    int even = 0;
    int odd = 0;
};
HomologyRanks bB_homology_ranks(const AlgebraPtr& A, int N,
                                double cutoff = Tol::rank_cutoff);

// random separable form with one term in each degree <= top
NCForm random_form(const AlgebraPtr& A, int top_degree, std::mt19937_64& rng);
// random homogeneous separable term of the given degree
NCForm random_homogeneous_form(const AlgebraPtr& A, int degree, int top_degree,
                               std::mt19937_64& rng);

std::string form_to_json(const NCForm& x);
NCForm form_from_json(const AlgebraPtr& A, const std::string& text);

} // namespace nci

#endif
