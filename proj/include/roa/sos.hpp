#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/polynomial.hpp"
#include "roa/sdp.hpp"

namespace roa {

struct SosCompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SOS-constrained polynomial unknown, parameterized by its Gram matrix over
// an explicit monomial basis.
struct GramVar {
    std::string name;
    std::vector<Monomial> basis;
};

// Polynomial unknown with unconstrained coefficients over an explicit
// support (equality-ideal multipliers).
struct FreePolyVar {
    std::string name;
    std::vector<Monomial> support;
};

struct ScalarVar {
    std::string name;
    bool nonneg = false;
};

// One additive term of a constraint: `fixed` times an optional unknown.
struct SosTerm {
    enum class Factor { None, Scalar, Gram, FreePoly };
    Polynomial fixed;
    Factor factor = Factor::None;
    std::string ref;
};

// sum of terms must be SOS, witnessed by a slack Gram over `slack_basis`.
struct SosConstraint {
    std::string name;
    std::vector<SosTerm> terms;
    std::vector<Monomial> slack_basis;
};

// linear relation over scalar unknowns
struct ScalarRelation {
    enum class Kind { Eq, Ge };
    std::vector<std::pair<std::string, double>> lhs;
    Kind kind = Kind::Eq;
    double rhs = 0.0;
};

// Identities must be affine in the unknowns: every term multiplies a fixed
// polynomial by at most one unknown. Bilinear couplings are the caller's
// responsibility to eliminate by fixing one factor.
struct SosProgram {
    int dimension = 0;
    std::vector<GramVar> grams;
    std::vector<FreePolyVar> free_polys;
    std::vector<ScalarVar> scalars;
    std::vector<SosConstraint> constraints;
    std::vector<ScalarRelation> relations;
    std::vector<std::pair<std::string, double>> objective;  // minimized

    GramVar& add_gram(const std::string& name, std::vector<Monomial> basis);
    FreePolyVar& add_free_poly(const std::string& name, std::vector<Monomial> support);
    ScalarVar& add_scalar(const std::string& name, bool nonneg);
    SosConstraint& add_constraint(const std::string& name, std::vector<Monomial> slack_basis);
};

struct SosIndexMap {
    std::map<std::string, int> gram_block;           // GramVar name -> block
    std::map<std::string, int> slack_block;          // constraint name -> block
    std::map<std::string, int> scalar_block;         // scalar name -> block
    std::map<std::string, int> scalar_offset;        // scalar name -> entry
    std::map<std::string, int> free_poly_block;      // FreePolyVar -> block
    std::map<std::string, int> free_poly_offset;     // first coefficient entry
};

struct CompiledSos {
    SdpProblem problem;
    SosIndexMap map;
};

// One equality row per matched monomial; PSD blocks for every Gram (slack or
// named); free/nonneg scalar blocks. Throws SosCompileError naming any
// monomial outside the representable span.
CompiledSos compile(const SosProgram& prog);

struct SosExtraction {
    std::map<std::string, Polynomial> gram_polys;
    std::map<std::string, DenseMatrix> gram_matrices;
    std::map<std::string, Polynomial> free_polys;
    std::map<std::string, double> scalars;
    double max_identity_residual = 0.0;
    bool residual_ok = true;
};

// Reconstructs every unknown from the solution and re-checks each identity
// coefficient-wise (flagging residuals above 1e-6).
SosExtraction extract(const SosProgram& prog, const CompiledSos& compiled, const SdpSolution& sol);

// Monomials of degree <= ceil(D/2) over the given variables, excluding the
// constant when the target must vanish at the origin.
std::vector<Monomial> gram_basis(int dimension, const std::vector<int>& vars, int D,
                                 bool vanish_at_origin = true);

// Appends free multipliers mu_c of degree <= mult_degree for each equality,
// turning "target in Sigma" into "target + sum mu_c h_c in Sigma".
void quotient_terms(SosProgram& prog, const std::string& constraint_name,
                    const std::vector<Polynomial>& equalities, int mult_degree);

// b(x)^T G b(x) with the one-triangle convention
Polynomial gram_polynomial(const std::vector<Monomial>& basis, const DenseMatrix& G);

// Clips negative eigenvalues above `floor` to zero; throws if any eigenvalue
// is below floor (a genuinely indefinite Gram).
DenseMatrix clip_psd(const DenseMatrix& G, double floor);

// Validates a dual improving ray returned for an infeasible SOS program:
// b^T y > 0 and -sum_k y_k A_k in the dual cone (PSD blocks checked to tol).
bool check_infeasibility_certificate(const SdpProblem& prob, const std::vector<double>& ray,
                                     double tol = 1e-6);

}  // namespace roa
