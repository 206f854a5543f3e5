#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace roa {

// Exponent vector of a single monomial. The length equals the ambient state
// dimension it was created for; mixing lengths is an error.
struct Monomial {
    std::vector<std::uint8_t> exponents;

    Monomial() = default;
    explicit Monomial(int n) : exponents(static_cast<std::size_t>(n), 0) {}
    Monomial(std::initializer_list<std::uint8_t> e) : exponents(e) {}

    int dimension() const { return static_cast<int>(exponents.size()); }
    int degree() const {
        int d = 0;
        for (auto e : exponents) d += e;
        return d;
    }
    bool is_constant() const { return degree() == 0; }

    Monomial times(const Monomial& other) const;

    bool operator==(const Monomial& other) const { return exponents == other.exponents; }
};

// Graded-lexicographic order: lower total degree first, then lexicographic
// on the exponent vector. Used everywhere so bases and compiled problems
// are reproducible.
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.exponents > b.exponents;  // x1^d before x2^d
    }
};

// Sparse multivariate polynomial with real coefficients. Terms below
// kPruneThreshold are dropped after every operation; an empty term map is
// the zero polynomial.
class Polynomial {
public:
    static constexpr double kPruneThreshold = 1e-12;

    Polynomial() : dim_(0) {}
    explicit Polynomial(int dimension) : dim_(dimension) {}

    static Polynomial zero(int dimension) { return Polynomial(dimension); }
    static Polynomial constant(int dimension, double value);
    // x_index as a polynomial (0-based index)
    static Polynomial variable(int dimension, int index);

    int dimension() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;
    std::size_t term_count() const { return terms_.size(); }

    const std::map<Monomial, double, GradedLexLess>& terms() const { return terms_; }

    double coefficient(const Monomial& m) const;
    void add_term(const Monomial& m, double coeff);
    void set_term(const Monomial& m, double coeff);

    Polynomial operator+(const Polynomial& q) const;
    Polynomial operator-(const Polynomial& q) const;
    Polynomial operator*(const Polynomial& q) const;
    Polynomial operator*(double s) const;
    Polynomial operator-() const { return *this * -1.0; }
    Polynomial& operator+=(const Polynomial& q);
    Polynomial& operator-=(const Polynomial& q);

    // partial derivative with respect to variable `index`
    Polynomial derivative(int index) const;

    double evaluate(const std::vector<double>& x) const;

    // substitutes x_j = 0 for every variable j not in `keep_vars`
    Polynomial zero_outside(const std::vector<int>& keep_vars) const;

    // true if every term uses only variables from `vars`
    bool supported_on(const std::vector<int>& vars) const;

    std::vector<int> support_variables() const;

    void prune();

    std::string to_string() const;

private:
    int dim_;
    std::map<Monomial, double, GradedLexLess> terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

// Node subset V_p of a network with N nodes, each carrying node_dim scalar
// states. Holds the sorted node indices (0-based) and exposes the flat state
// variable indices that belong to the subset.
struct Subset {
    std::vector<int> nodes;  // sorted, distinct, in [0, N)
    int total_nodes = 0;     // N
    int node_dim = 1;        // m

    Subset() = default;
    Subset(std::vector<int> nodes_in, int N, int m);

    int cardinality() const { return static_cast<int>(nodes.size()); }
    bool contains(int node) const;
    // flat state-variable indices covered by the subset
    std::vector<int> variables() const;
    static Subset all(int N, int m);
    std::string label() const;  // e.g. "{1,6}" in 1-based node ids
};

// V' = sum_j dV/dx_j * field_j
Polynomial lie_derivative(const Polynomial& V, const std::vector<Polynomial>& field);

// substitutes x_j = 0 for every scalar variable outside `keep`;
// equals p composed with the diagonal projection onto the subset subspace
Polynomial project(const Polynomial& p, const Subset& keep);

// R_p = V_c - V_p(P_p x); V_p must depend only on variables of `keep`
Polynomial residual(const Polynomial& V_c, const Polynomial& V_p, const Subset& keep);

// All monomials over the given variable indices with total degree contained
// in `degrees`, in graded-lex order. `dimension` is the ambient dimension.
std::vector<Monomial> monomial_basis(int dimension, const std::vector<int>& vars,
                                     const std::vector<int>& degrees);

}  // namespace roa
