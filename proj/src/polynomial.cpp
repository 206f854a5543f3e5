#include "roa/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace roa {

Monomial Monomial::times(const Monomial& other) const {
    if (exponents.size() != other.exponents.size())
        throw std::invalid_argument("monomial dimension mismatch");
    Monomial r = *this;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        r.exponents[i] = static_cast<std::uint8_t>(r.exponents[i] + other.exponents[i]);
    return r;
}

Polynomial Polynomial::constant(int dimension, double value) {
    Polynomial p(dimension);
    p.add_term(Monomial(dimension), value);
    return p;
}

Polynomial Polynomial::variable(int dimension, int index) {
    if (index < 0 || index >= dimension) throw std::invalid_argument("variable index out of range");
    Polynomial p(dimension);
    Monomial m(dimension);
    m.exponents[static_cast<std::size_t>(index)] = 1;
    p.add_term(m, 1.0);
    return p;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

double Polynomial::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double coeff) {
    if (m.dimension() != dim_) throw std::invalid_argument("monomial/polynomial dimension mismatch");
    double& slot = terms_[m];
    slot += coeff;
    if (std::abs(slot) < kPruneThreshold) terms_.erase(m);
}

void Polynomial::set_term(const Monomial& m, double coeff) {
    if (m.dimension() != dim_) throw std::invalid_argument("monomial/polynomial dimension mismatch");
    if (std::abs(coeff) < kPruneThreshold)
        terms_.erase(m);
    else
        terms_[m] = coeff;
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
    Polynomial r = *this;
    r += q;
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& q) const {
    Polynomial r = *this;
    r -= q;
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
    if (dim_ == 0 && terms_.empty()) dim_ = q.dim_;
    if (q.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
    for (const auto& [m, c] : q.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
    if (dim_ == 0 && terms_.empty()) dim_ = q.dim_;
    if (q.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
    for (const auto& [m, c] : q.terms_) add_term(m, -c);
    return *this;
}

Polynomial Polynomial::operator*(const Polynomial& q) const {
    if (q.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
    Polynomial r(dim_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : q.terms_) r.add_term(ma.times(mb), ca * cb);
    return r;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial r(dim_);
    for (const auto& [m, c] : terms_) r.add_term(m, c * s);
    return r;
}

Polynomial Polynomial::derivative(int index) const {
    if (index < 0 || index >= dim_) throw std::invalid_argument("derivative index out of range");
    Polynomial r(dim_);
    for (const auto& [m, c] : terms_) {
        const int e = m.exponents[static_cast<std::size_t>(index)];
        if (e == 0) continue;
        Monomial d = m;
        d.exponents[static_cast<std::size_t>(index)] = static_cast<std::uint8_t>(e - 1);
        r.add_term(d, c * e);
    }
    return r;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("evaluation point dimension mismatch");
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c;
        for (int i = 0; i < dim_; ++i) {
            const int e = m.exponents[static_cast<std::size_t>(i)];
            for (int k = 0; k < e; ++k) t *= x[static_cast<std::size_t>(i)];
        }
        total += t;
    }
    return total;
}

Polynomial Polynomial::zero_outside(const std::vector<int>& keep_vars) const {
    std::vector<char> keep(static_cast<std::size_t>(dim_), 0);
    for (int v : keep_vars) {
        if (v < 0 || v >= dim_) throw std::invalid_argument("keep variable out of range");
        keep[static_cast<std::size_t>(v)] = 1;
    }
    Polynomial r(dim_);
    for (const auto& [m, c] : terms_) {
        bool survives = true;
        for (int i = 0; i < dim_ && survives; ++i)
            if (m.exponents[static_cast<std::size_t>(i)] > 0 && !keep[static_cast<std::size_t>(i)])
                survives = false;
        if (survives) r.add_term(m, c);
    }
    return r;
}

bool Polynomial::supported_on(const std::vector<int>& vars) const {
    std::vector<char> ok(static_cast<std::size_t>(dim_), 0);
    for (int v : vars) ok[static_cast<std::size_t>(v)] = 1;
    for (const auto& [m, c] : terms_)
        for (int i = 0; i < dim_; ++i)
            if (m.exponents[static_cast<std::size_t>(i)] > 0 && !ok[static_cast<std::size_t>(i)]) return false;
    return true;
}

std::vector<int> Polynomial::support_variables() const {
    std::vector<char> used(static_cast<std::size_t>(dim_), 0);
    for (const auto& [m, c] : terms_)
        for (int i = 0; i < dim_; ++i)
            if (m.exponents[static_cast<std::size_t>(i)] > 0) used[static_cast<std::size_t>(i)] = 1;
    std::vector<int> vars;
    for (int i = 0; i < dim_; ++i)
        if (used[static_cast<std::size_t>(i)]) vars.push_back(i);
    return vars;
}

void Polynomial::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < kPruneThreshold)
            it = terms_.erase(it);
        else
            ++it;
    }
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", c);
        if (!out.empty()) out += " + ";
        out += buf;
        for (int i = 0; i < dim_; ++i) {
            const int e = m.exponents[static_cast<std::size_t>(i)];
            if (e == 0) continue;
            out += "*x" + std::to_string(i + 1);
            if (e > 1) out += "^" + std::to_string(e);
        }
    }
    return out;
}

Subset::Subset(std::vector<int> nodes_in, int N, int m)
    : nodes(std::move(nodes_in)), total_nodes(N), node_dim(m) {
    std::sort(nodes.begin(), nodes.end());
    if (nodes.empty()) throw std::invalid_argument("subset must be non-empty");
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw std::invalid_argument("subset nodes must be distinct");
    if (nodes.front() < 0 || nodes.back() >= N) throw std::invalid_argument("subset node out of range");
}

bool Subset::contains(int node) const {
    return std::binary_search(nodes.begin(), nodes.end(), node);
}

std::vector<int> Subset::variables() const {
    std::vector<int> vars;
    vars.reserve(nodes.size() * static_cast<std::size_t>(node_dim));
    for (int node : nodes)
        for (int j = 0; j < node_dim; ++j) vars.push_back(node * node_dim + j);
    return vars;
}

Subset Subset::all(int N, int m) {
    std::vector<int> nodes(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) nodes[static_cast<std::size_t>(i)] = i;
    return Subset(nodes, N, m);
}

std::string Subset::label() const {
    std::string s = "{";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(nodes[i] + 1);
    }
    return s + "}";
}

Polynomial lie_derivative(const Polynomial& V, const std::vector<Polynomial>& field) {
    if (static_cast<int>(field.size()) != V.dimension())
        throw std::invalid_argument("field length must equal polynomial dimension");
    Polynomial r(V.dimension());
    for (int j = 0; j < V.dimension(); ++j) {
        Polynomial dj = V.derivative(j);
        if (dj.is_zero()) continue;
        r += dj * field[static_cast<std::size_t>(j)];
    }
    return r;
}

Polynomial project(const Polynomial& p, const Subset& keep) {
    return p.zero_outside(keep.variables());
}

Polynomial residual(const Polynomial& V_c, const Polynomial& V_p, const Subset& keep) {
    if (!V_p.supported_on(keep.variables()))
        throw std::invalid_argument("partial function references out-of-subset variables");
    return V_c - V_p;
}

namespace {
void enumerate_rec(int dimension, const std::vector<int>& vars, std::size_t pos, int remaining,
                   Monomial& current, std::vector<Monomial>& out) {
    if (pos == vars.size()) {
        if (remaining == 0) out.push_back(current);
        return;
    }
    if (pos + 1 == vars.size()) {
        current.exponents[static_cast<std::size_t>(vars[pos])] = static_cast<std::uint8_t>(remaining);
        out.push_back(current);
        current.exponents[static_cast<std::size_t>(vars[pos])] = 0;
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current.exponents[static_cast<std::size_t>(vars[pos])] = static_cast<std::uint8_t>(e);
        enumerate_rec(dimension, vars, pos + 1, remaining - e, current, out);
    }
    current.exponents[static_cast<std::size_t>(vars[pos])] = 0;
}
}  // namespace

std::vector<Monomial> monomial_basis(int dimension, const std::vector<int>& vars,
                                     const std::vector<int>& degrees) {
    if (degrees.empty()) throw std::invalid_argument("degree set must be non-empty");
    std::vector<int> degs = degrees;
    std::sort(degs.begin(), degs.end());
    std::vector<int> sorted_vars = vars;
    std::sort(sorted_vars.begin(), sorted_vars.end());
    std::vector<Monomial> out;
    for (int d : degs) {
        if (d < 0) throw std::invalid_argument("negative degree");
        if (d == 0) {
            out.push_back(Monomial(dimension));
            continue;
        }
        if (sorted_vars.empty()) continue;
        Monomial scratch(dimension);
        enumerate_rec(dimension, sorted_vars, 0, d, scratch, out);
    }
    return out;
}

}  // namespace roa
