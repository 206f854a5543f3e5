#include "roa/sos.hpp"

#include <algorithm>
#include <cmath>

namespace roa {

GramVar& SosProgram::add_gram(const std::string& name, std::vector<Monomial> basis) {
    grams.push_back({name, std::move(basis)});
    return grams.back();
}

FreePolyVar& SosProgram::add_free_poly(const std::string& name, std::vector<Monomial> support) {
    free_polys.push_back({name, std::move(support)});
    return free_polys.back();
}

ScalarVar& SosProgram::add_scalar(const std::string& name, bool nonneg) {
    scalars.push_back({name, nonneg});
    return scalars.back();
}

SosConstraint& SosProgram::add_constraint(const std::string& name, std::vector<Monomial> slack_basis) {
    SosConstraint c;
    c.name = name;
    c.slack_basis = std::move(slack_basis);
    constraints.push_back(std::move(c));
    return constraints.back();
}

std::vector<Monomial> gram_basis(int dimension, const std::vector<int>& vars, int D,
                                 bool vanish_at_origin) {
    if (D < 0) throw std::invalid_argument("gram_basis: negative degree");
    const int half = (D + 1) / 2;
    std::vector<int> degrees;
    for (int d = vanish_at_origin ? 1 : 0; d <= half; ++d) degrees.push_back(d);
    if (degrees.empty()) degrees.push_back(0);
    return monomial_basis(dimension, vars, degrees);
}

void quotient_terms(SosProgram& prog, const std::string& constraint_name,
                    const std::vector<Polynomial>& equalities, int mult_degree) {
    if (equalities.empty()) return;
    auto it = std::find_if(prog.constraints.begin(), prog.constraints.end(),
                           [&](const SosConstraint& c) { return c.name == constraint_name; });
    if (it == prog.constraints.end())
        throw std::invalid_argument("quotient_terms: unknown constraint " + constraint_name);
    for (std::size_t c = 0; c < equalities.size(); ++c) {
        const Polynomial& h = equalities[c];
        if (h.is_zero()) continue;
        std::vector<int> degrees;
        for (int d = 0; d <= mult_degree; ++d) degrees.push_back(d);
        const std::string name = constraint_name + ".quot" + std::to_string(c);
        prog.add_free_poly(name, monomial_basis(prog.dimension, h.support_variables().empty()
                                                                   ? std::vector<int>{}
                                                                   : [&] {
                                                                         // multipliers range over the
                                                                         // full ambient variable set of
                                                                         // the constraint's identity
                                                                         std::vector<int> vs;
                                                                         for (int v = 0; v < prog.dimension; ++v)
                                                                             vs.push_back(v);
                                                                         return vs;
                                                                     }(),
                                                degrees));
        SosTerm t;
        t.fixed = h;
        t.factor = SosTerm::Factor::FreePoly;
        t.ref = name;
        it->terms.push_back(std::move(t));
    }
}

Polynomial gram_polynomial(const std::vector<Monomial>& basis, const DenseMatrix& G) {
    if (basis.empty()) return Polynomial();
    const int n = basis.front().dimension();
    Polynomial p(n);
    const int s = static_cast<int>(basis.size());
    for (int i = 0; i < s; ++i)
        for (int j = i; j < s; ++j) {
            const double g = G(i, j);
            if (g == 0.0) continue;
            p.add_term(basis[static_cast<std::size_t>(i)].times(basis[static_cast<std::size_t>(j)]),
                       (i == j ? 1.0 : 2.0) * g);
        }
    return p;
}

DenseMatrix clip_psd(const DenseMatrix& G, double floor) {
    DenseMatrix S = G;
    const int n = S.rows();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (S(i, j) + S(j, i));
            S(i, j) = S(j, i) = v;
        }
    auto eg = sym_eig(S);
    if (eg.eigenvalues.front() < -std::abs(floor))
        throw std::runtime_error("gram matrix is indefinite beyond tolerance");
    DenseMatrix R(n, n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::max(0.0, eg.eigenvalues[static_cast<std::size_t>(k)]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                R(i, j) += lam * eg.eigenvectors(i, k) * eg.eigenvectors(j, k);
    }
    return R;
}

namespace {

struct VarLayout {
    // ordered scalar partitions
    std::vector<std::string> free_names;    // free scalars then free-poly coefficients
    std::vector<std::string> nonneg_names;  // nonneg scalars then relation slacks
};

}  // namespace

CompiledSos compile(const SosProgram& prog) {
    CompiledSos out;
    SdpProblem& P = out.problem;
    SosIndexMap& map = out.map;

    // ---- block layout ----
    for (const auto& c : prog.constraints) {
        if (c.slack_basis.empty()) throw SosCompileError("constraint " + c.name + " has an empty slack basis");
        map.slack_block[c.name] = P.add_block(BlockKind::Psd, static_cast<int>(c.slack_basis.size()));
    }
    for (const auto& g : prog.grams) {
        if (g.basis.empty()) throw SosCompileError("gram " + g.name + " has an empty basis");
        if (map.gram_block.count(g.name)) throw SosCompileError("duplicate gram name " + g.name);
        map.gram_block[g.name] = P.add_block(BlockKind::Psd, static_cast<int>(g.basis.size()));
    }

    int n_free = 0, n_nonneg = 0;
    for (const auto& s : prog.scalars) (s.nonneg ? n_nonneg : n_free)++;
    for (const auto& fp : prog.free_polys) n_free += static_cast<int>(fp.support.size());
    int n_ge = 0;
    for (const auto& r : prog.relations)
        if (r.kind == ScalarRelation::Kind::Ge) ++n_ge;
    n_nonneg += n_ge;

    const int free_block = n_free > 0 ? P.add_block(BlockKind::Free, n_free) : -1;
    const int nonneg_block = n_nonneg > 0 ? P.add_block(BlockKind::Nonneg, n_nonneg) : -1;

    int free_at = 0, nonneg_at = 0;
    for (const auto& s : prog.scalars) {
        if (map.scalar_block.count(s.name)) throw SosCompileError("duplicate scalar name " + s.name);
        if (s.nonneg) {
            map.scalar_block[s.name] = nonneg_block;
            map.scalar_offset[s.name] = nonneg_at++;
        } else {
            map.scalar_block[s.name] = free_block;
            map.scalar_offset[s.name] = free_at++;
        }
    }
    for (const auto& fp : prog.free_polys) {
        if (map.free_poly_block.count(fp.name)) throw SosCompileError("duplicate poly name " + fp.name);
        map.free_poly_block[fp.name] = free_block;
        map.free_poly_offset[fp.name] = free_at;
        free_at += static_cast<int>(fp.support.size());
    }

    auto find_gram = [&](const std::string& name) -> const GramVar& {
        for (const auto& g : prog.grams)
            if (g.name == name) return g;
        throw SosCompileError("unknown gram reference " + name);
    };
    auto find_free_poly = [&](const std::string& name) -> const FreePolyVar& {
        for (const auto& fp : prog.free_polys)
            if (fp.name == name) return fp;
        throw SosCompileError("unknown free-poly reference " + name);
    };

    // ---- identity rows, one per monomial of the union support ----
    struct RowAccum {
        std::vector<SdpEntry> entries;
        double rhs = 0.0;
        bool has_var = false;
    };

    for (const auto& c : prog.constraints) {
        std::map<Monomial, RowAccum, GradedLexLess> rows;
        auto row_add = [&](const Monomial& mono, int block, int i, int j, double coeff) {
            auto& r = rows[mono];
            r.entries.push_back({block, i, j, coeff});
            r.has_var = true;
        };

        for (const auto& t : c.terms) {
            if (t.fixed.is_zero()) continue;
            switch (t.factor) {
                case SosTerm::Factor::None:
                    for (const auto& [mono, cf] : t.fixed.terms()) rows[mono].rhs -= cf;
                    break;
                case SosTerm::Factor::Scalar: {
                    if (!map.scalar_block.count(t.ref)) throw SosCompileError("unknown scalar reference " + t.ref);
                    const int blk = map.scalar_block.at(t.ref);
                    const int off = map.scalar_offset.at(t.ref);
                    for (const auto& [mono, cf] : t.fixed.terms()) row_add(mono, blk, off, off, cf);
                    break;
                }
                case SosTerm::Factor::Gram: {
                    const GramVar& g = find_gram(t.ref);
                    const int blk = map.gram_block.at(t.ref);
                    const int s = static_cast<int>(g.basis.size());
                    for (int i = 0; i < s; ++i)
                        for (int j = i; j < s; ++j) {
                            const Monomial bij = g.basis[static_cast<std::size_t>(i)].times(
                                g.basis[static_cast<std::size_t>(j)]);
                            const double mult = (i == j) ? 1.0 : 2.0;
                            for (const auto& [mono, cf] : t.fixed.terms())
                                row_add(mono.times(bij), blk, i, j, mult * cf);
                        }
                    break;
                }
                case SosTerm::Factor::FreePoly: {
                    const FreePolyVar& fp = find_free_poly(t.ref);
                    const int blk = map.free_poly_block.at(t.ref);
                    const int off = map.free_poly_offset.at(t.ref);
                    for (std::size_t k = 0; k < fp.support.size(); ++k)
                        for (const auto& [mono, cf] : t.fixed.terms())
                            row_add(mono.times(fp.support[k]), blk, off + static_cast<int>(k),
                                    off + static_cast<int>(k), cf);
                    break;
                }
            }
        }
        // slack Gram appears negated: expr - b' G b = 0
        {
            const int blk = map.slack_block.at(c.name);
            const int s = static_cast<int>(c.slack_basis.size());
            for (int i = 0; i < s; ++i)
                for (int j = i; j < s; ++j) {
                    const Monomial bij = c.slack_basis[static_cast<std::size_t>(i)].times(
                        c.slack_basis[static_cast<std::size_t>(j)]);
                    row_add(bij, blk, i, j, i == j ? -1.0 : -2.0);
                }
        }

        for (auto& [mono, r] : rows) {
            // merge duplicate coordinates produced by repeated (i,j) hits
            std::sort(r.entries.begin(), r.entries.end(), [](const SdpEntry& a, const SdpEntry& b) {
                return std::tie(a.block, a.i, a.j) < std::tie(b.block, b.i, b.j);
            });
            LinearFunctional f;
            for (const auto& e : r.entries) {
                if (!f.entries.empty() && f.entries.back().block == e.block &&
                    f.entries.back().i == e.i && f.entries.back().j == e.j)
                    f.entries.back().coeff += e.coeff;
                else
                    f.entries.push_back(e);
            }
            f.entries.erase(std::remove_if(f.entries.begin(), f.entries.end(),
                                           [](const SdpEntry& e) { return e.coeff == 0.0; }),
                            f.entries.end());
            if (f.entries.empty()) {
                if (std::abs(r.rhs) > 1e-9) {
                    Polynomial probe(prog.dimension);
                    probe.add_term(mono, 1.0);
                    throw SosCompileError("constraint " + c.name + ": monomial " + probe.to_string() +
                                          " is outside the representable span");
                }
                continue;
            }
            P.add_constraint(std::move(f), r.rhs);
        }
    }

    // ---- scalar relations ----
    int slack_at = n_nonneg - n_ge;
    for (const auto& r : prog.relations) {
        LinearFunctional f;
        for (const auto& [name, coeff] : r.lhs) {
            if (!map.scalar_block.count(name)) throw SosCompileError("unknown scalar in relation: " + name);
            f.add(map.scalar_block.at(name), map.scalar_offset.at(name), map.scalar_offset.at(name), coeff);
        }
        if (r.kind == ScalarRelation::Kind::Ge) {
            f.add(nonneg_block, slack_at, slack_at, -1.0);
            ++slack_at;
        }
        P.add_constraint(std::move(f), r.rhs);
    }

    // ---- objective ----
    for (const auto& [name, coeff] : prog.objective) {
        if (!map.scalar_block.count(name)) throw SosCompileError("unknown scalar in objective: " + name);
        P.objective.add(map.scalar_block.at(name), map.scalar_offset.at(name), map.scalar_offset.at(name),
                        coeff);
    }
    return out;
}

SosExtraction extract(const SosProgram& prog, const CompiledSos& compiled, const SdpSolution& sol) {
    SosExtraction out;
    const auto& map = compiled.map;

    for (const auto& g : prog.grams) {
        const DenseMatrix& G = sol.primal[static_cast<std::size_t>(map.gram_block.at(g.name))];
        out.gram_matrices[g.name] = G;
        out.gram_polys[g.name] = gram_polynomial(g.basis, G);
    }
    for (const auto& s : prog.scalars) {
        const DenseMatrix& blk = sol.primal[static_cast<std::size_t>(map.scalar_block.at(s.name))];
        out.scalars[s.name] = blk(map.scalar_offset.at(s.name), 0);
    }
    for (const auto& fp : prog.free_polys) {
        const DenseMatrix& blk = sol.primal[static_cast<std::size_t>(map.free_poly_block.at(fp.name))];
        Polynomial p(prog.dimension);
        const int off = map.free_poly_offset.at(fp.name);
        for (std::size_t k = 0; k < fp.support.size(); ++k)
            p.add_term(fp.support[k], blk(off + static_cast<int>(k), 0));
        out.free_polys[fp.name] = p;
    }

    // identity residual: sum of terms minus slack reconstruction
    for (const auto& c : prog.constraints) {
        Polynomial acc(prog.dimension);
        for (const auto& t : c.terms) {
            switch (t.factor) {
                case SosTerm::Factor::None: acc += t.fixed; break;
                case SosTerm::Factor::Scalar: acc += t.fixed * out.scalars.at(t.ref); break;
                case SosTerm::Factor::Gram: acc += t.fixed * out.gram_polys.at(t.ref); break;
                case SosTerm::Factor::FreePoly: acc += t.fixed * out.free_polys.at(t.ref); break;
            }
        }
        const DenseMatrix& S = sol.primal[static_cast<std::size_t>(map.slack_block.at(c.name))];
        acc -= gram_polynomial(c.slack_basis, S);
        for (const auto& [mono, cf] : acc.terms())
            out.max_identity_residual = std::max(out.max_identity_residual, std::abs(cf));
    }
    out.residual_ok = out.max_identity_residual <= 1e-6;
    return out;
}

bool check_infeasibility_certificate(const SdpProblem& prob, const std::vector<double>& ray,
                                     double tol) {
    if (ray.size() != prob.constraints.size()) return false;
    double bty = 0.0;
    for (std::size_t k = 0; k < ray.size(); ++k) bty += prob.rhs[k] * ray[k];
    if (!(bty > 0.0)) return false;

    // assemble -sum y_k A_k per block and verify dual-cone membership
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
        const auto& blk = prob.blocks[b];
        if (blk.kind == BlockKind::Psd) {
            DenseMatrix M(blk.size, blk.size);
            for (std::size_t k = 0; k < prob.constraints.size(); ++k)
                for (const auto& e : prob.constraints[k].entries) {
                    if (static_cast<std::size_t>(e.block) != b) continue;
                    const double v = -ray[k] * e.coeff;
                    if (e.i == e.j)
                        M(e.i, e.i) += v;
                    else {
                        M(e.i, e.j) += 0.5 * v;
                        M(e.j, e.i) += 0.5 * v;
                    }
                }
            const auto eg = sym_eig(M);
            if (eg.eigenvalues.front() < -tol * (1.0 + M.max_abs())) return false;
        } else {
            std::vector<double> v(static_cast<std::size_t>(blk.size), 0.0);
            for (std::size_t k = 0; k < prob.constraints.size(); ++k)
                for (const auto& e : prob.constraints[k].entries)
                    if (static_cast<std::size_t>(e.block) == b) v[static_cast<std::size_t>(e.i)] -= ray[k] * e.coeff;
            for (double x : v) {
                if (blk.kind == BlockKind::Nonneg && x < -tol) return false;
                if (blk.kind == BlockKind::Free && std::abs(x) > tol) return false;
            }
        }
    }
    return true;
}

}  // namespace roa
