#include "roa/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

namespace roa {

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::Unbounded: return "unbounded";
        case SdpStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

namespace {

void validate(const SdpProblem& p) {
    if (p.constraints.size() != p.rhs.size())
        throw std::invalid_argument("sdp: constraint/rhs count mismatch");
    auto check_entry = [&](const SdpEntry& e) {
        if (e.block < 0 || e.block >= static_cast<int>(p.blocks.size()))
            throw std::invalid_argument("sdp: entry block out of range");
        const auto& b = p.blocks[static_cast<std::size_t>(e.block)];
        if (b.kind == BlockKind::Psd) {
            if (e.i < 0 || e.j < e.i || e.j >= b.size)
                throw std::invalid_argument("sdp: psd entry indices invalid");
        } else {
            if (e.i != e.j || e.i < 0 || e.i >= b.size)
                throw std::invalid_argument("sdp: scalar entry indices invalid");
        }
    };
    for (const auto& e : p.objective.entries) check_entry(e);
    for (const auto& f : p.constraints)
        for (const auto& e : f.entries) check_entry(e);
}

// ---- internal conic data (free blocks already split) ----

struct Cone {
    std::vector<SdpBlock> blocks;  // Psd / Nonneg only
    int nu = 0;                    // barrier degree
};

// sparse functional entries grouped by block, matrix-form coefficient kept
// as-is (applied once at (i,j) of the upper triangle)
struct SparseFunc {
    // per block: list of (i, j, c)
    std::vector<std::vector<std::array<int, 2>>> idx;
    std::vector<std::vector<double>> val;
    SparseFunc() = default;
    explicit SparseFunc(std::size_t nblocks) : idx(nblocks), val(nblocks) {}
    void add(int b, int i, int j, double c) {
        idx[static_cast<std::size_t>(b)].push_back({i, j});
        val[static_cast<std::size_t>(b)].push_back(c);
    }
};

// block-structured vector (s x s symmetric for Psd, length-s for Nonneg)
struct BlockVec {
    std::vector<DenseMatrix> mats;
    std::vector<std::vector<double>> vecs;

    static BlockVec shaped(const Cone& K, double diag_value) {
        BlockVec v;
        v.mats.resize(K.blocks.size());
        v.vecs.resize(K.blocks.size());
        for (std::size_t b = 0; b < K.blocks.size(); ++b) {
            if (K.blocks[b].kind == BlockKind::Psd) {
                v.mats[b] = DenseMatrix(K.blocks[b].size, K.blocks[b].size);
                for (int i = 0; i < K.blocks[b].size; ++i) v.mats[b](i, i) = diag_value;
            } else {
                v.vecs[b].assign(static_cast<std::size_t>(K.blocks[b].size), diag_value);
            }
        }
        return v;
    }
    void set_zero() {
        for (auto& m : mats)
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j) m(i, j) = 0.0;
        for (auto& v : vecs) std::fill(v.begin(), v.end(), 0.0);
    }
};

double dot(const BlockVec& a, const BlockVec& b, const Cone& K) {
    double s = 0.0;
    for (std::size_t bl = 0; bl < K.blocks.size(); ++bl) {
        if (K.blocks[bl].kind == BlockKind::Psd) {
            const auto& A = a.mats[bl];
            const auto& B = b.mats[bl];
            for (int i = 0; i < A.rows(); ++i)
                for (int j = 0; j < A.cols(); ++j) s += A(i, j) * B(i, j);
        } else {
            for (std::size_t i = 0; i < a.vecs[bl].size(); ++i) s += a.vecs[bl][i] * b.vecs[bl][i];
        }
    }
    return s;
}

void axpy(double alpha, const BlockVec& x, BlockVec& y, const Cone& K) {
    for (std::size_t bl = 0; bl < K.blocks.size(); ++bl) {
        if (K.blocks[bl].kind == BlockKind::Psd) {
            const auto& X = x.mats[bl];
            auto& Y = y.mats[bl];
            for (int i = 0; i < X.rows(); ++i)
                for (int j = 0; j < X.cols(); ++j) Y(i, j) += alpha * X(i, j);
        } else {
            for (std::size_t i = 0; i < x.vecs[bl].size(); ++i) y.vecs[bl][i] += alpha * x.vecs[bl][i];
        }
    }
}

// functional evaluation <F, X> with the one-triangle convention
double feval(const SparseFunc& f, const BlockVec& x, const Cone& K) {
    double s = 0.0;
    for (std::size_t b = 0; b < f.idx.size(); ++b) {
        if (f.idx[b].empty()) continue;
        if (K.blocks[b].kind == BlockKind::Psd) {
            const auto& X = x.mats[b];
            for (std::size_t e = 0; e < f.idx[b].size(); ++e)
                s += f.val[b][e] * X(f.idx[b][e][0], f.idx[b][e][1]);
        } else {
            for (std::size_t e = 0; e < f.idx[b].size(); ++e)
                s += f.val[b][e] * x.vecs[b][f.idx[b][e][0]];
        }
    }
    return s;
}

// y += alpha * matrix-form(F):  diag entries add c, off-diag add c/2 mirrored
void fadd(const SparseFunc& f, double alpha, BlockVec& y, const Cone& K) {
    for (std::size_t b = 0; b < f.idx.size(); ++b) {
        if (f.idx[b].empty()) continue;
        if (K.blocks[b].kind == BlockKind::Psd) {
            auto& Y = y.mats[b];
            for (std::size_t e = 0; e < f.idx[b].size(); ++e) {
                const int i = f.idx[b][e][0], j = f.idx[b][e][1];
                const double c = alpha * f.val[b][e];
                if (i == j) {
                    Y(i, i) += c;
                } else {
                    Y(i, j) += 0.5 * c;
                    Y(j, i) += 0.5 * c;
                }
            }
        } else {
            for (std::size_t e = 0; e < f.idx[b].size(); ++e)
                y.vecs[b][f.idx[b][e][0]] += alpha * f.val[b][e];
        }
    }
}

DenseMatrix lower_triangular_inverse(const DenseMatrix& L) {
    const int n = L.rows();
    DenseMatrix inv(n, n);
    for (int j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / L(j, j);
        for (int i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (int k = j; k < i; ++k) s += L(i, k) * inv(k, j);
            inv(i, j) = -s / L(i, i);
        }
    }
    return inv;
}

DenseMatrix chol_with_jitter(DenseMatrix M) {
    const int n = M.rows();
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += std::abs(M(i, i));
    double jitter = (trace / std::max(1, n)) * 1e-14 + 1e-300;
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            return cholesky(M);
        } catch (const SingularMatrixError&) {
            for (int i = 0; i < n; ++i) M(i, i) += jitter;
            jitter *= 100.0;
        }
    }
    throw SingularMatrixError("cholesky failed despite regularization");
}

// NT scaling data per block
struct Scaling {
    // psd blocks
    DenseMatrix R, Rinv, W;
    std::vector<double> sigma;  // scaled eigenvalues (lambda-hat)
    // nonneg blocks
    std::vector<double> w;     // W diagonal
    std::vector<double> lam;   // sqrt(x s)
};

Scaling nt_scaling(const SdpBlock& blk, const DenseMatrix& Xm, const std::vector<double>& xv,
                   const DenseMatrix& Sm, const std::vector<double>& sv) {
    Scaling sc;
    if (blk.kind == BlockKind::Psd) {
        const int n = blk.size;
        DenseMatrix Lx = chol_with_jitter(Xm);
        DenseMatrix Ls = chol_with_jitter(Sm);
        // G = (Ls^T Lx)^T (Ls^T Lx)
        DenseMatrix M = Ls.transpose() * Lx;
        DenseMatrix G = M.transpose() * M;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = 0.5 * (G(i, j) + G(j, i));
                G(i, j) = G(j, i) = v;
            }
        SymEigResult eg = sym_eig(G);
        sc.sigma.resize(static_cast<std::size_t>(n));
        DenseMatrix Vs = eg.eigenvectors;  // columns
        DenseMatrix Vs_scaled = Vs;
        for (int j = 0; j < n; ++j) {
            const double s2 = std::max(eg.eigenvalues[static_cast<std::size_t>(j)], 1e-280);
            const double sg = std::sqrt(s2);
            sc.sigma[static_cast<std::size_t>(j)] = sg;
            const double f = 1.0 / std::sqrt(sg);
            for (int i = 0; i < n; ++i) Vs_scaled(i, j) *= f;
        }
        sc.R = Lx * Vs_scaled;  // Lx V Sigma^{-1/2}
        DenseMatrix Lxinv = lower_triangular_inverse(Lx);
        // Rinv = Sigma^{1/2} V^T Lx^{-1}
        DenseMatrix Vt = Vs.transpose();
        for (int i = 0; i < n; ++i) {
            const double f = std::sqrt(sc.sigma[static_cast<std::size_t>(i)]);
            for (int j = 0; j < n; ++j) Vt(i, j) *= f;
        }
        sc.Rinv = Vt * Lxinv;
        sc.W = sc.R * sc.R.transpose();
    } else {
        const std::size_t n = xv.size();
        sc.w.resize(n);
        sc.lam.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            sc.w[i] = std::sqrt(std::max(xv[i], 1e-280) / std::max(sv[i], 1e-280));
            sc.lam[i] = std::sqrt(std::max(xv[i] * sv[i], 1e-300));
        }
    }
    return sc;
}

// Phi(M) = W M W per block
void apply_phi(const std::vector<Scaling>& sc, const Cone& K, const BlockVec& in, BlockVec& out) {
    for (std::size_t b = 0; b < K.blocks.size(); ++b) {
        if (K.blocks[b].kind == BlockKind::Psd) {
            out.mats[b] = sc[b].W * in.mats[b] * sc[b].W;
        } else {
            for (std::size_t i = 0; i < in.vecs[b].size(); ++i)
                out.vecs[b][i] = sc[b].w[i] * sc[b].w[i] * in.vecs[b][i];
        }
    }
}

// largest alpha in (0,1] keeping (X + alpha D) in the cone, with margin
double step_to_boundary_psd(const DenseMatrix& X, const DenseMatrix& D) {
    DenseMatrix L = chol_with_jitter(X);
    const int n = X.rows();
    // T = L^{-1} D L^{-T}
    DenseMatrix Linv = lower_triangular_inverse(L);
    DenseMatrix T = Linv * D * Linv.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (T(i, j) + T(j, i));
            T(i, j) = T(j, i) = v;
        }
    const auto eg = sym_eig(T);
    const double lmin = eg.eigenvalues.front();
    if (lmin >= 0.0) return 1.0;
    return std::min(1.0, -1.0 / lmin);
}

struct IpmWork {
    Cone K;
    std::vector<SparseFunc> rows;  // constraints
    SparseFunc cobj;
    std::vector<double> b;
    int m = 0;
};

struct Iterate {
    BlockVec x, s;
    std::vector<double> y;
    double tau = 1.0, kappa = 1.0;
};

struct Direction {
    BlockVec dx, ds;
    std::vector<double> dy;
    double dtau = 0.0, dkappa = 0.0;
};

}  // namespace

PresolveResult presolve(const SdpProblem& prob, double tol, int rank_check_limit) {
    validate(prob);
    PresolveResult out;
    const int m = static_cast<int>(prob.constraints.size());

    // canonical key for exact-duplicate detection
    auto canon = [&](const LinearFunctional& f) {
        std::vector<SdpEntry> es = f.entries;
        std::sort(es.begin(), es.end(), [](const SdpEntry& a, const SdpEntry& b) {
            if (a.block != b.block) return a.block < b.block;
            if (a.i != b.i) return a.i < b.i;
            return a.j < b.j;
        });
        // merge duplicates
        std::vector<SdpEntry> merged;
        for (const auto& e : es) {
            if (!merged.empty() && merged.back().block == e.block && merged.back().i == e.i &&
                merged.back().j == e.j)
                merged.back().coeff += e.coeff;
            else
                merged.push_back(e);
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const SdpEntry& e) { return e.coeff == 0.0; }),
                     merged.end());
        return merged;
    };

    std::vector<std::vector<SdpEntry>> rows(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) rows[static_cast<std::size_t>(k)] = canon(prob.constraints[static_cast<std::size_t>(k)]);

    std::vector<char> keep(static_cast<std::size_t>(m), 1);

    auto row_dot = [&](int a, int bi) {
        double s = 0.0;
        std::size_t ia = 0, ib = 0;
        const auto& ra = rows[static_cast<std::size_t>(a)];
        const auto& rb = rows[static_cast<std::size_t>(bi)];
        auto key = [](const SdpEntry& e) { return std::tuple<int, int, int>(e.block, e.i, e.j); };
        while (ia < ra.size() && ib < rb.size()) {
            if (key(ra[ia]) < key(rb[ib]))
                ++ia;
            else if (key(rb[ib]) < key(ra[ia]))
                ++ib;
            else {
                s += ra[ia].coeff * rb[ib].coeff;
                ++ia;
                ++ib;
            }
        }
        return s;
    };

    if (m > 0 && m <= rank_check_limit) {
        // rank detection via pivoted Cholesky on the row Gram matrix
        DenseMatrix G(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) G(i, j) = G(j, i) = row_dot(i, j);
        double gmax = 0.0;
        for (int i = 0; i < m; ++i) gmax = std::max(gmax, G(i, i));
        const double cutoff = std::max(gmax, 1.0) * tol * tol;

        // left-looking pivoted Cholesky; dependent rows have residual
        // diagonal below the cutoff
        std::vector<int> order;
        std::vector<char> done(static_cast<std::size_t>(m), 0);
        DenseMatrix L(m, m);
        std::vector<double> diag(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) diag[static_cast<std::size_t>(i)] = G(i, i);
        for (int step = 0; step < m; ++step) {
            int piv = -1;
            double best = cutoff;
            for (int i = 0; i < m; ++i)
                if (!done[static_cast<std::size_t>(i)] && diag[static_cast<std::size_t>(i)] > best) {
                    best = diag[static_cast<std::size_t>(i)];
                    piv = i;
                }
            if (piv < 0) break;
            done[static_cast<std::size_t>(piv)] = 1;
            order.push_back(piv);
            const int r = static_cast<int>(order.size()) - 1;
            L(piv, r) = std::sqrt(diag[static_cast<std::size_t>(piv)]);
            for (int i = 0; i < m; ++i) {
                if (done[static_cast<std::size_t>(i)]) continue;
                double v = G(i, piv);
                for (int k = 0; k < r; ++k) v -= L(i, k) * L(piv, k);
                L(i, r) = v / L(piv, r);
                diag[static_cast<std::size_t>(i)] -= L(i, r) * L(i, r);
            }
        }
        for (int i = 0; i < m; ++i)
            if (!done[static_cast<std::size_t>(i)]) keep[static_cast<std::size_t>(i)] = 0;

        // consistency of dropped rows: b_drop must match the combination of
        // kept rows reproducing the functional
        for (int d = 0; d < m; ++d) {
            if (keep[static_cast<std::size_t>(d)]) continue;
            const int r = static_cast<int>(order.size());
            // solve L_kk^T-free least squares via the factor: alpha solves
            // (L_k L_k^T) alpha = G(kept, d); forward/back substitution on L
            std::vector<double> rhsv(static_cast<std::size_t>(r));
            for (int k = 0; k < r; ++k) rhsv[static_cast<std::size_t>(k)] = G(order[static_cast<std::size_t>(k)], d);
            // forward solve with lower-triangular L(order[k], col)
            std::vector<double> z(static_cast<std::size_t>(r));
            for (int k = 0; k < r; ++k) {
                double v = rhsv[static_cast<std::size_t>(k)];
                for (int j = 0; j < k; ++j) v -= L(order[static_cast<std::size_t>(k)], j) * z[static_cast<std::size_t>(j)];
                z[static_cast<std::size_t>(k)] = v / L(order[static_cast<std::size_t>(k)], k);
            }
            std::vector<double> alpha(static_cast<std::size_t>(r));
            for (int k = r - 1; k >= 0; --k) {
                double v = z[static_cast<std::size_t>(k)];
                for (int j = k + 1; j < r; ++j) v -= L(order[static_cast<std::size_t>(j)], k) * alpha[static_cast<std::size_t>(j)];
                alpha[static_cast<std::size_t>(k)] = v / L(order[static_cast<std::size_t>(k)], k);
            }
            double combo = 0.0, anorm = 0.0;
            for (int k = 0; k < r; ++k) {
                combo += alpha[static_cast<std::size_t>(k)] * prob.rhs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
                anorm += std::abs(alpha[static_cast<std::size_t>(k)]);
            }
            const double bd = prob.rhs[static_cast<std::size_t>(d)];
            if (std::abs(bd - combo) > 1e-8 * (1.0 + std::abs(bd) + anorm)) {
                out.inconsistent = true;
                out.inconsistent_row = d;
                out.infeasibility_ray.assign(static_cast<std::size_t>(m), 0.0);
                const double sgn = (bd - combo > 0) ? 1.0 : -1.0;
                out.infeasibility_ray[static_cast<std::size_t>(d)] = sgn;
                for (int k = 0; k < r; ++k)
                    out.infeasibility_ray[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
                        -sgn * alpha[static_cast<std::size_t>(k)];
                break;
            }
        }
    } else if (m > rank_check_limit) {
        // large problems: drop exact duplicates and zero rows only
        std::map<std::vector<std::tuple<int, int, int, double>>, int> seen;
        for (int k = 0; k < m; ++k) {
            std::vector<std::tuple<int, int, int, double>> key;
            key.reserve(rows[static_cast<std::size_t>(k)].size());
            for (const auto& e : rows[static_cast<std::size_t>(k)]) key.emplace_back(e.block, e.i, e.j, e.coeff);
            if (key.empty()) {
                keep[static_cast<std::size_t>(k)] = 0;
                if (std::abs(prob.rhs[static_cast<std::size_t>(k)]) > tol) {
                    out.inconsistent = true;
                    out.inconsistent_row = k;
                    out.infeasibility_ray.assign(static_cast<std::size_t>(m), 0.0);
                    out.infeasibility_ray[static_cast<std::size_t>(k)] =
                        prob.rhs[static_cast<std::size_t>(k)] > 0 ? 1.0 : -1.0;
                }
                continue;
            }
            auto it = seen.find(key);
            if (it == seen.end())
                seen.emplace(std::move(key), k);
            else {
                keep[static_cast<std::size_t>(k)] = 0;
                if (std::abs(prob.rhs[static_cast<std::size_t>(k)] - prob.rhs[static_cast<std::size_t>(it->second)]) > tol) {
                    out.inconsistent = true;
                    out.inconsistent_row = k;
                    out.infeasibility_ray.assign(static_cast<std::size_t>(m), 0.0);
                    const double d = prob.rhs[static_cast<std::size_t>(k)] - prob.rhs[static_cast<std::size_t>(it->second)];
                    out.infeasibility_ray[static_cast<std::size_t>(k)] = d > 0 ? 1.0 : -1.0;
                    out.infeasibility_ray[static_cast<std::size_t>(it->second)] = d > 0 ? -1.0 : 1.0;
                }
            }
        }
    }

    out.problem.blocks = prob.blocks;
    out.problem.objective = prob.objective;
    for (int k = 0; k < m; ++k)
        if (keep[static_cast<std::size_t>(k)]) {
            out.problem.constraints.push_back(prob.constraints[static_cast<std::size_t>(k)]);
            out.problem.rhs.push_back(prob.rhs[static_cast<std::size_t>(k)]);
            out.kept_rows.push_back(k);
        }
    return out;
}

SdpSolution solve(const SdpProblem& prob0, const ToleranceSet& tol) {
    validate(prob0);

    PresolveResult pre = presolve(prob0);
    if (pre.inconsistent) {
        SdpSolution sol;
        sol.status = SdpStatus::Infeasible;
        sol.ray = pre.infeasibility_ray;
        return sol;
    }
    const SdpProblem& prob = pre.problem;
    const int m = static_cast<int>(prob.constraints.size());
    const int nblocks = static_cast<int>(prob.blocks.size());

    // ---- free-variable split into paired nonnegatives ----
    Cone K;
    K.blocks.reserve(static_cast<std::size_t>(nblocks));
    std::vector<char> was_free(static_cast<std::size_t>(nblocks), 0);
    for (int b = 0; b < nblocks; ++b) {
        const auto& blk = prob.blocks[static_cast<std::size_t>(b)];
        if (blk.kind == BlockKind::Free) {
            K.blocks.push_back({BlockKind::Nonneg, 2 * blk.size});
            was_free[static_cast<std::size_t>(b)] = 1;
            K.nu += 2 * blk.size;
        } else {
            K.blocks.push_back(blk);
            K.nu += blk.size;
        }
    }

    IpmWork w;
    w.K = K;
    w.m = m;
    w.b = prob.rhs;
    w.cobj = SparseFunc(static_cast<std::size_t>(nblocks));

    auto transfer = [&](const LinearFunctional& f, SparseFunc& out) {
        for (const auto& e : f.entries) {
            if (was_free[static_cast<std::size_t>(e.block)]) {
                const int half = prob.blocks[static_cast<std::size_t>(e.block)].size;
                out.add(e.block, e.i, e.i, e.coeff);
                out.add(e.block, half + e.i, half + e.i, -e.coeff);
            } else {
                out.add(e.block, e.i, e.j, e.coeff);
            }
        }
    };

    transfer(prob.objective, w.cobj);
    w.rows.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        SparseFunc f(static_cast<std::size_t>(nblocks));
        transfer(prob.constraints[static_cast<std::size_t>(k)], f);
        w.rows.push_back(std::move(f));
    }

    // ---- row equilibration + objective normalization ----
    std::vector<double> row_scale(static_cast<std::size_t>(m), 1.0);
    for (int k = 0; k < m; ++k) {
        double mx = 0.0;
        const auto& f = w.rows[static_cast<std::size_t>(k)];
        for (const auto& vb : f.val)
            for (double v : vb) mx = std::max(mx, std::abs(v));
        if (mx > 0) {
            row_scale[static_cast<std::size_t>(k)] = mx;
            const double inv = 1.0 / mx;
            auto& fk = w.rows[static_cast<std::size_t>(k)];
            for (auto& vb : fk.val)
                for (double& v : vb) v *= inv;
            w.b[static_cast<std::size_t>(k)] *= inv;
        }
    }
    double obj_scale = 0.0;
    for (const auto& vb : w.cobj.val)
        for (double v : vb) obj_scale = std::max(obj_scale, std::abs(v));
    if (obj_scale <= 0) obj_scale = 1.0;
    for (auto& vb : w.cobj.val)
        for (double& v : vb) v /= obj_scale;

    // ---- HSDE interior point iterations ----
    Iterate it;
    it.x = BlockVec::shaped(K, 1.0);
    it.s = BlockVec::shaped(K, 1.0);
    it.y.assign(static_cast<std::size_t>(m), 0.0);
    it.tau = it.kappa = 1.0;

    double bnorm = 0.0, cnorm = 0.0;
    for (double v : w.b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    {
        BlockVec cvec = BlockVec::shaped(K, 0.0);
        fadd(w.cobj, 1.0, cvec, K);
        cnorm = std::sqrt(dot(cvec, cvec, K));
    }

    SdpSolution best;
    double best_merit = 1e300;

    auto record_result = [&](SdpStatus status, const Iterate& cur, double pres, double dres,
                             double relgap, int iters) {
        SdpSolution sol;
        sol.status = status;
        sol.iterations = iters;
        sol.duality_gap = relgap;
        sol.primal_infeasibility = pres;
        sol.dual_infeasibility = dres;
        const double inv_tau = 1.0 / cur.tau;
        // primal values per original block (free split merged back)
        sol.primal.resize(static_cast<std::size_t>(nblocks));
        for (int b = 0; b < nblocks; ++b) {
            const auto& blk = prob.blocks[static_cast<std::size_t>(b)];
            if (blk.kind == BlockKind::Psd) {
                sol.primal[static_cast<std::size_t>(b)] = cur.x.mats[static_cast<std::size_t>(b)] * inv_tau;
            } else if (blk.kind == BlockKind::Nonneg) {
                DenseMatrix v(blk.size, 1);
                for (int i = 0; i < blk.size; ++i) v(i, 0) = cur.x.vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] * inv_tau;
                sol.primal[static_cast<std::size_t>(b)] = v;
            } else {
                DenseMatrix v(blk.size, 1);
                for (int i = 0; i < blk.size; ++i)
                    v(i, 0) = (cur.x.vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] -
                               cur.x.vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(blk.size + i)]) *
                              inv_tau;
                sol.primal[static_cast<std::size_t>(b)] = v;
            }
        }
        // duals over original rows (presolve-dropped rows get zero)
        sol.dual.assign(prob0.constraints.size(), 0.0);
        for (int k = 0; k < m; ++k)
            sol.dual[static_cast<std::size_t>(pre.kept_rows[static_cast<std::size_t>(k)])] =
                cur.y[static_cast<std::size_t>(k)] * inv_tau * obj_scale / row_scale[static_cast<std::size_t>(k)];
        sol.objective = feval(w.cobj, cur.x, K) * inv_tau * obj_scale;
        return sol;
    };

    const double mu0 = (dot(it.x, it.s, K) + it.tau * it.kappa) / (K.nu + 1);

    BlockVec resd = BlockVec::shaped(K, 0.0);
    BlockVec phic = BlockVec::shaped(K, 0.0);
    BlockVec cvec = BlockVec::shaped(K, 0.0);
    fadd(w.cobj, 1.0, cvec, K);

    int iter = 0;
    for (; iter < tol.max_iterations; ++iter) {
        // residuals
        std::vector<double> resp(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
            resp[static_cast<std::size_t>(k)] = feval(w.rows[static_cast<std::size_t>(k)], it.x, K) -
                                                w.b[static_cast<std::size_t>(k)] * it.tau;
        resd.set_zero();
        fadd(w.cobj, it.tau, resd, K);
        for (int k = 0; k < m; ++k) fadd(w.rows[static_cast<std::size_t>(k)], -it.y[static_cast<std::size_t>(k)], resd, K);
        axpy(-1.0, it.s, resd, K);  // resd = -A^T y + c tau - s
        double bty = 0.0;
        for (int k = 0; k < m; ++k) bty += w.b[static_cast<std::size_t>(k)] * it.y[static_cast<std::size_t>(k)];
        const double ctx = feval(w.cobj, it.x, K);
        const double resg = bty - ctx - it.kappa;

        const double mu = (dot(it.x, it.s, K) + it.tau * it.kappa) / (K.nu + 1);

        // convergence metrics at the de-homogenized point
        const double inv_tau = 1.0 / it.tau;
        double pres = 0.0;
        for (int k = 0; k < m; ++k) {
            const double r = feval(w.rows[static_cast<std::size_t>(k)], it.x, K) * inv_tau - w.b[static_cast<std::size_t>(k)];
            pres += r * r;
        }
        pres = std::sqrt(pres) / (1.0 + bnorm);
        double dres;
        {
            BlockVec dtmp = BlockVec::shaped(K, 0.0);
            for (int k = 0; k < m; ++k) fadd(w.rows[static_cast<std::size_t>(k)], it.y[static_cast<std::size_t>(k)] * inv_tau, dtmp, K);
            axpy(inv_tau, it.s, dtmp, K);
            axpy(-1.0, cvec, dtmp, K);  // A^T y + s - c
            dres = std::sqrt(dot(dtmp, dtmp, K)) / (1.0 + cnorm);
        }
        const double pobj = ctx * inv_tau, dobj = bty * inv_tau;
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        const double merit = pres + dres + relgap;
        if (merit < best_merit) {
            best_merit = merit;
            best = record_result(SdpStatus::NumericalFailure, it, pres, dres, relgap, iter);
        }

        if (pres <= tol.feasibility && dres <= tol.feasibility && relgap <= tol.gap) {
            return record_result(SdpStatus::Optimal, it, pres, dres, relgap, iter);
        }

        // infeasibility certificates from the homogeneous part
        if (bty > 0.0) {
            BlockVec aty = BlockVec::shaped(K, 0.0);
            for (int k = 0; k < m; ++k) fadd(w.rows[static_cast<std::size_t>(k)], it.y[static_cast<std::size_t>(k)], aty, K);
            axpy(1.0, it.s, aty, K);  // A^T y + s  (should be ~0 for a certificate)
            const double cert_res = std::sqrt(dot(aty, aty, K));
            if (cert_res <= tol.feasibility * bty * (1.0 + cnorm)) {
                SdpSolution sol = record_result(SdpStatus::Infeasible, it, pres, dres, relgap, iter);
                sol.ray.assign(prob0.constraints.size(), 0.0);
                for (int k = 0; k < m; ++k)
                    sol.ray[static_cast<std::size_t>(pre.kept_rows[static_cast<std::size_t>(k)])] =
                        it.y[static_cast<std::size_t>(k)] / bty / row_scale[static_cast<std::size_t>(k)];
                return sol;
            }
        }
        if (-ctx > 0.0) {
            double ax = 0.0;
            for (int k = 0; k < m; ++k) {
                const double v = feval(w.rows[static_cast<std::size_t>(k)], it.x, K);
                ax += v * v;
            }
            ax = std::sqrt(ax);
            if (ax <= tol.feasibility * (-ctx) * (1.0 + bnorm)) {
                // report the primal improving ray x normalized to <c, x> = -1
                Iterate ray_it = it;
                ray_it.tau = -ctx;
                SdpSolution sol = record_result(SdpStatus::Unbounded, ray_it, pres, dres, relgap, iter);
                return sol;
            }
        }
        if (it.tau < 1e-12 * std::max(1.0, it.kappa) || mu < 1e-14 * mu0) {
            break;  // numerically exhausted without a clean certificate
        }

        // ---- NT scalings ----
        std::vector<Scaling> sc(static_cast<std::size_t>(nblocks));
        for (int b = 0; b < nblocks; ++b)
            sc[static_cast<std::size_t>(b)] = nt_scaling(K.blocks[static_cast<std::size_t>(b)],
                                                         it.x.mats[static_cast<std::size_t>(b)],
                                                         it.x.vecs[static_cast<std::size_t>(b)],
                                                         it.s.mats[static_cast<std::size_t>(b)],
                                                         it.s.vecs[static_cast<std::size_t>(b)]);
        apply_phi(sc, K, cvec, phic);

        // ---- Schur complement H = A Phi A^T ----
        DenseMatrix H(m, m);
        {
            BlockVec T = BlockVec::shaped(K, 0.0);
            for (int l = 0; l < m; ++l) {
                // T = Phi(A_l) built entry-wise from scaled columns
                T.set_zero();
                const auto& fl = w.rows[static_cast<std::size_t>(l)];
                for (int b = 0; b < nblocks; ++b) {
                    const auto& idx = fl.idx[static_cast<std::size_t>(b)];
                    if (idx.empty()) continue;
                    if (K.blocks[static_cast<std::size_t>(b)].kind == BlockKind::Psd) {
                        const auto& W = sc[static_cast<std::size_t>(b)].W;
                        auto& Tb = T.mats[static_cast<std::size_t>(b)];
                        const int nb = W.rows();
                        for (std::size_t e = 0; e < idx.size(); ++e) {
                            const int i = idx[e][0], j = idx[e][1];
                            const double c = fl.val[static_cast<std::size_t>(b)][e];
                            // W is symmetric: row i equals column i
                            const double* wi = W.data() + static_cast<std::size_t>(i) * nb;
                            if (i == j) {
                                for (int r = 0; r < nb; ++r) {
                                    const double f = c * wi[r];
                                    if (f == 0.0) continue;
                                    double* tr = Tb.data() + static_cast<std::size_t>(r) * nb;
                                    for (int cc = 0; cc < nb; ++cc) tr[cc] += f * wi[cc];
                                }
                            } else {
                                const double* wj = W.data() + static_cast<std::size_t>(j) * nb;
                                for (int r = 0; r < nb; ++r) {
                                    const double fi = 0.5 * c * wi[r];
                                    const double fj = 0.5 * c * wj[r];
                                    double* tr = Tb.data() + static_cast<std::size_t>(r) * nb;
                                    for (int cc = 0; cc < nb; ++cc) tr[cc] += fi * wj[cc] + fj * wi[cc];
                                }
                            }
                        }
                    } else {
                        auto& tv = T.vecs[static_cast<std::size_t>(b)];
                        const auto& ww = sc[static_cast<std::size_t>(b)].w;
                        for (std::size_t e = 0; e < idx.size(); ++e)
                            tv[static_cast<std::size_t>(idx[e][0])] +=
                                ww[static_cast<std::size_t>(idx[e][0])] * ww[static_cast<std::size_t>(idx[e][0])] *
                                fl.val[static_cast<std::size_t>(b)][e];
                    }
                }
                for (int k = l; k < m; ++k) {
                    const double v = feval(w.rows[static_cast<std::size_t>(k)], T, K);
                    H(k, l) = v;
                    H(l, k) = v;
                }
            }
        }
        DenseMatrix Hchol;
        try {
            Hchol = chol_with_jitter(H);
        } catch (const SingularMatrixError&) {
            break;
        }
        auto schur_solve = [&](const std::vector<double>& rhsv) {
            std::vector<double> z = rhsv;
            for (int i = 0; i < m; ++i) {
                double v = z[static_cast<std::size_t>(i)];
                for (int k = 0; k < i; ++k) v -= Hchol(i, k) * z[static_cast<std::size_t>(k)];
                z[static_cast<std::size_t>(i)] = v / Hchol(i, i);
            }
            for (int i = m - 1; i >= 0; --i) {
                double v = z[static_cast<std::size_t>(i)];
                for (int k = i + 1; k < m; ++k) v -= Hchol(k, i) * z[static_cast<std::size_t>(k)];
                z[static_cast<std::size_t>(i)] = v / Hchol(i, i);
            }
            return z;
        };

        // pieces independent of the complementarity rhs
        BlockVec phic_resd = BlockVec::shaped(K, 0.0);
        apply_phi(sc, K, resd, phic_resd);
        std::vector<double> a_phic(static_cast<std::size_t>(m)), a_phiresd(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            a_phic[static_cast<std::size_t>(k)] = feval(w.rows[static_cast<std::size_t>(k)], phic, K);
            a_phiresd[static_cast<std::size_t>(k)] = feval(w.rows[static_cast<std::size_t>(k)], phic_resd, K);
        }
        std::vector<double> hvec(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) hvec[static_cast<std::size_t>(k)] = a_phic[static_cast<std::size_t>(k)] + w.b[static_cast<std::size_t>(k)];
        const std::vector<double> u2 = schur_solve(hvec);
        const double phic_c = dot(phic, cvec, K);
        const double phic_rd = dot(phic, resd, K);

        auto solve_direction = [&](const BlockVec& rhs_c, double rhs_tk, Direction& d) -> bool {
            std::vector<double> g1(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k)
                g1[static_cast<std::size_t>(k)] = -resp[static_cast<std::size_t>(k)] -
                                                  feval(w.rows[static_cast<std::size_t>(k)], rhs_c, K) +
                                                  a_phiresd[static_cast<std::size_t>(k)];
            const std::vector<double> u1 = schur_solve(g1);
            const double c_rhsc = dot(cvec, rhs_c, K);
            const double g2 = -resg + c_rhsc - phic_rd + rhs_tk / it.tau;
            double num = g2, den = phic_c + it.kappa / it.tau;
            for (int k = 0; k < m; ++k) {
                const double bk = w.b[static_cast<std::size_t>(k)] - a_phic[static_cast<std::size_t>(k)];
                num -= bk * u1[static_cast<std::size_t>(k)];
                den += bk * u2[static_cast<std::size_t>(k)];
            }
            if (std::abs(den) < 1e-300 || !std::isfinite(num) || !std::isfinite(den)) return false;
            d.dtau = num / den;
            d.dy.resize(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k)
                d.dy[static_cast<std::size_t>(k)] = u1[static_cast<std::size_t>(k)] + d.dtau * u2[static_cast<std::size_t>(k)];
            // ds = -A^T dy + c dtau + resd
            d.ds = BlockVec::shaped(K, 0.0);
            fadd(w.cobj, d.dtau, d.ds, K);
            for (int k = 0; k < m; ++k) fadd(w.rows[static_cast<std::size_t>(k)], -d.dy[static_cast<std::size_t>(k)], d.ds, K);
            axpy(1.0, resd, d.ds, K);
            // dx = rhs_c - Phi(ds)
            d.dx = BlockVec::shaped(K, 0.0);
            apply_phi(sc, K, d.ds, d.dx);
            for (std::size_t b = 0; b < K.blocks.size(); ++b) {
                if (K.blocks[b].kind == BlockKind::Psd) {
                    DenseMatrix& M = d.dx.mats[b];
                    const DenseMatrix& Rc = rhs_c.mats[b];
                    for (int i = 0; i < M.rows(); ++i)
                        for (int j = 0; j < M.cols(); ++j) M(i, j) = Rc(i, j) - M(i, j);
                } else {
                    for (std::size_t i = 0; i < d.dx.vecs[b].size(); ++i)
                        d.dx.vecs[b][i] = rhs_c.vecs[b][i] - d.dx.vecs[b][i];
                }
            }
            d.dkappa = (rhs_tk - it.kappa * d.dtau) / it.tau;
            return true;
        };

        auto step_length = [&](const Direction& d) {
            double a = 1.0;
            for (std::size_t b = 0; b < K.blocks.size(); ++b) {
                if (K.blocks[b].kind == BlockKind::Psd) {
                    a = std::min(a, step_to_boundary_psd(it.x.mats[b], d.dx.mats[b]));
                    a = std::min(a, step_to_boundary_psd(it.s.mats[b], d.ds.mats[b]));
                } else {
                    for (std::size_t i = 0; i < it.x.vecs[b].size(); ++i) {
                        if (d.dx.vecs[b][i] < 0) a = std::min(a, -it.x.vecs[b][i] / d.dx.vecs[b][i]);
                        if (d.ds.vecs[b][i] < 0) a = std::min(a, -it.s.vecs[b][i] / d.ds.vecs[b][i]);
                    }
                }
            }
            if (d.dtau < 0) a = std::min(a, -it.tau / d.dtau);
            if (d.dkappa < 0) a = std::min(a, -it.kappa / d.dkappa);
            return a;
        };

        // ---- predictor (affine scaling) ----
        BlockVec rhs_c = BlockVec::shaped(K, 0.0);
        for (std::size_t b = 0; b < K.blocks.size(); ++b) {
            if (K.blocks[b].kind == BlockKind::Psd) {
                rhs_c.mats[b] = it.x.mats[b] * -1.0;  // R D R^T with D = -Sigma equals -X
            } else {
                for (std::size_t i = 0; i < rhs_c.vecs[b].size(); ++i) rhs_c.vecs[b][i] = -it.x.vecs[b][i];
            }
        }
        Direction aff;
        if (!solve_direction(rhs_c, -it.tau * it.kappa, aff)) break;
        const double alpha_aff = step_length(aff);

        // Mehrotra centering parameter
        double gap_aff = (it.tau + alpha_aff * aff.dtau) * (it.kappa + alpha_aff * aff.dkappa);
        {
            BlockVec xa = it.x, sa = it.s;
            axpy(alpha_aff, aff.dx, xa, K);
            axpy(alpha_aff, aff.ds, sa, K);
            gap_aff += dot(xa, sa, K);
        }
        const double mu_aff = gap_aff / (K.nu + 1);
        double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
        sigma = std::min(0.999, std::max(1e-8, sigma));

        // ---- corrector rhs in scaled space ----
        for (std::size_t b = 0; b < K.blocks.size(); ++b) {
            if (K.blocks[b].kind == BlockKind::Psd) {
                const int nb = K.blocks[b].size;
                const DenseMatrix& Ri = sc[b].Rinv;
                const DenseMatrix& R = sc[b].R;
                DenseMatrix DXa = Ri * aff.dx.mats[b] * Ri.transpose();
                DenseMatrix DSa = R.transpose() * aff.ds.mats[b] * R;
                DenseMatrix P = DXa * DSa;
                DenseMatrix D(nb, nb);
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) {
                        const double corr = 0.5 * (P(i, j) + P(j, i));
                        double v = -corr;
                        if (i == j) v += sigma * mu - sc[b].sigma[static_cast<std::size_t>(i)] * sc[b].sigma[static_cast<std::size_t>(i)];
                        D(i, j) = 2.0 * v / (sc[b].sigma[static_cast<std::size_t>(i)] + sc[b].sigma[static_cast<std::size_t>(j)]);
                    }
                rhs_c.mats[b] = R * D * R.transpose();
            } else {
                for (std::size_t i = 0; i < rhs_c.vecs[b].size(); ++i) {
                    const double dxa = aff.dx.vecs[b][i] / sc[b].w[i];
                    const double dsa = aff.ds.vecs[b][i] * sc[b].w[i];
                    const double v = sigma * mu - sc[b].lam[i] * sc[b].lam[i] - dxa * dsa;
                    rhs_c.vecs[b][i] = sc[b].w[i] * (v / sc[b].lam[i]);
                }
            }
        }
        const double rhs_tk = sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa;

        Direction dir;
        if (!solve_direction(rhs_c, rhs_tk, dir)) break;
        double alpha = 0.99 * step_length(dir);
        alpha = std::min(alpha, 1.0);
        if (!(alpha > 1e-12)) break;

        axpy(alpha, dir.dx, it.x, K);
        axpy(alpha, dir.ds, it.s, K);
        for (int k = 0; k < m; ++k) it.y[static_cast<std::size_t>(k)] += alpha * dir.dy[static_cast<std::size_t>(k)];
        it.tau += alpha * dir.dtau;
        it.kappa += alpha * dir.dkappa;
    }

    best.status = SdpStatus::NumericalFailure;
    best.iterations = iter;
    return best;
}

std::string dump_sdpa_like(const SdpProblem& prob) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "m %d\n", static_cast<int>(prob.constraints.size()));
    out += buf;
    std::snprintf(buf, sizeof(buf), "nblocks %d\n", static_cast<int>(prob.blocks.size()));
    out += buf;
    out += "blocks";
    for (const auto& b : prob.blocks) {
        const char k = b.kind == BlockKind::Psd ? 's' : (b.kind == BlockKind::Nonneg ? 'l' : 'f');
        std::snprintf(buf, sizeof(buf), " %c%d", k, b.size);
        out += buf;
    }
    out += "\nrhs";
    for (double v : prob.rhs) {
        std::snprintf(buf, sizeof(buf), " %.17g", v);
        out += buf;
    }
    out += "\n";
    auto emit = [&](int cidx, const LinearFunctional& f) {
        for (const auto& e : f.entries) {
            std::snprintf(buf, sizeof(buf), "%d %d %d %d %.17g\n", cidx, e.block + 1, e.i + 1, e.j + 1,
                          e.coeff);
            out += buf;
        }
    };
    emit(0, prob.objective);
    for (std::size_t k = 0; k < prob.constraints.size(); ++k)
        emit(static_cast<int>(k) + 1, prob.constraints[k]);
    return out;
}

}  // namespace roa
