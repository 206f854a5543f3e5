#include "roa/network.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "roa/rng.hpp"

namespace roa {

DenseMatrix ring_adjacency(int N) {
    DenseMatrix K(N, N);
    if (N == 2) {
        K(0, 1) = K(1, 0) = -1.0;
        return K;
    }
    for (int i = 0; i < N; ++i) {
        K(i, (i + 1) % N) = -1.0;
        K((i + 1) % N, i) = -1.0;
    }
    return K;
}

NetworkSystem build_vdp(const VdpConfig& cfg) {
    if (cfg.N < 1) throw std::invalid_argument("vdp: N must be positive");
    if (cfg.sigma_alpha < 0 || cfg.sigma_K < 0)
        throw std::invalid_argument("vdp: sigmas must be non-negative");

    const int N = cfg.N;
    const int n = 2 * N;
    Rng rng(cfg.seed);

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<double> alpha(static_cast<std::size_t>(N));
        DenseMatrix K(N, N);
        for (int i = 0; i < N; ++i) alpha[static_cast<std::size_t>(i)] = rng.normal(cfg.mean_alpha, cfg.sigma_alpha);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (i != j) K(i, j) = rng.normal(cfg.mean_K, cfg.sigma_K);

        NetworkSystem sys;
        sys.kind = "vdp";
        sys.N = N;
        sys.m = 2;
        sys.adjacency = K;
        sys.equilibrium_original.assign(static_cast<std::size_t>(n), 0.0);
        sys.field.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < N; ++i) {
            const Polynomial xi1 = Polynomial::variable(n, 2 * i);
            const Polynomial xi2 = Polynomial::variable(n, 2 * i + 1);
            sys.field.push_back(-xi2);
            Polynomial f2 = alpha[static_cast<std::size_t>(i)] * (xi1 * xi1 * xi2 - xi2) + xi1;
            for (int j = 0; j < N; ++j) {
                if (j == i || K(i, j) == 0.0) continue;
                const Polynomial xj1 = Polynomial::variable(n, 2 * j);
                f2 += (K(i, j) / N) * (xj1 - xi1);
            }
            sys.field.push_back(f2);
        }
        if (gen_eig_max_real(jacobian(sys)) < 0.0) return sys;
    }
    throw std::runtime_error("vdp: no stable parameter realization within 100 attempts");
}

NetworkSystem build_ising(const IsingConfig& cfg) {
    const int N = cfg.N;
    if (N < 1) throw std::invalid_argument("ising: N must be positive");
    if (cfg.K.rows() != N || cfg.K.cols() != N)
        throw std::invalid_argument("ising: adjacency must be N x N");
    if (static_cast<int>(cfg.pattern.size()) != N)
        throw std::invalid_argument("ising: pattern length must equal N");
    for (int v : cfg.pattern)
        if (v != 0 && v != 1) throw std::invalid_argument("ising: pattern entries must be 0 or 1");
    if (cfg.mu < 0) throw std::invalid_argument("ising: mu must be non-negative");
    for (int i = 0; i < N; ++i) {
        if (cfg.K(i, i) != 0.0) throw std::invalid_argument("ising: adjacency diagonal must be zero");
        for (int j = 0; j < N; ++j) {
            if (cfg.K(i, j) != cfg.K(j, i)) throw std::invalid_argument("ising: adjacency must be symmetric");
            if (cfg.K(i, j) != 0.0 && cfg.K(i, j) != -1.0)
                throw std::invalid_argument("ising: adjacency entries must be -1 or 0");
        }
    }

    const int n = 2 * N;
    NetworkSystem sys;
    sys.kind = "ising";
    sys.N = N;
    sys.m = 2;
    sys.adjacency = cfg.K;
    sys.has_phase = true;
    sys.phase_K = cfg.K;
    sys.phase_mu = cfg.mu;
    sys.phase_pattern = cfg.pattern;
    sys.equilibrium_original.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        sys.equilibrium_original[static_cast<std::size_t>(i)] =
            cfg.pattern[static_cast<std::size_t>(i)] ? 3.14159265358979323846 : 0.0;

    // phase rate in lifted deviation coordinates; the {0,pi} offsets fold
    // into sign flips s_ij = cos(phi*_j - phi*_i)
    std::vector<Polynomial> phase_rate;
    phase_rate.reserve(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        const Polynomial xi1 = Polynomial::variable(n, 2 * i);
        const Polynomial xi2 = Polynomial::variable(n, 2 * i + 1);
        const Polynomial ci = Polynomial::constant(n, 1.0) - xi2;  // cos deviation
        Polynomial g(n);
        for (int j = 0; j < N; ++j) {
            if (j == i || cfg.K(i, j) == 0.0) continue;
            const Polynomial xj1 = Polynomial::variable(n, 2 * j);
            const Polynomial xj2 = Polynomial::variable(n, 2 * j + 1);
            const Polynomial cj = Polynomial::constant(n, 1.0) - xj2;
            const double s_ij =
                (cfg.pattern[static_cast<std::size_t>(i)] == cfg.pattern[static_cast<std::size_t>(j)]) ? 1.0 : -1.0;
            g += (cfg.K(i, j) * s_ij) * (xj1 * ci - cj * xi1);
        }
        g -= (2.0 * cfg.mu) * (xi1 * ci);
        phase_rate.push_back(g);
    }

    sys.field.reserve(static_cast<std::size_t>(n));
    sys.equalities.reserve(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        const Polynomial xi1 = Polynomial::variable(n, 2 * i);
        const Polynomial xi2 = Polynomial::variable(n, 2 * i + 1);
        const Polynomial ci = Polynomial::constant(n, 1.0) - xi2;
        sys.field.push_back(ci * phase_rate[static_cast<std::size_t>(i)]);
        sys.field.push_back(xi1 * phase_rate[static_cast<std::size_t>(i)]);
        sys.equalities.push_back(xi1 * xi1 + xi2 * xi2 - 2.0 * xi2);
    }

    // quadratic initializer from the phase-space Jacobian when stable: the
    // lifted Jacobian carries N zero modes transverse to the manifold, so the
    // full-space Lyapunov equation is unsolvable
    DenseMatrix Jphi = ising_phase_jacobian(cfg, cfg.pattern);
    if (gen_eig_max_real(Jphi) < 0.0) {
        DenseMatrix Qphi = solve_lyapunov(Jphi);
        double diag_mean = 0.0;
        for (int i = 0; i < N; ++i) diag_mean += Qphi(i, i);
        diag_mean /= N;
        DenseMatrix Q(n, n);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) Q(2 * i, 2 * j) = Qphi(i, j);
            Q(2 * i + 1, 2 * i + 1) = diag_mean;
        }
        sys.has_init_Q = true;
        sys.init_Q = Q;
    }
    return sys;
}

DenseMatrix jacobian(const NetworkSystem& sys) {
    const int n = sys.dimension();
    DenseMatrix J(n, n);
    for (int i = 0; i < n; ++i) {
        const Polynomial& fi = sys.field[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            Monomial mj(n);
            mj.exponents[static_cast<std::size_t>(j)] = 1;
            J(i, j) = fi.coefficient(mj);
        }
    }
    return J;
}

double ising_energy(const IsingConfig& cfg, const std::vector<double>& phi) {
    if (static_cast<int>(phi.size()) != cfg.N) throw std::invalid_argument("phase vector length mismatch");
    double H = 0.0;
    for (int i = 0; i < cfg.N; ++i)
        for (int j = 0; j < cfg.N; ++j) {
            if (j == i) continue;
            H -= cfg.K(i, j) * std::cos(phi[static_cast<std::size_t>(i)] - phi[static_cast<std::size_t>(j)]);
        }
    return H;
}

DenseMatrix ising_phase_jacobian(const IsingConfig& cfg, const std::vector<int>& pattern) {
    const int N = cfg.N;
    DenseMatrix J(N, N);
    for (int i = 0; i < N; ++i) {
        double diag = -2.0 * cfg.mu;  // cos(2 phi*) = 1 at {0, pi}
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            const double c =
                (pattern[static_cast<std::size_t>(i)] == pattern[static_cast<std::size_t>(j)]) ? 1.0 : -1.0;
            J(i, j) = cfg.K(i, j) * c;
            diag -= cfg.K(i, j) * c;
        }
        J(i, i) = diag;
    }
    return J;
}

std::vector<EquilibriumSample> sample_equilibria(const IsingConfig& cfg, int count,
                                                 std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample count must be positive");
    Rng rng(seed);
    std::set<std::vector<int>> seen;
    std::vector<EquilibriumSample> out;
    for (int c = 0; c < count; ++c) {
        std::vector<int> pattern(static_cast<std::size_t>(cfg.N));
        for (int i = 0; i < cfg.N; ++i) pattern[static_cast<std::size_t>(i)] = (rng.next_u64() >> 13) & 1;
        // canonical representative under the global pi-flip
        std::vector<int> canon = pattern;
        if (!canon.empty() && canon[0] == 1)
            for (auto& v : canon) v = 1 - v;
        if (!seen.insert(canon).second) continue;

        std::vector<double> phi(static_cast<std::size_t>(cfg.N));
        for (int i = 0; i < cfg.N; ++i)
            phi[static_cast<std::size_t>(i)] = canon[static_cast<std::size_t>(i)] ? 3.14159265358979323846 : 0.0;
        EquilibriumSample s;
        s.pattern = canon;
        s.energy = ising_energy(cfg, phi);
        s.lambda_max = gen_eig_max_real(ising_phase_jacobian(cfg, canon));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace roa
