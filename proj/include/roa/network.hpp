#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roa/linalg.hpp"
#include "roa/polynomial.hpp"

namespace roa {

// Polynomial network with the stable equilibrium shifted to the origin.
// Every downstream module assumes field(0) = 0.
struct NetworkSystem {
    std::string kind = "custom";  // vdp | ising | custom
    int N = 0;                    // node count
    int m = 1;                    // per-node state dimension
    std::vector<Polynomial> field;
    DenseMatrix adjacency;              // N x N coupling weights
    std::vector<Polynomial> equalities;  // h_c(x) = 0 manifold constraints
    std::vector<double> equilibrium_original;

    // Phase-space metadata carried by Ising builds: enables integration in
    // phase coordinates and the exact eigenvalue diagnostics.
    bool has_phase = false;
    DenseMatrix phase_K;
    double phase_mu = 0.0;
    std::vector<int> phase_pattern;  // 0 -> phi* = 0, 1 -> phi* = pi

    // Quadratic initializer override for systems whose full-space Jacobian is
    // singular on the constraint manifold (Ising lift has N zero modes).
    bool has_init_Q = false;
    DenseMatrix init_Q;

    int dimension() const { return N * m; }
};

struct VdpConfig {
    int N = 5;
    double mean_alpha = 1.0;
    double sigma_alpha = 0.2;  // paper default 0.2 * mean_alpha
    double mean_K = 0.2;
    double sigma_K = 0.04;  // paper default 0.2 * mean_K
    std::uint64_t seed = 1;
};

struct IsingConfig {
    int N = 2;
    DenseMatrix K;             // symmetric, entries in {-1, 0}, zero diagonal
    double mu = 1.6;           // regularization
    std::vector<int> pattern;  // target phases, 0 -> 0, 1 -> pi
};

// K = -1 on ring edges, zero elsewhere.
DenseMatrix ring_adjacency(int N);

// Coupled van der Pol network (n = 2N). Parameters are sampled with the
// given seed and resampled as a whole (up to 100 attempts) until the origin
// is a stable equilibrium.
NetworkSystem build_vdp(const VdpConfig& cfg);

// Ising oscillator network lifted to polynomial coordinates
// x_i = (sin phi~_i, 1 - cos phi~_i) around the target pattern, with circle
// constraints x_i1^2 + x_i2^2 - 2 x_i2 = 0 attached (n = 2N).
NetworkSystem build_ising(const IsingConfig& cfg);

// d field_i / d x_j at the origin via symbolic differentiation.
DenseMatrix jacobian(const NetworkSystem& sys);

// H = -sum_i sum_{j != i} K_ij cos(phi_i - phi_j)
double ising_energy(const IsingConfig& cfg, const std::vector<double>& phi);

// Phase-space Jacobian (N x N) of the Ising network at a {0,pi} pattern;
// equals J(0) - 2 mu I exactly.
DenseMatrix ising_phase_jacobian(const IsingConfig& cfg, const std::vector<int>& pattern);

struct EquilibriumSample {
    std::vector<int> pattern;
    double energy;
    double lambda_max;
};

// Uniform random {0,pi}^N patterns, deduplicated up to a global pi-flip,
// annotated with Hamiltonian energy and spectral abscissa at cfg.mu.
std::vector<EquilibriumSample> sample_equilibria(const IsingConfig& cfg, int count,
                                                 std::uint64_t seed);

}  // namespace roa
