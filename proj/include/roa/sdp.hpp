#pragma once

#include <string>
#include <vector>

#include "roa/linalg.hpp"

namespace roa {

enum class BlockKind { Psd, Nonneg, Free };

struct SdpBlock {
    BlockKind kind;
    int size;
};

// One coefficient of a linear functional over the block variables.
// For PSD blocks (i, j) addresses the symmetric pair with i <= j and `coeff`
// multiplies X_ij once (the matrix form carries coeff/2 on each of the two
// mirrored entries). For Nonneg/Free blocks j must equal i.
struct SdpEntry {
    int block;
    int i;
    int j;
    double coeff;
};

struct LinearFunctional {
    std::vector<SdpEntry> entries;
    void add(int block, int i, int j, double coeff) { entries.push_back({block, i, j, coeff}); }
};

// min <objective, x>  s.t.  <constraint_k, x> = rhs_k,  x in K
struct SdpProblem {
    std::vector<SdpBlock> blocks;
    LinearFunctional objective;
    std::vector<LinearFunctional> constraints;
    std::vector<double> rhs;

    int add_block(BlockKind kind, int size) {
        blocks.push_back({kind, size});
        return static_cast<int>(blocks.size()) - 1;
    }
    void add_constraint(LinearFunctional f, double b) {
        constraints.push_back(std::move(f));
        rhs.push_back(b);
    }
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(SdpStatus s);

struct ToleranceSet {
    double gap = 1e-7;
    double feasibility = 1e-7;
    double psd_slack = 1e-8;
    int max_iterations = 200;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    std::vector<DenseMatrix> primal;  // per block: s x s for Psd, size x 1 otherwise
    std::vector<double> dual;         // per original constraint row
    double objective = 0.0;
    double duality_gap = 0.0;       // relative
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    int iterations = 0;
    // Improving-ray certificate: dual ray y (status Infeasible, b^T y = 1,
    // -A^T y in K*) or primal ray x (status Unbounded).
    std::vector<double> ray;
};

// Homogeneous self-dual embedding with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector, dense Schur-complement normal equations.
SdpSolution solve(const SdpProblem& prob, const ToleranceSet& tol = {});

struct PresolveResult {
    SdpProblem problem;
    std::vector<int> kept_rows;  // indices into the original constraint list
    bool inconsistent = false;   // dependent row with mismatched rhs
    int inconsistent_row = -1;
    std::vector<double> infeasibility_ray;  // over original rows when inconsistent
};

// Drops numerically dependent equality rows (tolerance `tol`), recording the
// row mapping for dual recovery. Detects rank only up to `rank_check_limit`
// rows; beyond that only exact duplicates and zero rows are removed (the SOS
// compiler emits independent rows by construction).
PresolveResult presolve(const SdpProblem& prob, double tol = 1e-10, int rank_check_limit = 1500);

// Line-oriented sparse dump for cross-checking against external solvers;
// constraint 0 is the objective, indices are 1-based.
std::string dump_sdpa_like(const SdpProblem& prob);

}  // namespace roa
