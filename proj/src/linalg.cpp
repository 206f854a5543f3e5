#include "roa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace roa {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix T(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    DenseMatrix R(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < o.cols_; ++j) R(i, j) += a * o(k, j);
        }
    return R;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& o) const {
    DenseMatrix R = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) R.data_[i] += o.data_[i];
    return R;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& o) const {
    DenseMatrix R = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) R.data_[i] -= o.data_[i];
    return R;
}

DenseMatrix DenseMatrix::operator*(double s) const {
    DenseMatrix R = *this;
    for (auto& v : R.data_) v *= s;
    return R;
}

bool DenseMatrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> solve_linear(const DenseMatrix& M, const std::vector<double>& b) {
    const int n = M.rows();
    if (M.cols() != n) throw std::invalid_argument("solve_linear requires a square matrix");
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("right-hand side length mismatch");

    DenseMatrix A = M;
    std::vector<double> x = b;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);

    double scale = A.max_abs();
    if (scale == 0.0) throw SingularMatrixError("zero matrix");

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(A(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= 1e-14 * scale) throw SingularMatrixError("matrix is singular to working precision");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(piv)]);
        }
        const double inv = 1.0 / A(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) * inv;
            if (f == 0.0) continue;
            A(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            x[static_cast<std::size_t>(i)] -= f * x[static_cast<std::size_t>(k)];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / A(i, i);
    }
    return x;
}

SymEigResult sym_eig(const DenseMatrix& M) {
    const int n = M.rows();
    if (M.cols() != n) throw std::invalid_argument("sym_eig requires a square matrix");
    if (!M.is_symmetric(1e-12 * std::max(1.0, M.max_abs())))
        throw std::invalid_argument("sym_eig requires a symmetric matrix");

    DenseMatrix A = M;
    DenseMatrix V = DenseMatrix::identity(n);

    auto offdiag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(1.0, A.max_abs());
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (offdiag() <= 1e-13 * scale * n) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) < A(b, b); });

    SymEigResult r;
    r.eigenvalues.resize(static_cast<std::size_t>(n));
    r.eigenvectors = DenseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        r.eigenvalues[static_cast<std::size_t>(j)] = A(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
        for (int i = 0; i < n; ++i) r.eigenvectors(i, j) = V(i, order[static_cast<std::size_t>(j)]);
    }
    return r;
}

namespace {

// Francis double-shift QR on an upper Hessenberg matrix; returns eigenvalue
// real parts. Adapted from the classic EISPACK hqr scheme.
std::vector<double> hessenberg_qr_real_parts(DenseMatrix H, int sweep_cap) {
    const int n = H.rows();
    std::vector<double> re(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return re;

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j < n; ++j) anorm += std::abs(H(i, j));
    if (anorm == 0.0) return re;

    int nn = n - 1;
    double t = 0.0;
    int total_iter = 0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                const double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
                const double cmp = (s == 0.0) ? anorm : s;
                if (std::abs(H(l, l - 1)) <= 1e-16 * cmp) {
                    H(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = H(nn, nn);
            if (l == nn) {
                re[static_cast<std::size_t>(nn--)] = x + t;
                break;
            }
            double y = H(nn - 1, nn - 1);
            double w = H(nn, nn - 1) * H(nn - 1, nn);
            if (l == nn - 1) {
                const double p = 0.5 * (y - x);
                const double q = p * p + w;
                const double z = std::sqrt(std::abs(q));
                x += t;
                if (q >= 0.0) {
                    const double zz = p + (p >= 0 ? z : -z);
                    re[static_cast<std::size_t>(nn)] = x + zz;
                    re[static_cast<std::size_t>(nn - 1)] =
                        (zz != 0.0) ? x - w / zz : x + zz;
                } else {
                    re[static_cast<std::size_t>(nn)] = x + p;
                    re[static_cast<std::size_t>(nn - 1)] = x + p;
                }
                nn -= 2;
                break;
            }
            if (++total_iter > sweep_cap)
                throw EigenConvergenceError("QR iteration did not converge within the sweep cap");
            if (its == 10 || its == 20) {
                // exceptional shift
                t += x;
                for (int i = 0; i <= nn; ++i) H(i, i) -= x;
                const double s = std::abs(H(nn, nn - 1)) + std::abs(H(nn - 1, nn - 2));
                y = x = 0.75 * s;
                w = -0.4375 * s * s;
            }
            ++its;
            int m;
            double p = 0, q = 0, r = 0;
            for (m = nn - 2; m >= l; --m) {
                const double z = H(m, m);
                const double rr = x - z;
                const double ss = y - z;
                p = (rr * ss - w) / H(m + 1, m) + H(m, m + 1);
                q = H(m + 1, m + 1) - z - rr - ss;
                r = H(m + 2, m + 1);
                const double sc = std::abs(p) + std::abs(q) + std::abs(r);
                p /= sc;
                q /= sc;
                r /= sc;
                if (m == l) break;
                const double u = std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r));
                const double v = std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(H(m, m)) +
                                                std::abs(H(m + 1, m + 1)));
                if (u <= 1e-16 * v) break;
            }
            for (int i = m + 2; i <= nn; ++i) H(i, i - 2) = 0.0;
            for (int i = m + 3; i <= nn; ++i) H(i, i - 3) = 0.0;
            for (int k = m; k <= nn - 1; ++k) {
                if (k != m) {
                    p = H(k, k - 1);
                    q = H(k + 1, k - 1);
                    r = (k != nn - 1) ? H(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                double s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0.0) continue;
                if (k == m) {
                    if (l != m) H(k, k - 1) = -H(k, k - 1);
                } else {
                    H(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                double z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {
                    double pp = H(k, j) + q * H(k + 1, j);
                    if (k != nn - 1) {
                        pp += r * H(k + 2, j);
                        H(k + 2, j) -= pp * z;
                    }
                    H(k + 1, j) -= pp * y;
                    H(k, j) -= pp * x;
                }
                const int mmin = (nn < k + 3) ? nn : k + 3;
                for (int i = l; i <= mmin; ++i) {
                    double pp = x * H(i, k) + y * H(i, k + 1);
                    if (k != nn - 1) {
                        pp += z * H(i, k + 2);
                        H(i, k + 2) -= pp * r;
                    }
                    H(i, k + 1) -= pp * q;
                    H(i, k) -= pp;
                }
            }
        } while (l < nn - 1);
    }
    return re;
}

DenseMatrix to_hessenberg(DenseMatrix A) {
    const int n = A.rows();
    for (int k = 1; k < n - 1; ++k) {
        // pick the largest entry below the subdiagonal as pivot
        int piv = k;
        double best = std::abs(A(k, k - 1));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k - 1)) > best) {
                best = std::abs(A(i, k - 1));
                piv = i;
            }
        if (best == 0.0) continue;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            for (int i = 0; i < n; ++i) std::swap(A(i, k), A(i, piv));
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k - 1) / A(k, k - 1);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) A(i, j) -= f * A(k, j);
            for (int j = 0; j < n; ++j) A(j, k) += f * A(j, i);
        }
        for (int i = k + 1; i < n; ++i) A(i, k - 1) = 0.0;
    }
    return A;
}

}  // namespace

std::vector<double> eig_real_parts(const DenseMatrix& M) {
    const int n = M.rows();
    if (M.cols() != n) throw std::invalid_argument("eigenvalues require a square matrix");
    if (n == 0) return {};
    if (n == 1) return {M(0, 0)};
    DenseMatrix H = to_hessenberg(M);
    return hessenberg_qr_real_parts(std::move(H), 100 * n);
}

double gen_eig_max_real(const DenseMatrix& M) {
    const auto re = eig_real_parts(M);
    double best = re.empty() ? 0.0 : re[0];
    for (double v : re) best = std::max(best, v);
    return best;
}

DenseMatrix solve_lyapunov(const DenseMatrix& J) {
    const int n = J.rows();
    if (J.cols() != n) throw std::invalid_argument("solve_lyapunov requires a square matrix");
    if (gen_eig_max_real(J) >= 0.0)
        throw std::invalid_argument("solve_lyapunov requires a Hurwitz matrix");

    // (I (x) J + J (x) I) vec(Q) = -vec(I), row-major vec
    const int N2 = n * n;
    DenseMatrix K(N2, N2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int row = i * n + j;
            for (int k = 0; k < n; ++k) {
                K(row, i * n + k) += J(j, k);  // Q J^T part
                K(row, k * n + j) += J(i, k);  // J Q part
            }
        }
    std::vector<double> rhs(static_cast<std::size_t>(N2), 0.0);
    for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i * n + i)] = -1.0;
    const auto q = solve_linear(K, rhs);

    DenseMatrix Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = q[static_cast<std::size_t>(i * n + j)];
    // symmetrize away round-off
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (Q(i, j) + Q(j, i));
            Q(i, j) = Q(j, i) = v;
        }
    const auto eig = sym_eig(Q);
    if (eig.eigenvalues.front() <= 0.0)
        throw std::runtime_error("Lyapunov solve produced an indefinite matrix");
    return Q;
}

DenseMatrix cholesky(const DenseMatrix& M, double floor) {
    const int n = M.rows();
    DenseMatrix L(n, n);
    for (int j = 0; j < n; ++j) {
        double d = M(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= floor) throw SingularMatrixError("matrix is not positive definite");
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        const double inv = 1.0 / ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = M(i, j);
            const double* Li = &L(i, 0);
            const double* Lj = &L(j, 0);
            for (int k = 0; k < j; ++k) s -= Li[k] * Lj[k];
            L(i, j) = s * inv;
        }
    }
    return L;
}

}  // namespace roa
