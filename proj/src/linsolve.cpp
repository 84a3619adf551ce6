#include "stiga/linsolve.hpp"

#include "stiga/error.hpp"
#include "stiga/simd/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace stiga {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> block_rhs(const BlockSystem& system) {
    std::vector<double> b(2 * system.rhs.size(), 0.0);
    std::copy(system.rhs.begin(), system.rhs.end(), b.begin());
    return b;
}

void check_system(const BlockSystem& system) {
    const auto n = static_cast<std::size_t>(system.size());
    if (system.operators.K.rows() != system.size() || system.operators.M.rows() != system.size()) {
        throw ArgumentError("block operators have inconsistent sizes");
    }
    if (system.rhs.size() != n) throw ArgumentError("right-hand side length differs from N");
    for (const double v : system.rhs) {
        if (!std::isfinite(v)) throw ArgumentError("right-hand side is not finite");
    }
}

}  // namespace

BlockSystem make_block_system(const DiscreteSystem& discrete) {
    return {discrete.operators, discrete.load, discrete.separable};
}

void block_matvec(const SpaceTimeOperators& ops, std::span<const double> z, std::span<double> out) {
    const auto n = static_cast<std::size_t>(ops.size());
    if (z.size() != 2 * n || out.size() != 2 * n) throw ArgumentError("block matvec dimension mismatch");
    const auto u = z.subspan(0, n);
    const auto v = z.subspan(n, n);
    auto top = out.subspan(0, n);
    auto bottom = out.subspan(n, n);
    ops.W.apply(u, top);
    ops.K.apply_add(1.0, v, top);
    ops.M.apply_add(1.0, v, top);
    ops.K.apply(u, bottom);
    ops.M.apply_add(-1.0, v, bottom);
}

std::vector<double> block_matvec(const SpaceTimeOperators& ops, std::span<const double> z) {
    std::vector<double> out(z.size());
    block_matvec(ops, z, out);
    return out;
}

double relative_residual(const BlockSystem& system, std::span<const double> z) {
    const auto b = block_rhs(system);
    auto r = block_matvec(system.operators, z);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double bnorm = simd::norm2(b);
    const double rnorm = simd::norm2(r);
    if (bnorm == 0.0) return rnorm;
    return rnorm / bnorm;
}

SolveResult solve(const BlockSystem& system, const SolveOptions& options) {
    const auto start = Clock::now();
    check_system(system);
    if (!(options.tol > 0.0)) throw ArgumentError("solver tolerance must be positive");
    const auto n = static_cast<std::size_t>(system.size());
    const std::size_t n2 = 2 * n;
    const int restart = std::max(1, options.restart);
    const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * n2);

    std::unique_ptr<Preconditioner> precond;
    if (system.separable) {
        precond = std::make_unique<FastDiagonalizationPreconditioner>(system.operators.W.left(),
                                                                      system.operators.M.left(), *system.separable);
    } else {
        precond = std::make_unique<IdentityPreconditioner>();
    }
    const std::string method = "gmres(" + std::to_string(restart) + ")+" + precond->name();

    const auto b = block_rhs(system);
    const double bnorm = simd::norm2(b);
    SolveResult result;
    result.report.method = method;
    if (bnorm == 0.0) {
        // the discrete problem is uniquely solvable, so zero data gives zero
        result.u.assign(n, 0.0);
        result.v.assign(n, 0.0);
        result.report.seconds = seconds_since(start);
        return result;
    }

    std::vector<double> x(n2, 0.0);
    if (!options.initial_guess.empty()) {
        if (options.initial_guess.size() != n2) throw ArgumentError("initial guess has wrong length");
        x = options.initial_guess;
    }

    std::vector<std::vector<double>> basis;
    std::vector<double> h(static_cast<std::size_t>((restart + 1) * restart));
    auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i + (restart + 1) * j)]; };
    std::vector<double> cs(static_cast<std::size_t>(restart)), sn(static_cast<std::size_t>(restart));
    std::vector<double> g(static_cast<std::size_t>(restart + 1));
    std::vector<double> r(n2), w(n2), z(n2), y(static_cast<std::size_t>(restart));

    int iterations = 0;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        block_matvec(system.operators, x, r);
        for (std::size_t i = 0; i < n2; ++i) r[i] = b[i] - r[i];
        const double beta = simd::norm2(r);
        const double rel = beta / bnorm;
        best = std::min(best, rel);
        if (rel <= options.tol) break;
        if (iterations >= max_iter) {
            throw ConvergenceError("GMRES did not converge in " + std::to_string(iterations) +
                                       " iterations (best relative residual " + std::to_string(best) + ")",
                                   best, iterations);
        }

        if (basis.empty()) basis.emplace_back(n2);
        for (std::size_t i = 0; i < n2; ++i) basis[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int cols = 0;
        for (int j = 0; j < restart && iterations < max_iter; ++j) {
            precond->apply(basis[static_cast<std::size_t>(j)], z);
            block_matvec(system.operators, z, w);
            // modified Gram-Schmidt, two passes
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const double hij = simd::dot(w, basis[static_cast<std::size_t>(i)]);
                    if (pass == 0) {
                        H(i, j) = hij;
                    } else {
                        H(i, j) += hij;
                    }
                    simd::axpy(-hij, basis[static_cast<std::size_t>(i)], w);
                }
            }
            const double hnext = simd::norm2(w);
            H(j + 1, j) = hnext;
            for (int i = 0; i < j; ++i) {
                const double t = cs[static_cast<std::size_t>(i)] * H(i, j) + sn[static_cast<std::size_t>(i)] * H(i + 1, j);
                H(i + 1, j) = -sn[static_cast<std::size_t>(i)] * H(i, j) + cs[static_cast<std::size_t>(i)] * H(i + 1, j);
                H(i, j) = t;
            }
            const double denom = std::hypot(H(j, j), H(j + 1, j));
            if (denom == 0.0) throw NumericalError("GMRES breakdown: block system is singular");
            cs[static_cast<std::size_t>(j)] = H(j, j) / denom;
            sn[static_cast<std::size_t>(j)] = H(j + 1, j) / denom;
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g[static_cast<std::size_t>(j + 1)] = -sn[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
            g[static_cast<std::size_t>(j)] *= cs[static_cast<std::size_t>(j)];
            ++iterations;
            cols = j + 1;
            const double estimate = std::abs(g[static_cast<std::size_t>(j + 1)]) / bnorm;
            if (estimate <= 0.5 * options.tol || hnext <= 1e-300) break;
            if (basis.size() <= static_cast<std::size_t>(j + 1)) basis.emplace_back(n2);
            auto& next = basis[static_cast<std::size_t>(j + 1)];
            for (std::size_t i = 0; i < n2; ++i) next[i] = w[i] / hnext;
        }
        // back substitution for the least-squares coefficients
        for (int i = cols - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < cols; ++k) s -= H(i, k) * y[static_cast<std::size_t>(k)];
            if (H(i, i) == 0.0) throw NumericalError("GMRES breakdown: singular Hessenberg factor");
            y[static_cast<std::size_t>(i)] = s / H(i, i);
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < cols; ++i) simd::axpy(y[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)], w);
        precond->apply(w, z);
        for (std::size_t i = 0; i < n2; ++i) x[i] += z[i];
    }

    result.u.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    result.v.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
    result.report.iterations = iterations;
    result.report.relative_residual = relative_residual(system, x);
    result.report.seconds = seconds_since(start);
    return result;
}

Eigen::MatrixXd dense_block_matrix(const SpaceTimeOperators& ops) {
    const int n = ops.size();
    if (n > dense_solve_max_dofs) {
        throw GuardError("dense block matrix refuses N = " + std::to_string(n) + " > " +
                         std::to_string(dense_solve_max_dofs));
    }
    const Eigen::MatrixXd w = ops.W.to_dense();
    const Eigen::MatrixXd k = ops.K.to_dense();
    const Eigen::MatrixXd m = ops.M.to_dense();
    Eigen::MatrixXd a(2 * n, 2 * n);
    a << w, k + m, k, -m;
    return a;
}

SolveResult solve_dense(const BlockSystem& system) {
    const auto start = Clock::now();
    check_system(system);
    const Eigen::MatrixXd a = dense_block_matrix(system.operators);
    const auto n = static_cast<Eigen::Index>(system.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = system.rhs[static_cast<std::size_t>(i)];
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw NumericalError("block system is singular");
    const Eigen::VectorXd z = lu.solve(b);
    SolveResult result;
    result.u.assign(z.data(), z.data() + n);
    result.v.assign(z.data() + n, z.data() + 2 * n);
    std::vector<double> all(z.data(), z.data() + 2 * n);
    result.report.iterations = 0;
    result.report.relative_residual = relative_residual(system, all);
    result.report.seconds = seconds_since(start);
    result.report.method = "dense-lu";
    return result;
}

}  // namespace stiga
