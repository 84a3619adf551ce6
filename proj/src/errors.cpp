#include "stiga/errors.hpp"

#include "stiga/error.hpp"
#include "tabulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace stiga {

DiscreteSolution::DiscreteSolution(SpaceTimeSpace space, std::vector<double> u, std::vector<double> v)
    : space_(std::move(space)), u_(std::move(u)), v_(std::move(v)) {
    const auto n = static_cast<std::size_t>(space_.dof_count());
    if (u_.size() != n || v_.size() != n) throw ArgumentError("solution coefficients must have length N");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(u_[i]) || !std::isfinite(v_[i])) throw ArgumentError("solution coefficients are not finite");
    }
}

PointEvaluation eval_solution(const DiscreteSolution& sol, Field field, const Vec2& zeta, double tau) {
    const auto& space = sol.space();
    const auto& c = sol.coefficients(field);
    const auto dx = eval_basis_derivs(space.x().knots(), zeta[0], 1);
    const auto dy = eval_basis_derivs(space.y().knots(), zeta[1], 1);
    const auto dt = eval_basis_derivs(space.t().knots(), tau, 1);
    const int nx = space.n_x();
    const auto ns = static_cast<std::size_t>(space.n_s());
    double val = 0.0;
    Vec2 pgrad{0.0, 0.0};
    double dtau = 0.0;
    for (int k = 0; k < dt.width(); ++k) {
        const int it = space.t().dof_of_function(dt.first() + k);
        if (it < 0) continue;
        for (int b = 0; b < dy.width(); ++b) {
            const int iy = space.y().dof_of_function(dy.first() + b);
            if (iy < 0) continue;
            for (int a = 0; a < dx.width(); ++a) {
                const int ix = space.x().dof_of_function(dx.first() + a);
                if (ix < 0) continue;
                const double coef = c[static_cast<std::size_t>(it) * ns + static_cast<std::size_t>(ix + nx * iy)];
                val += coef * dx(0, a) * dy(0, b) * dt(0, k);
                pgrad[0] += coef * dx(1, a) * dy(0, b) * dt(0, k);
                pgrad[1] += coef * dx(0, a) * dy(1, b) * dt(0, k);
                dtau += coef * dx(0, a) * dy(0, b) * dt(1, k);
            }
        }
    }
    return {val, space.geometry().pullback_gradient(zeta, pgrad), dtau / space.final_time()};
}

ErrorReport error_norms(const DiscreteSolution& sol, const ManufacturedProblem& problem, int quad_points) {
    const auto& space = sol.space();
    const auto& sx = space.x();
    const auto& sy = space.y();
    const auto& st = space.t();
    const int p = std::max({sx.degree(), sy.degree(), st.degree()});
    const int points = quad_points > 0 ? quad_points : p + 2;
    const auto tx = detail::tabulate(sx, points);
    const auto ty = detail::tabulate(sy, points);
    const auto tt = detail::tabulate(st, points);
    const int nx = space.n_x();
    const auto ns = static_cast<std::size_t>(space.n_s());
    const auto nt = static_cast<std::size_t>(space.n_t());
    const double T = space.final_time();
    const auto& geom = space.geometry();

    // per spatial point: time coefficient vectors of value and gradient
    std::vector<double> cu(nt), cux(nt), cuy(nt), cv(nt), cvx(nt), cvy(nt);
    double num_u1 = 0.0, den_u1 = 0.0, num_u2 = 0.0, den_u2 = 0.0;
    double num_v1 = 0.0, den_v1 = 0.0, num_v2 = 0.0, den_v2 = 0.0;

    const int px = tx.rule.points_per_span;
    const int py = ty.rule.points_per_span;
    for (std::size_t ey = 0; ey < ty.rule.spans.size(); ++ey) {
        for (std::size_t ex = 0; ex < tx.rule.spans.size(); ++ex) {
            for (int jy = 0; jy < py; ++jy) {
                const std::size_t qy = ey * static_cast<std::size_t>(py) + static_cast<std::size_t>(jy);
                for (int jx = 0; jx < px; ++jx) {
                    const std::size_t qx = ex * static_cast<std::size_t>(px) + static_cast<std::size_t>(jx);
                    const Vec2 zeta{tx.rule.nodes[qx], ty.rule.nodes[qy]};
                    const auto jac = geom.jacobian(zeta);
                    const Vec2 xy = geom.map_point(zeta);
                    const double ws = tx.rule.weights[qx] * ty.rule.weights[qy] * std::abs(jac.det);
                    std::fill(cu.begin(), cu.end(), 0.0);
                    std::fill(cux.begin(), cux.end(), 0.0);
                    std::fill(cuy.begin(), cuy.end(), 0.0);
                    std::fill(cv.begin(), cv.end(), 0.0);
                    std::fill(cvx.begin(), cvx.end(), 0.0);
                    std::fill(cvy.begin(), cvy.end(), 0.0);
                    for (int b = 0; b < ty.width; ++b) {
                        const int iy = sy.dof_of_function(ty.first[qy] + b);
                        if (iy < 0) continue;
                        for (int a = 0; a < tx.width; ++a) {
                            const int ix = sx.dof_of_function(tx.first[qx] + a);
                            if (ix < 0) continue;
                            const double bval = tx.value(qx, a) * ty.value(qy, b);
                            const Vec2 g = pullback_gradient(
                                jac, {tx.deriv(qx, a) * ty.value(qy, b), tx.value(qx, a) * ty.deriv(qy, b)});
                            const auto is = static_cast<std::size_t>(ix + nx * iy);
                            for (std::size_t it = 0; it < nt; ++it) {
                                const double uc = sol.u()[it * ns + is];
                                const double vc = sol.v()[it * ns + is];
                                cu[it] += bval * uc;
                                cux[it] += g[0] * uc;
                                cuy[it] += g[1] * uc;
                                cv[it] += bval * vc;
                                cvx[it] += g[0] * vc;
                                cvy[it] += g[1] * vc;
                            }
                        }
                    }
                    for (std::size_t qt = 0; qt < tt.rule.size(); ++qt) {
                        const double t = T * tt.rule.nodes[qt];
                        const double w = ws * T * tt.rule.weights[qt];
                        double uh = 0.0, uhx = 0.0, uhy = 0.0, uht = 0.0;
                        double vh = 0.0, vhx = 0.0, vhy = 0.0;
                        for (int c = 0; c < tt.width; ++c) {
                            const int it = st.dof_of_function(tt.first[qt] + c);
                            if (it < 0) continue;
                            const auto k = static_cast<std::size_t>(it);
                            const double bt = tt.value(qt, c);
                            const double dbt = tt.deriv(qt, c) / T;
                            uh += bt * cu[k];
                            uhx += bt * cux[k];
                            uhy += bt * cuy[k];
                            uht += dbt * cu[k];
                            vh += bt * cv[k];
                            vhx += bt * cvx[k];
                            vhy += bt * cvy[k];
                        }
                        const double ue = problem.u(xy[0], xy[1], t);
                        const Vec2 gue = problem.grad_u(xy[0], xy[1], t);
                        const double ute = problem.dt_u(xy[0], xy[1], t);
                        const double ve = problem.v(xy[0], xy[1], t);
                        const Vec2 gve = problem.grad_v(xy[0], xy[1], t);

                        const double eu = ue - uh;
                        const double eux = gue[0] - uhx;
                        const double euy = gue[1] - uhy;
                        const double eut = ute - uht;
                        const double ev = ve - vh;
                        const double evx = gve[0] - vhx;
                        const double evy = gve[1] - vhy;
                        num_u1 += w * (eux * eux + euy * euy + eut * eut);
                        den_u1 += w * (gue[0] * gue[0] + gue[1] * gue[1] + ute * ute);
                        num_u2 += w * eu * eu;
                        den_u2 += w * ue * ue;
                        num_v1 += w * (evx * evx + evy * evy);
                        den_v1 += w * (gve[0] * gve[0] + gve[1] * gve[1]);
                        num_v2 += w * ev * ev;
                        den_v2 += w * ve * ve;
                    }
                }
            }
        }
    }
    for (const double den : {den_u1, den_u2, den_v1, den_v2}) {
        if (!(den >= 1e-14)) throw NumericalError("exact-solution norm below 1e-14; relative error undefined");
    }
    ErrorReport r;
    r.e_u1 = std::sqrt(num_u1 / den_u1);
    r.e_u2 = std::sqrt(num_u2 / den_u2);
    r.e_v1 = std::sqrt(num_v1 / den_v1);
    r.e_v2 = std::sqrt(num_v2 / den_v2);
    r.h = space.mesh_size();
    r.p = p;
    r.dof = 2L * space.dof_count();
    return r;
}

std::optional<double> observed_rate(double coarse, double fine) {
    if (!(coarse > 0.0) || !(fine > 0.0) || !std::isfinite(coarse) || !std::isfinite(fine)) return std::nullopt;
    return std::log2(coarse / fine);
}

std::vector<RatePair> convergence_rates(std::span<const ErrorReport> reports) {
    if (reports.size() < 2) throw ArgumentError("convergence rates need at least two error reports");
    std::vector<RatePair> rates;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const auto& a = reports[i - 1];
        const auto& b = reports[i];
        RatePair r;
        if (std::abs(a.h - 2.0 * b.h) <= 1e-12 * a.h) {
            r.u1 = observed_rate(a.e_u1, b.e_u1);
            r.u2 = observed_rate(a.e_u2, b.e_u2);
            r.v1 = observed_rate(a.e_v1, b.e_v1);
            r.v2 = observed_rate(a.e_v2, b.e_v2);
        }
        rates.push_back(r);
    }
    return rates;
}

double infsup_constant(const Eigen::MatrixXd& W, const Eigen::MatrixXd& K, const Eigen::MatrixXd& M) {
    const Eigen::Index n = W.rows();
    if (W.cols() != n || K.rows() != n || K.cols() != n || M.rows() != n || M.cols() != n) {
        throw ArgumentError("inf-sup matrices must be square of equal size");
    }
    Eigen::MatrixXd a(2 * n, 2 * n);
    a << W, K + M, K, -M;

    const Eigen::LLT<Eigen::MatrixXd> kfac(K);
    if (kfac.info() != Eigen::Success) throw NumericalError("stiffness Gram matrix is rank deficient");
    const Eigen::MatrixXd gu = W.transpose() * kfac.solve(W) + K;
    const Eigen::LLT<Eigen::MatrixXd> gufac(0.5 * (gu + gu.transpose()));
    if (gufac.info() != Eigen::Success) throw NumericalError("trial Gram matrix is rank deficient");

    // L_W^{-1} A L_V^{-T} with G_W = L_W L_W^T and G_V = L_V L_V^T block diagonal
    const Eigen::MatrixXd lk = kfac.matrixL();
    const Eigen::MatrixXd lu = gufac.matrixL();
    Eigen::MatrixXd lw = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    lw.topLeftCorner(n, n) = lk;
    lw.bottomRightCorner(n, n) = lk;
    Eigen::MatrixXd lv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    lv.topLeftCorner(n, n) = lu;
    lv.bottomRightCorner(n, n) = lk;
    const Eigen::MatrixXd left = lw.triangularView<Eigen::Lower>().solve(a);
    const Eigen::MatrixXd scaled = lv.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
    return svd.singularValues().minCoeff();
}

double discrete_infsup_constant(const SpaceTimeSpace& space) {
    if (space.dof_count() > infsup_max_dofs) {
        throw GuardError("inf-sup computation refuses N = " + std::to_string(space.dof_count()) + " > " +
                         std::to_string(infsup_max_dofs));
    }
    const auto time = assemble_time_matrices(space.t(), space.final_time());
    const auto spatial = assemble_spatial_matrices(space.x(), space.y(), space.geometry());
    const auto ops = compose_system(time.derivative, time.mass, spatial.stiffness, spatial.mass);
    return infsup_constant(ops.W.to_dense(), ops.K.to_dense(), ops.M.to_dense());
}

std::vector<double> project_l2(const SpaceTimeSpace& space, const ScalarField& f, int quad_points) {
    const int points = quad_points > 0 ? quad_points : space.t().degree() + 2;
    auto rhs = assemble_load(f, space, points);
    const auto time = assemble_time_matrices(space.t(), space.final_time(), points);
    const auto spatial = assemble_spatial_matrices(space.x(), space.y(), space.geometry(), points);

    const Eigen::LLT<Eigen::MatrixXd> mt(time.mass.to_dense());
    Eigen::SparseMatrix<double> ms(spatial.mass.rows(), spatial.mass.cols());
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < spatial.mass.rows(); ++i) {
        for (int k = spatial.mass.row_ptr()[i]; k < spatial.mass.row_ptr()[i + 1]; ++k) {
            trip.emplace_back(i, spatial.mass.col_index()[k], spatial.mass.values()[k]);
        }
    }
    ms.setFromTriplets(trip.begin(), trip.end());
    const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> msf(ms);
    if (mt.info() != Eigen::Success || msf.info() != Eigen::Success) {
        throw NumericalError("mass matrix factorization failed");
    }
    // (M_t (x) M_s)^{-1} = M_t^{-1} (x) M_s^{-1}: solve in space per column, then in time per row
    const Eigen::Index ns = space.n_s();
    const Eigen::Index nt = space.n_t();
    Eigen::Map<Eigen::MatrixXd> c(rhs.data(), ns, nt);
    for (Eigen::Index j = 0; j < nt; ++j) c.col(j) = msf.solve(Eigen::VectorXd(c.col(j)));
    const Eigen::MatrixXd ct = mt.solve(Eigen::MatrixXd(c.transpose()));
    c = ct.transpose();
    return rhs;
}

}  // namespace stiga
