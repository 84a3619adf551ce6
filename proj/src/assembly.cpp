#include "stiga/assembly.hpp"

#include "stiga/error.hpp"
#include "stiga/quadrature.hpp"
#include "tabulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stiga {
namespace {

using detail::tabulate;

int resolve_points(int quad_points, int degree) { return quad_points > 0 ? quad_points : degree + 1; }

std::string location(double x, double y, double t) {
    std::ostringstream os;
    os << "(x, y, t) = (" << x << ", " << y << ", " << t << ")";
    return os.str();
}

}  // namespace

SpaceTimeSpace::SpaceTimeSpace(SplineSpace1D x, SplineSpace1D y, SplineSpace1D t, GeometryMap geometry,
                               double final_time)
    : x_(std::move(x)), y_(std::move(y)), t_(std::move(t)), geometry_(geometry), final_time_(final_time) {
    if (!(final_time_ > 0.0)) throw ArgumentError("final time must be positive");
}

SpaceTimeSpace SpaceTimeSpace::uniform(int elements, int degree, GeometryMap geometry, double final_time) {
    const auto kv = uniform_open_knots(elements, degree);
    return SpaceTimeSpace(SplineSpace1D(kv, Constraint::zero_at_both_ends),
                          SplineSpace1D(kv, Constraint::zero_at_both_ends),
                          SplineSpace1D(kv, Constraint::zero_at_left_end), geometry, final_time);
}

double SpaceTimeSpace::mesh_size() const noexcept {
    return std::max({x_.knots().mesh_size(), y_.knots().mesh_size(), t_.knots().mesh_size()});
}

TimeMatrices assemble_time_matrices(const SplineSpace1D& time, double final_time, int quad_points) {
    const auto tab = tabulate(time, resolve_points(quad_points, time.degree()));
    const int n = time.dof_count();
    std::vector<Triplet> w;
    std::vector<Triplet> m;
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        const double wq = tab.rule.weights[q];
        for (int a = 0; a < tab.width; ++a) {
            const int i = time.dof_of_function(tab.first[q] + a);
            if (i < 0) continue;
            for (int b = 0; b < tab.width; ++b) {
                const int j = time.dof_of_function(tab.first[q] + b);
                if (j < 0) continue;
                // t = T tau: d/dt = (1/T) d/dtau and dt = T dtau, so W_t is scale free
                w.push_back({i, j, wq * tab.deriv(q, b) * tab.value(q, a)});
                m.push_back({i, j, final_time * wq * tab.value(q, b) * tab.value(q, a)});
            }
        }
    }
    return {SparseMatrix::from_triplets(n, n, std::move(w)), SparseMatrix::from_triplets(n, n, std::move(m))};
}

SpatialMatrices assemble_univariate_matrices(const SplineSpace1D& space, int quad_points) {
    const auto tab = tabulate(space, resolve_points(quad_points, space.degree()));
    const int n = space.dof_count();
    std::vector<Triplet> k;
    std::vector<Triplet> m;
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        const double wq = tab.rule.weights[q];
        for (int a = 0; a < tab.width; ++a) {
            const int i = space.dof_of_function(tab.first[q] + a);
            if (i < 0) continue;
            for (int b = 0; b < tab.width; ++b) {
                const int j = space.dof_of_function(tab.first[q] + b);
                if (j < 0) continue;
                k.push_back({i, j, wq * tab.deriv(q, b) * tab.deriv(q, a)});
                m.push_back({i, j, wq * tab.value(q, b) * tab.value(q, a)});
            }
        }
    }
    return {SparseMatrix::from_triplets(n, n, std::move(k)), SparseMatrix::from_triplets(n, n, std::move(m))};
}

SpatialMatrices assemble_spatial_matrices(const SplineSpace1D& x, const SplineSpace1D& y,
                                          const GeometryMap& geometry, int quad_points) {
    const auto tx = tabulate(x, resolve_points(quad_points, x.degree()));
    const auto ty = tabulate(y, resolve_points(quad_points, y.degree()));
    const int nx = x.dof_count();
    const int ns = nx * y.dof_count();
    const int wx = tx.width;
    const int wy = ty.width;
    const int local = wx * wy;
    const int px = tx.rule.points_per_span;
    const int py = ty.rule.points_per_span;

    std::vector<Triplet> kt;
    std::vector<Triplet> mt;
    std::vector<double> kloc(static_cast<std::size_t>(local * local));
    std::vector<double> mloc(static_cast<std::size_t>(local * local));
    std::vector<double> val(static_cast<std::size_t>(local));
    std::vector<Vec2> grad(static_cast<std::size_t>(local));
    std::vector<int> dof(static_cast<std::size_t>(local));

    for (std::size_t ey = 0; ey < ty.rule.spans.size(); ++ey) {
        for (std::size_t ex = 0; ex < tx.rule.spans.size(); ++ex) {
            std::fill(kloc.begin(), kloc.end(), 0.0);
            std::fill(mloc.begin(), mloc.end(), 0.0);
            const std::size_t qx0 = ex * static_cast<std::size_t>(px);
            const std::size_t qy0 = ey * static_cast<std::size_t>(py);
            for (int b = 0; b < wy; ++b) {
                for (int a = 0; a < wx; ++a) {
                    const int ix = x.dof_of_function(tx.first[qx0] + a);
                    const int iy = y.dof_of_function(ty.first[qy0] + b);
                    dof[static_cast<std::size_t>(a + wx * b)] = (ix < 0 || iy < 0) ? -1 : ix + nx * iy;
                }
            }
            for (int jy = 0; jy < py; ++jy) {
                const std::size_t qy = qy0 + static_cast<std::size_t>(jy);
                for (int jx = 0; jx < px; ++jx) {
                    const std::size_t qx = qx0 + static_cast<std::size_t>(jx);
                    const Vec2 zeta{tx.rule.nodes[qx], ty.rule.nodes[qy]};
                    const auto jac = geometry.jacobian(zeta);
                    if (!(std::abs(jac.det) > 1e-14)) {
                        std::ostringstream os;
                        os << "singular Jacobian (det = " << jac.det << ") at zeta = (" << zeta[0] << ", "
                           << zeta[1] << ")";
                        throw AssemblyError(os.str());
                    }
                    const double w = tx.rule.weights[qx] * ty.rule.weights[qy] * std::abs(jac.det);
                    for (int b = 0; b < wy; ++b) {
                        for (int a = 0; a < wx; ++a) {
                            const auto l = static_cast<std::size_t>(a + wx * b);
                            val[l] = tx.value(qx, a) * ty.value(qy, b);
                            grad[l] = pullback_gradient(
                                jac, {tx.deriv(qx, a) * ty.value(qy, b), tx.value(qx, a) * ty.deriv(qy, b)});
                        }
                    }
                    for (int i = 0; i < local; ++i) {
                        const auto li = static_cast<std::size_t>(i);
                        for (int j = 0; j < local; ++j) {
                            const auto lj = static_cast<std::size_t>(j);
                            const auto e = li * static_cast<std::size_t>(local) + lj;
                            kloc[e] += w * (grad[lj][0] * grad[li][0] + grad[lj][1] * grad[li][1]);
                            mloc[e] += w * val[lj] * val[li];
                        }
                    }
                }
            }
            for (int i = 0; i < local; ++i) {
                const int gi = dof[static_cast<std::size_t>(i)];
                if (gi < 0) continue;
                for (int j = 0; j < local; ++j) {
                    const int gj = dof[static_cast<std::size_t>(j)];
                    if (gj < 0) continue;
                    const auto e = static_cast<std::size_t>(i * local + j);
                    kt.push_back({gi, gj, kloc[e]});
                    mt.push_back({gi, gj, mloc[e]});
                }
            }
        }
    }
    return {SparseMatrix::from_triplets(ns, ns, std::move(kt)), SparseMatrix::from_triplets(ns, ns, std::move(mt))};
}

SpaceTimeOperators compose_system(SparseMatrix time_derivative, SparseMatrix time_mass, SparseMatrix space_stiffness,
                                  SparseMatrix space_mass) {
    const int nt = time_mass.rows();
    const int ns = space_mass.rows();
    if (time_derivative.rows() != nt || time_derivative.cols() != nt || time_mass.cols() != nt) {
        throw ArgumentError("time matrices must be square of equal size");
    }
    if (space_stiffness.rows() != ns || space_stiffness.cols() != ns || space_mass.cols() != ns) {
        throw ArgumentError("space matrices must be square of equal size");
    }
    auto wt = std::make_shared<const SparseMatrix>(std::move(time_derivative));
    auto mt = std::make_shared<const SparseMatrix>(std::move(time_mass));
    auto ks = std::make_shared<const SparseMatrix>(std::move(space_stiffness));
    auto ms = std::make_shared<const SparseMatrix>(std::move(space_mass));
    return {KroneckerOperator(wt, ms), KroneckerOperator(mt, ks), KroneckerOperator(mt, ms)};
}

std::vector<double> assemble_load(const ScalarField& f, const SpaceTimeSpace& space, int quad_points) {
    const auto& sx = space.x();
    const auto& sy = space.y();
    const auto& st = space.t();
    const auto tx = tabulate(sx, resolve_points(quad_points, sx.degree()));
    const auto ty = tabulate(sy, resolve_points(quad_points, sy.degree()));
    const auto tt = tabulate(st, resolve_points(quad_points, st.degree()));
    const int nx = space.n_x();
    const auto ns = static_cast<std::size_t>(space.n_s());
    const auto nt = static_cast<std::size_t>(space.n_t());
    const double T = space.final_time();
    std::vector<double> load(ns * nt, 0.0);
    if (!f) return load;

    const int px = tx.rule.points_per_span;
    const int py = ty.rule.points_per_span;
    std::vector<double> time_moments(nt);

    for (std::size_t ey = 0; ey < ty.rule.spans.size(); ++ey) {
        for (std::size_t ex = 0; ex < tx.rule.spans.size(); ++ex) {
            for (int jy = 0; jy < py; ++jy) {
                const std::size_t qy = ey * static_cast<std::size_t>(py) + static_cast<std::size_t>(jy);
                for (int jx = 0; jx < px; ++jx) {
                    const std::size_t qx = ex * static_cast<std::size_t>(px) + static_cast<std::size_t>(jx);
                    const Vec2 zeta{tx.rule.nodes[qx], ty.rule.nodes[qy]};
                    const Vec2 xy = space.geometry().map_point(zeta);
                    const double ws = tx.rule.weights[qx] * ty.rule.weights[qy] *
                                      std::abs(space.geometry().jacobian(zeta).det);
                    // time moments g_j = int_0^T f(x, t) b_j(t) dt at this spatial point
                    std::fill(time_moments.begin(), time_moments.end(), 0.0);
                    for (std::size_t qt = 0; qt < tt.rule.size(); ++qt) {
                        const double t = T * tt.rule.nodes[qt];
                        const double fv = f(xy[0], xy[1], t);
                        if (!std::isfinite(fv)) {
                            throw AssemblyError("non-finite forcing value at " + location(xy[0], xy[1], t));
                        }
                        const double wf = T * tt.rule.weights[qt] * fv;
                        for (int c = 0; c < tt.width; ++c) {
                            const int jt = st.dof_of_function(tt.first[qt] + c);
                            if (jt >= 0) time_moments[static_cast<std::size_t>(jt)] += wf * tt.value(qt, c);
                        }
                    }
                    for (int b = 0; b < ty.width; ++b) {
                        const int iy = sy.dof_of_function(ty.first[qy] + b);
                        if (iy < 0) continue;
                        for (int a = 0; a < tx.width; ++a) {
                            const int ix = sx.dof_of_function(tx.first[qx] + a);
                            if (ix < 0) continue;
                            const double bs = ws * tx.value(qx, a) * ty.value(qy, b);
                            const auto is = static_cast<std::size_t>(ix + nx * iy);
                            for (std::size_t jt = 0; jt < nt; ++jt) load[jt * ns + is] += bs * time_moments[jt];
                        }
                    }
                }
            }
        }
    }
    return load;
}

SeparableSpatialModel separable_spatial_model(const SpaceTimeSpace& space, int quad_points) {
    SeparableSpatialModel model{assemble_univariate_matrices(space.x(), quad_points),
                                assemble_univariate_matrices(space.y(), quad_points), 1.0, 1.0, 1.0};
    // parametric averages of det(J) J^{-1} J^{-T} and det(J) over (0,1)^2
    const auto ref = gauss_legendre_reference(8);
    double gx = 0.0;
    double gy = 0.0;
    double m = 0.0;
    for (std::size_t j = 0; j < ref.nodes.size(); ++j) {
        for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
            const Vec2 zeta{0.5 * (1.0 + ref.nodes[i]), 0.5 * (1.0 + ref.nodes[j])};
            const auto jac = space.geometry().jacobian(zeta);
            const double w = 0.25 * ref.weights[i] * ref.weights[j];
            const double det = std::abs(jac.det);
            const auto e0 = pullback_gradient(jac, {1.0, 0.0});
            const auto e1 = pullback_gradient(jac, {0.0, 1.0});
            gx += w * det * (e0[0] * e0[0] + e0[1] * e0[1]);
            gy += w * det * (e1[0] * e1[0] + e1[1] * e1[1]);
            m += w * det;
        }
    }
    model.grad_x_weight = gx;
    model.grad_y_weight = gy;
    model.mass_weight = m;
    return model;
}

DiscreteSystem assemble_system(const SpaceTimeSpace& space, const ScalarField& forcing, int quad_points) {
    auto time = assemble_time_matrices(space.t(), space.final_time(), quad_points);
    auto spatial = assemble_spatial_matrices(space.x(), space.y(), space.geometry(), quad_points);
    auto ops = compose_system(time.derivative, time.mass, spatial.stiffness, spatial.mass);
    auto load = assemble_load(forcing, space, quad_points);
    auto separable = separable_spatial_model(space, quad_points);
    return {std::move(time), std::move(spatial), std::move(ops), std::move(load), std::move(separable)};
}

DenseSpaceTimeSystem assemble_dense_spacetime_oracle(const SpaceTimeSpace& space, const ScalarField& forcing,
                                                     int quad_points) {
    const int N = space.dof_count();
    if (N > dense_oracle_max_dofs) {
        throw GuardError("dense space-time oracle refuses N = " + std::to_string(N) + " > " +
                         std::to_string(dense_oracle_max_dofs));
    }
    const auto& sx = space.x();
    const auto& sy = space.y();
    const auto& st = space.t();
    const auto tx = tabulate(sx, resolve_points(quad_points, sx.degree()));
    const auto ty = tabulate(sy, resolve_points(quad_points, sy.degree()));
    const auto tt = tabulate(st, resolve_points(quad_points, st.degree()));
    const int nx = space.n_x();
    const int ns = space.n_s();
    const double T = space.final_time();

    DenseSpaceTimeSystem out{Eigen::MatrixXd::Zero(N, N), Eigen::MatrixXd::Zero(N, N), Eigen::MatrixXd::Zero(N, N),
                             Eigen::VectorXd::Zero(N)};

    struct Local {
        int dof;
        double value;
        double dt;
        Vec2 grad;
    };
    std::vector<Local> active;
    for (std::size_t qt = 0; qt < tt.rule.size(); ++qt) {
        for (std::size_t qy = 0; qy < ty.rule.size(); ++qy) {
            for (std::size_t qx = 0; qx < tx.rule.size(); ++qx) {
                const Vec2 zeta{tx.rule.nodes[qx], ty.rule.nodes[qy]};
                const auto jac = space.geometry().jacobian(zeta);
                const double w =
                    tx.rule.weights[qx] * ty.rule.weights[qy] * tt.rule.weights[qt] * std::abs(jac.det) * T;
                active.clear();
                for (int c = 0; c < tt.width; ++c) {
                    const int it = st.dof_of_function(tt.first[qt] + c);
                    if (it < 0) continue;
                    for (int b = 0; b < ty.width; ++b) {
                        const int iy = sy.dof_of_function(ty.first[qy] + b);
                        if (iy < 0) continue;
                        for (int a = 0; a < tx.width; ++a) {
                            const int ix = sx.dof_of_function(tx.first[qx] + a);
                            if (ix < 0) continue;
                            const double bx = tx.value(qx, a);
                            const double by = ty.value(qy, b);
                            const double bt = tt.value(qt, c);
                            const Vec2 g = pullback_gradient(jac, {tx.deriv(qx, a) * by * bt, bx * ty.deriv(qy, b) * bt});
                            active.push_back({it * ns + ix + nx * iy, bx * by * bt, bx * by * tt.deriv(qt, c) / T, g});
                        }
                    }
                }
                double fv = 0.0;
                if (forcing) {
                    const auto xy = space.geometry().map_point(zeta);
                    fv = forcing(xy[0], xy[1], T * tt.rule.nodes[qt]);
                }
                for (const auto& bi : active) {
                    for (const auto& bj : active) {
                        out.W(bi.dof, bj.dof) += w * bj.dt * bi.value;
                        out.K(bi.dof, bj.dof) += w * (bj.grad[0] * bi.grad[0] + bj.grad[1] * bi.grad[1]);
                        out.M(bi.dof, bj.dof) += w * bj.value * bi.value;
                    }
                    out.load(bi.dof) += w * fv * bi.value;
                }
            }
        }
    }
    return out;
}

}  // namespace stiga
