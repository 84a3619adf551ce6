#include "stiga/problems.hpp"

#include "stiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace stiga {
namespace {

constexpr double pi = std::numbers::pi;

// c * X^i * Y^j terms of a polynomial in X = x^2, Y = y^2.
struct Term {
    int i;
    int j;
    double c;
};

template <std::size_t Size>
double eval_even(const std::array<Term, Size>& terms, double X, double Y) {
    std::array<double, 8> px{};
    std::array<double, 8> py{};
    px[0] = py[0] = 1.0;
    for (std::size_t k = 1; k < px.size(); ++k) {
        px[k] = px[k - 1] * X;
        py[k] = py[k - 1] * Y;
    }
    double s = 0.0;
    for (const auto& t : terms) s += t.c * px[static_cast<std::size_t>(t.i)] * py[static_cast<std::size_t>(t.j)];
    return s;
}

// Factored derivatives of u = t x^3 y^3 g^3 h^3, g = x^2+y^2-1, h = x^2+y^2-4,
// obtained by symbolic differentiation:
//   u_x     = 3 t x^2 y^3 g^2 h^2 Q(X, Y)
//   Lap u   = 6 t x y g h P(X, Y)
//   (Lap u)_x = 6 t y R(X, Y)
//   Lap^2 u = 24 t x y S(X, Y)
constexpr std::array<Term, 6> q_terms{{{0, 0, 4.0}, {0, 1, -5.0}, {0, 2, 1.0}, {1, 0, -15.0}, {1, 1, 6.0}, {2, 0, 5.0}}};

constexpr std::array<Term, 20> p_terms{{{0, 1, 16.0},   {0, 2, -40.0},  {0, 3, 33.0},   {0, 4, -10.0},
                                        {0, 5, 1.0},    {1, 0, 16.0},   {1, 1, -360.0}, {1, 2, 677.0},
                                        {1, 3, -350.0}, {1, 4, 53.0},   {2, 0, -40.0},  {2, 1, 677.0},
                                        {2, 2, -680.0}, {2, 3, 154.0},  {3, 0, 33.0},   {3, 1, -350.0},
                                        {3, 2, 154.0},  {4, 0, -10.0},  {4, 1, 53.0},   {5, 0, 1.0}}};

constexpr std::array<Term, 35> r_terms{{{0, 1, 64.0},      {0, 2, -240.0},    {0, 3, 348.0},     {0, 4, -245.0},
                                        {0, 5, 87.0},      {0, 6, -15.0},     {0, 7, 1.0},       {1, 0, 192.0},
                                        {1, 1, -4800.0},   {1, 2, 14268.0},   {1, 3, -16170.0},  {1, 4, 8265.0},
                                        {1, 5, -1920.0},   {1, 6, 165.0},     {2, 0, -1200.0},   {2, 1, 23780.0},
                                        {2, 2, -51450.0},  {2, 3, 39150.0},   {2, 4, -12125.0},  {2, 5, 1305.0},
                                        {3, 0, 2436.0},    {3, 1, -37730.0},  {3, 2, 54810.0},   {3, 3, -25200.0},
                                        {3, 4, 3605.0},    {4, 0, -2205.0},   {4, 1, 24795.0},   {4, 2, -21825.0},
                                        {4, 3, 4635.0},    {5, 0, 957.0},     {5, 1, -7040.0},   {5, 2, 2871.0},
                                        {6, 0, -195.0},    {6, 1, 715.0},     {7, 0, 15.0}}};

constexpr std::array<Term, 28> s_terms{{{0, 0, 192.0},     {0, 1, -3600.0},   {0, 2, 10788.0},  {0, 3, -12495.0},
                                        {0, 4, 6525.0},    {0, 5, -1545.0},   {0, 6, 135.0},    {1, 0, -3600.0},
                                        {1, 1, 47560.0},   {1, 2, -108045.0}, {1, 3, 88740.0},  {1, 4, -29725.0},
                                        {1, 5, 3450.0},    {2, 0, 10788.0},   {2, 1, -108045.0}, {2, 2, 164430.0},
                                        {2, 3, -81450.0},  {2, 4, 12585.0},   {3, 0, -12495.0}, {3, 1, 88740.0},
                                        {3, 2, -81450.0},  {3, 3, 18540.0},   {4, 0, 6525.0},   {4, 1, -29725.0},
                                        {4, 2, 12585.0},   {5, 0, -1545.0},   {5, 1, 3450.0},   {6, 0, 135.0}}};

double ex2_shape(double x, double y) {
    const double s = x * x + y * y;
    const double gh = (s - 1.0) * (s - 4.0);
    const double xy = x * y;
    return xy * xy * xy * gh * gh * gh;
}

double ex2_laplacian(double x, double y, double t) {
    const double s = x * x + y * y;
    return 6.0 * t * x * y * (s - 1.0) * (s - 4.0) * eval_even(p_terms, x * x, y * y);
}

double ex2_bilaplacian(double x, double y, double t) {
    return 24.0 * t * x * y * eval_even(s_terms, x * x, y * y);
}

Vec2 ex2_grad_u(double x, double y, double t) {
    const double s = x * x + y * y;
    const double gh = (s - 1.0) * (s - 4.0);
    const double common = 3.0 * t * x * x * y * y * gh * gh;
    return {common * y * eval_even(q_terms, x * x, y * y), common * x * eval_even(q_terms, y * y, x * x)};
}

Vec2 ex2_grad_v(double x, double y, double t) {
    return {-6.0 * t * y * eval_even(r_terms, x * x, y * y), -6.0 * t * x * eval_even(r_terms, y * y, x * x)};
}

}  // namespace

ManufacturedProblem example1() {
    ManufacturedProblem p;
    p.name = "example1";
    p.geometry = GeometryMap::unit_square();
    p.final_time = 1.0;
    p.u = [](double x, double y, double t) { return std::sin(pi * t) * std::sin(pi * x) * std::sin(pi * y); };
    p.grad_u = [](double x, double y, double t) -> Vec2 {
        const double st = std::sin(pi * t);
        return {pi * st * std::cos(pi * x) * std::sin(pi * y), pi * st * std::sin(pi * x) * std::cos(pi * y)};
    };
    p.dt_u = [](double x, double y, double t) { return pi * std::cos(pi * t) * std::sin(pi * x) * std::sin(pi * y); };
    p.v = [](double x, double y, double t) {
        return 2.0 * pi * pi * std::sin(pi * t) * std::sin(pi * x) * std::sin(pi * y);
    };
    p.grad_v = [](double x, double y, double t) -> Vec2 {
        const double c = 2.0 * pi * pi * pi * std::sin(pi * t);
        return {c * std::cos(pi * x) * std::sin(pi * y), c * std::sin(pi * x) * std::cos(pi * y)};
    };
    p.forcing = [](double x, double y, double t) {
        const double sxy = std::sin(pi * x) * std::sin(pi * y);
        const double pi2 = pi * pi;
        return pi * std::cos(pi * t) * sxy + (4.0 * pi2 * pi2 + 2.0 * pi2) * std::sin(pi * t) * sxy;
    };
    return p;
}

ManufacturedProblem example2() {
    ManufacturedProblem p;
    p.name = "example2";
    p.geometry = GeometryMap::quarter_annulus(1.0, 2.0);
    p.final_time = 1.0;
    p.u = [](double x, double y, double t) { return t * ex2_shape(x, y); };
    p.grad_u = ex2_grad_u;
    p.dt_u = [](double x, double y, double) { return ex2_shape(x, y); };
    p.v = [](double x, double y, double t) { return -ex2_laplacian(x, y, t); };
    p.grad_v = ex2_grad_v;
    p.forcing = [](double x, double y, double t) {
        return ex2_shape(x, y) + ex2_bilaplacian(x, y, t) - ex2_laplacian(x, y, t);
    };
    return p;
}

ManufacturedProblem problem_by_name(const std::string& name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    throw ArgumentError("unknown problem '" + name + "' (expected example1 or example2)");
}

double boundary_distance(const ManufacturedProblem& problem, double x, double y) {
    const auto& g = problem.geometry;
    if (g.kind() == GeometryKind::unit_square) return std::min({x, 1.0 - x, y, 1.0 - y});
    const double r = std::hypot(x, y);
    return std::min({x, y, r - g.inner_radius(), g.outer_radius() - r});
}

std::vector<SpaceTimePoint> interior_samples(const ManufacturedProblem& problem, int count, double margin,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double extent = problem.geometry.kind() == GeometryKind::unit_square ? 1.0 : problem.geometry.outer_radius();
    std::uniform_real_distribution<double> space(0.0, extent);
    std::uniform_real_distribution<double> time(margin, problem.final_time - margin);
    std::vector<SpaceTimePoint> out;
    while (static_cast<int>(out.size()) < count) {
        const double x = space(rng);
        const double y = space(rng);
        const double t = time(rng);
        if (boundary_distance(problem, x, y) >= margin) out.push_back({x, y, t});
    }
    return out;
}

std::vector<SpaceTimePoint> boundary_samples(const ManufacturedProblem& problem, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> side(0, 3);
    const auto& g = problem.geometry;
    std::vector<SpaceTimePoint> out;
    for (int k = 0; k < count; ++k) {
        const double s = unit(rng);
        const double t = problem.final_time * unit(rng);
        const int face = side(rng);
        if (g.kind() == GeometryKind::unit_square) {
            const std::array<Vec2, 4> pts{{{s, 0.0}, {1.0, s}, {s, 1.0}, {0.0, s}}};
            out.push_back({pts[static_cast<std::size_t>(face)][0], pts[static_cast<std::size_t>(face)][1], t});
        } else {
            // zeta on the boundary of the unit square, mapped
            const std::array<Vec2, 4> zeta{{{s, 0.0}, {1.0, s}, {s, 1.0}, {0.0, s}}};
            auto xy = g.map_point(zeta[static_cast<std::size_t>(face)]);
            if (face == 2) xy[0] = 0.0;  // the face x = 0, exactly
            out.push_back({xy[0], xy[1], t});
        }
    }
    return out;
}

double pde_residual_oracle(const ManufacturedProblem& problem, const std::vector<SpaceTimePoint>& points) {
    const double h = residual_oracle_step;
    const auto& u = problem.u;
    double worst = 0.0;
    for (const auto& pt : points) {
        const double dist = std::min({boundary_distance(problem, pt.x, pt.y), pt.t, problem.final_time - pt.t});
        if (dist < 5.0 * h) {
            std::ostringstream os;
            os << "sample (" << pt.x << ", " << pt.y << ", " << pt.t << ") is closer than 5 steps to the boundary";
            throw ArgumentError(os.str());
        }
        const double x = pt.x;
        const double y = pt.y;
        const double t = pt.t;
        auto dt = [&](double s) { return (u(x, y, t + s) - u(x, y, t - s)) / (2.0 * s); };
        auto lap = [&](double s) {
            return (u(x + s, y, t) + u(x - s, y, t) + u(x, y + s, t) + u(x, y - s, t) - 4.0 * u(x, y, t)) / (s * s);
        };
        auto bilap = [&](double s) {
            const double c = u(x, y, t);
            const double near = u(x + s, y, t) + u(x - s, y, t) + u(x, y + s, t) + u(x, y - s, t);
            const double diag = u(x + s, y + s, t) + u(x + s, y - s, t) + u(x - s, y + s, t) + u(x - s, y - s, t);
            const double far =
                u(x + 2 * s, y, t) + u(x - 2 * s, y, t) + u(x, y + 2 * s, t) + u(x, y - 2 * s, t);
            return (20.0 * c - 8.0 * near + 2.0 * diag + far) / (s * s * s * s);
        };
        // one Richardson step removes the O(s^2) term of each stencil
        auto richardson = [&](auto&& d) { return (4.0 * d(0.5 * h) - d(h)) / 3.0; };
        const double lhs = richardson(dt) + richardson(bilap) - richardson(lap);
        const double f = problem.forcing(x, y, t);
        worst = std::max(worst, std::abs(lhs - f) / (1.0 + std::abs(f)));
    }
    return worst;
}

}  // namespace stiga
