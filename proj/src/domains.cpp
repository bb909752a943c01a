#include "ghostfd/domains.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ghostfd/boundary.hpp"

namespace ghostfd {

DomainSpec DomainSpec::circle() {
    return circle(std::sqrt(2.0) / 10.0, -std::sqrt(3.0) / 20.0, std::sqrt(5.0) / 3.0);
}

DomainSpec DomainSpec::circle(double cx, double cy, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("DomainSpec: circle radius must be > 0");
    DomainSpec d;
    d.kind = Kind::Circle;
    d.cx = cx;
    d.cy = cy;
    d.radius = radius;
    return d;
}

DomainSpec DomainSpec::flower() { return flower(0.5, 0.2, 0.0, 0.0); }

DomainSpec DomainSpec::flower(double r1, double r2, double cx, double cy) {
    if (!(r1 > r2 && r2 > 0.0))
        throw std::invalid_argument("DomainSpec: flower needs r1 > r2 > 0");
    DomainSpec d;
    d.kind = Kind::Flower;
    d.r1 = r1;
    d.r2 = r2;
    d.cx = cx;
    d.cy = cy;
    return d;
}

DomainSpec DomainSpec::from_file(std::string path) {
    DomainSpec d;
    d.kind = Kind::FromFile;
    d.path = std::move(path);
    return d;
}

std::string DomainSpec::name() const {
    switch (kind) {
        case Kind::Circle: return "circle";
        case Kind::Flower: return "flower";
        case Kind::FromFile: return "file";
    }
    return "?";
}

double DomainSpec::phi(double x, double y) const {
    switch (kind) {
        case Kind::Circle:
            return std::hypot(x - cx, y - cy) - radius;
        case Kind::Flower: {
            // petal polynomial: Im((x-x0 + i(y-y0))^5) = r^5 sin(5 gamma) when centered
            const double X = x - cx, Y = y - cy;
            const double r = std::sqrt(x * x + y * y);
            const double P = std::pow(Y, 5) + 5.0 * std::pow(X, 4) * Y -
                             10.0 * X * X * std::pow(Y, 3);
            if (r == 0.0) {
                // P is degree-5 homogeneous, so P/r^5 is bounded near the origin
                // for zero offset; take the radial limit there
                if (P == 0.0) return -r1;
                throw std::domain_error("flower level set singular at the origin with offset");
            }
            return r - r1 - r2 * P / std::pow(r, 5);
        }
        case Kind::FromFile:
            break;
    }
    throw std::logic_error("DomainSpec::phi: no analytic level set for file domains");
}

Gradient2 DomainSpec::grad_phi(double x, double y) const {
    switch (kind) {
        case Kind::Circle: {
            const double d = std::hypot(x - cx, y - cy);
            if (d == 0.0) throw std::domain_error("grad_phi: circle center");
            return {(x - cx) / d, (y - cy) / d};
        }
        case Kind::Flower: {
            const double X = x - cx, Y = y - cy;
            const double r = std::sqrt(x * x + y * y);
            if (r == 0.0) throw std::domain_error("grad_phi: flower origin");
            const double r5 = std::pow(r, 5), r7 = std::pow(r, 7);
            const double P = std::pow(Y, 5) + 5.0 * std::pow(X, 4) * Y -
                             10.0 * X * X * std::pow(Y, 3);
            const double Px = 20.0 * std::pow(X, 3) * Y - 20.0 * X * std::pow(Y, 3);
            const double Py = 5.0 * std::pow(Y, 4) + 5.0 * std::pow(X, 4) -
                              30.0 * X * X * Y * Y;
            return {x / r - r2 * (Px / r5 - 5.0 * P * x / r7),
                    y / r - r2 * (Py / r5 - 5.0 * P * y / r7)};
        }
        case Kind::FromFile:
            break;
    }
    throw std::logic_error("DomainSpec::grad_phi: no analytic level set for file domains");
}

GridField sample_levelset(const DomainSpec& spec, const GridSpec& grid) {
    if (spec.kind == DomainSpec::Kind::FromFile) {
        GridField phi = load_levelset(spec.path);
        if (!(phi.spec == grid))
            throw std::runtime_error("sample_levelset: level-set file N does not match grid");
        return phi;
    }
    GridField phi(grid);
    for (int j = 0; j <= grid.n; ++j)
        for (int i = 0; i <= grid.n; ++i)
            phi(i, j) = spec.phi(grid.x(i), grid.y(j));
    return phi;
}

GridField load_levelset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_levelset: cannot open " + path);
    int n = 0;
    if (!(in >> n)) throw std::runtime_error("load_levelset: missing grid size in " + path);
    GridField phi{GridSpec(n)};
    for (double& v : phi.values)
        if (!(in >> v))
            throw std::runtime_error("load_levelset: " + path + " holds fewer than (N+1)^2 values");
    double extra;
    if (in >> extra)
        throw std::runtime_error("load_levelset: " + path + " holds more than (N+1)^2 values");
    return phi;
}

void save_levelset(const std::string& path, const GridField& phi) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_levelset: cannot open " + path);
    out << phi.spec.n << '\n';
    char buf[40];
    for (double v : phi.values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
}

std::vector<std::pair<int, int>> boundary_margin_check(const DomainSpec& spec,
                                                       const GridSpec& grid) {
    const GridField phi = sample_levelset(spec, grid);
    const Classification cls = classify_points(phi, StencilFamily::Star, ExecPolicy::Serial);
    std::vector<std::pair<int, int>> violations;
    const int na = grid.nodes_per_axis();
    for (int k = 0; k < grid.num_nodes(); ++k) {
        if (!is_ghost(cls.labels[k])) continue;
        const int i = k % na, j = k / na;
        auto [sx, sy] = quadrant_signs(phi, i, j);
        try {
            upwind_stencil(i, j, sx == 0 ? 1 : sx, sy == 0 ? 1 : sy, 2, 2, grid);
        } catch (const std::exception&) {
            violations.emplace_back(i, j);
        }
    }
    return violations;
}

ManufacturedSolution ManufacturedSolution::sin_product() {
    ManufacturedSolution s;
    s.name = "sin-product";
    s.u = [](double x, double y) { return std::sin(2.0 * x) * std::sin(5.0 * y); };
    s.f = [](double x, double y) { return 29.0 * std::sin(2.0 * x) * std::sin(5.0 * y); };
    s.grad_u = [](double x, double y) -> Gradient2 {
        return {2.0 * std::cos(2.0 * x) * std::sin(5.0 * y),
                5.0 * std::sin(2.0 * x) * std::cos(5.0 * y)};
    };
    return s;
}

ManufacturedSolution ManufacturedSolution::log_product() {
    ManufacturedSolution s;
    s.name = "log-product";
    s.u = [](double x, double y) { return std::log(1.0 + 3.0 * x * y); };
    s.f = [](double x, double y) {
        const double d = 1.0 + 3.0 * x * y;
        return 9.0 * (x * x + y * y) / (d * d);
    };
    s.grad_u = [](double x, double y) -> Gradient2 {
        const double d = 1.0 + 3.0 * x * y;
        return {3.0 * y / d, 3.0 * x / d};
    };
    return s;
}

}  // namespace ghostfd
