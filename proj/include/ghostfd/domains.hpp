#pragma once

#include <functional>
#include <string>

#include "ghostfd/classify.hpp"
#include "ghostfd/interp.hpp"

namespace ghostfd {

/// Analytic level sets for the two test geometries, or a user-supplied grid file.
struct DomainSpec {
    enum class Kind { Circle, Flower, FromFile };

    Kind kind = Kind::Circle;
    double cx = 0.0, cy = 0.0;   // circle center / flower offset
    double radius = 0.0;         // circle
    double r1 = 0.0, r2 = 0.0;   // flower
    std::string path;            // FromFile

    static DomainSpec circle();  // paper parameters
    static DomainSpec circle(double cx, double cy, double radius);
    static DomainSpec flower();  // paper parameters, offset (0,0)
    static DomainSpec flower(double r1, double r2, double cx, double cy);
    static DomainSpec from_file(std::string path);

    bool analytic() const { return kind != Kind::FromFile; }
    std::string name() const;

    double phi(double x, double y) const;       // analytic kinds only
    Gradient2 grad_phi(double x, double y) const;
};

GridField sample_levelset(const DomainSpec& spec, const GridSpec& grid);

/// Plain-text level-set grid: first line N, then (N+1)^2 values row-major.
GridField load_levelset(const std::string& path);
void save_levelset(const std::string& path, const GridField& phi);

/// Nodes whose maximal upwind stencil (steps (2,2)) would leave the rectangle.
/// Empty result means the domain is safely away from the bounding box.
std::vector<std::pair<int, int>> boundary_margin_check(const DomainSpec& spec,
                                                       const GridSpec& grid);

/// Exact solution with analytically derived source and gradient.
struct ManufacturedSolution {
    std::string name;
    std::function<double(double, double)> u;
    std::function<double(double, double)> f;  // -laplacian(u)
    std::function<Gradient2(double, double)> grad_u;

    static ManufacturedSolution sin_product();  // sin(2x) sin(5y)
    static ManufacturedSolution log_product();  // log(1 + 3xy)
};

}  // namespace ghostfd
