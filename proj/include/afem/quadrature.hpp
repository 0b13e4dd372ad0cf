#pragma once

#include <array>
#include <vector>

namespace afem {

// Gauss-Legendre rule on the unit segment [0, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights; // sum to 1
    int exactness = 0;           // exact for polynomials up to this degree
};

// 1 to 16 points; n points are exact up to degree 2n-1.
QuadratureRule edge_gauss_rule(int n_points);

// Symmetric rule on the reference triangle, barycentric points.
struct TriangleRule {
    struct Point {
        double l0, l1, l2;
    };
    std::vector<Point> points;
    std::vector<double> weights; // sum to 1/2 (reference triangle measure)
    int degree = 0;
};

// Supported exactness degrees: 1, 2, 4, 5 (requests in between round up).
TriangleRule triangle_rule(int degree);

} // namespace afem
