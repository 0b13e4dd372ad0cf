#include "afem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace afem {

QuadratureRule edge_gauss_rule(int n_points) {
    if (n_points < 1 || n_points > 16)
        throw std::invalid_argument("edge_gauss_rule: supported point counts are 1..16");

    // Legendre roots on [-1,1] by Newton iteration from the Chebyshev guess,
    // then mapped to [0,1]. Converges to machine precision in a few steps.
    const int n = n_points;
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.exactness = 2 * n - 1;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = 0.5 * (1.0 - x); // roots come out descending in x
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

TriangleRule triangle_rule(int degree) {
    TriangleRule rule;
    auto orbit3 = [&rule](double a, double w) {
        const double b = 0.5 * (1.0 - a);
        rule.points.push_back({a, b, b});
        rule.points.push_back({b, a, b});
        rule.points.push_back({b, b, a});
        rule.weights.insert(rule.weights.end(), 3, w);
    };
    if (degree <= 1) {
        rule.degree = 1;
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(0.5);
    } else if (degree <= 2) {
        // edge midpoints
        rule.degree = 2;
        rule.points.push_back({0.5, 0.5, 0.0});
        rule.points.push_back({0.0, 0.5, 0.5});
        rule.points.push_back({0.5, 0.0, 0.5});
        rule.weights.insert(rule.weights.end(), 3, 1.0 / 6.0);
    } else if (degree <= 4) {
        rule.degree = 4;
        orbit3(0.108103018168070, 0.5 * 0.223381589678011);
        orbit3(0.816847572980459, 0.5 * 0.109951743655322);
    } else if (degree <= 5) {
        rule.degree = 5;
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(0.5 * 0.225);
        orbit3(0.059715871789770, 0.5 * 0.132394152788506);
        orbit3(0.797426985353087, 0.5 * 0.125939180544827);
    } else {
        throw std::invalid_argument("triangle_rule: degrees above 5 not supported");
    }
    return rule;
}

} // namespace afem
