#pragma once

#include <string>

#include "afem/mesh.hpp"

namespace afem {

// Current-potential law on the cathode boundary. Either the cubic law
// f(t) = c1*t + c2*t^3 or the Butler-Volmer law f(t) = c5*(e^{c3 t} - e^{-c4 t}).
// Both satisfy f(0) = 0 and f' >= alpha > 0 with convex f'.
class NonlinearLaw {
public:
    enum class Kind { Cubic, ButlerVolmer };

    static NonlinearLaw cubic(double c1, double c2);
    static NonlinearLaw butler_volmer(double c3, double c4, double c5);

    Kind kind() const { return kind_; }
    bool is_cubic() const { return kind_ == Kind::Cubic; }

    double f(double t) const;
    double f_prime(double t) const;
    double antiderivative(double t) const; // F(t) = int_0^t f, F(0) = 0

    // Largest |t| the Butler-Volmer exponentials accept without overflow.
    double argument_limit() const;

    double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;

private:
    Kind kind_ = Kind::Cubic;
};

// Anode current density g, defined on every GammaA edge.
struct FluxData {
    enum class Kind {
        Zero,
        Quadratic,      // g(x,y) = x^2 + y^2
        OscillatoryMix, // sin(20 y) on {-1} x [-1,1], sin(x) + cos(y) elsewhere
    };
    Kind kind = Kind::Zero;

    double eval(Vec2 p) const;
};

struct ProblemSpec {
    NonlinearLaw law = NonlinearLaw::cubic(1.0, 1.0);
    FluxData flux;
    double sigma_default = 1.0;
    BoundaryPartition boundary_partition;
};

// The six straight segments of the L-shape boundary, labeled.
BoundaryPartition lshape_partition(BoundaryLabel left, BoundaryLabel top, BoundaryLabel right,
                                   BoundaryLabel inner_horizontal, BoundaryLabel inner_vertical,
                                   BoundaryLabel bottom);

// The two bundled experiment setups:
//   1: cubic law (c1 = c2 = 1), g = x^2 + y^2, cathode = left boundary
//   2: Butler-Volmer (c3 = c4 = 5, c5 = 1), oscillatory g, cathode = the two
//      segments meeting at the re-entrant corner
ProblemSpec example_config(int id);

// "key = value" text config: starts from `example = 1|2` and applies
// overrides (c1..c5, sigma, law = cubic|butler_volmer, segment lines).
ProblemSpec parse_problem_config(std::istream& is);
ProblemSpec parse_problem_config_text(const std::string& text);

} // namespace afem
