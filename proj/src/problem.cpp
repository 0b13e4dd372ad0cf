#include "afem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace afem {

NonlinearLaw NonlinearLaw::cubic(double c1, double c2) {
    if (!(c1 > 0.0) || c2 < 0.0)
        throw std::invalid_argument("cubic law needs c1 > 0 and c2 >= 0");
    NonlinearLaw law;
    law.kind_ = Kind::Cubic;
    law.c1 = c1;
    law.c2 = c2;
    return law;
}

NonlinearLaw NonlinearLaw::butler_volmer(double c3, double c4, double c5) {
    if (!(c3 > 0.0 && c4 > 0.0 && c5 > 0.0))
        throw std::invalid_argument("Butler-Volmer law needs c3, c4, c5 > 0");
    NonlinearLaw law;
    law.kind_ = Kind::ButlerVolmer;
    law.c3 = c3;
    law.c4 = c4;
    law.c5 = c5;
    return law;
}

double NonlinearLaw::argument_limit() const {
    if (kind_ == Kind::Cubic) return std::numeric_limits<double>::infinity();
    return 700.0 / std::max(c3, c4);
}

namespace {
[[noreturn]] void overflow(double t) {
    throw std::domain_error("Butler-Volmer law evaluated outside its overflow guard at t = " +
                            std::to_string(t));
}
} // namespace

double NonlinearLaw::f(double t) const {
    if (kind_ == Kind::Cubic) return c1 * t + c2 * t * t * t;
    if (std::abs(t) > argument_limit()) overflow(t);
    return c5 * (std::exp(c3 * t) - std::exp(-c4 * t));
}

double NonlinearLaw::f_prime(double t) const {
    if (kind_ == Kind::Cubic) return c1 + 3.0 * c2 * t * t;
    if (std::abs(t) > argument_limit()) overflow(t);
    return c5 * (c3 * std::exp(c3 * t) + c4 * std::exp(-c4 * t));
}

double NonlinearLaw::antiderivative(double t) const {
    if (kind_ == Kind::Cubic) {
        const double t2 = t * t;
        return 0.5 * c1 * t2 + 0.25 * c2 * t2 * t2;
    }
    if (std::abs(t) > argument_limit()) overflow(t);
    return c5 * (std::exp(c3 * t) / c3 + std::exp(-c4 * t) / c4) - c5 * (1.0 / c3 + 1.0 / c4);
}

double FluxData::eval(Vec2 p) const {
    switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Quadratic: return p.x * p.x + p.y * p.y;
    case Kind::OscillatoryMix:
        if (std::abs(p.x + 1.0) <= 1e-9) return std::sin(20.0 * p.y);
        return std::sin(p.x) + std::cos(p.y);
    }
    return 0.0;
}

BoundaryPartition lshape_partition(BoundaryLabel left, BoundaryLabel top, BoundaryLabel right,
                                   BoundaryLabel inner_horizontal, BoundaryLabel inner_vertical,
                                   BoundaryLabel bottom) {
    return {
        BoundarySegment{{-1, -1}, {-1, 1}, left},
        BoundarySegment{{-1, 1}, {1, 1}, top},
        BoundarySegment{{1, 1}, {1, 0}, right},
        BoundarySegment{{1, 0}, {0, 0}, inner_horizontal},
        BoundarySegment{{0, 0}, {0, -1}, inner_vertical},
        BoundarySegment{{0, -1}, {-1, -1}, bottom},
    };
}

ProblemSpec example_config(int id) {
    ProblemSpec spec;
    spec.sigma_default = 1.0;
    if (id == 1) {
        spec.law = NonlinearLaw::cubic(1.0, 1.0);
        spec.flux.kind = FluxData::Kind::Quadratic;
        spec.boundary_partition =
            lshape_partition(BoundaryLabel::GammaC, BoundaryLabel::GammaA, BoundaryLabel::GammaA,
                             BoundaryLabel::GammaA, BoundaryLabel::GammaA, BoundaryLabel::GammaA);
    } else if (id == 2) {
        spec.law = NonlinearLaw::butler_volmer(5.0, 5.0, 1.0);
        spec.flux.kind = FluxData::Kind::OscillatoryMix;
        spec.boundary_partition =
            lshape_partition(BoundaryLabel::GammaA, BoundaryLabel::GammaA, BoundaryLabel::GammaA,
                             BoundaryLabel::GammaC, BoundaryLabel::GammaC, BoundaryLabel::GammaA);
    } else {
        throw std::invalid_argument("example_config: id must be 1 or 2");
    }
    return spec;
}

ProblemSpec parse_problem_config(std::istream& is) {
    int example = 1;
    bool have_c[6] = {};
    double c[6] = {};
    bool have_sigma = false;
    double sigma = 1.0;
    bool have_law = false;
    NonlinearLaw::Kind law_kind = NonlinearLaw::Kind::Cubic;
    BoundaryPartition segments;

    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        std::istringstream vs(value);
        if (key == "example") {
            vs >> example;
        } else if (key.size() == 2 && key[0] == 'c' && key[1] >= '1' && key[1] <= '5') {
            const int i = key[1] - '0';
            vs >> c[i];
            have_c[i] = true;
        } else if (key == "sigma") {
            vs >> sigma;
            have_sigma = true;
        } else if (key == "law") {
            have_law = true;
            if (value == "cubic") law_kind = NonlinearLaw::Kind::Cubic;
            else if (value == "butler_volmer") law_kind = NonlinearLaw::Kind::ButlerVolmer;
            else throw std::invalid_argument("config: unknown law '" + value + "'");
        } else if (key == "segment") {
            BoundarySegment seg;
            std::string label;
            vs >> seg.a.x >> seg.a.y >> seg.b.x >> seg.b.y >> label;
            if (!vs) throw std::invalid_argument("config line " + std::to_string(line_no) +
                                                 ": segment needs x0 y0 x1 y1 LABEL");
            seg.label = parse_boundary_label(label);
            segments.push_back(seg);
            continue;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
        if (key != "law" && !vs)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad value");
    }

    ProblemSpec spec = example_config(example);
    if (have_sigma) spec.sigma_default = sigma;
    if (!segments.empty()) spec.boundary_partition = std::move(segments);

    const bool cubic = have_law ? law_kind == NonlinearLaw::Kind::Cubic : spec.law.is_cubic();
    if (cubic) {
        spec.law = NonlinearLaw::cubic(have_c[1] ? c[1] : (spec.law.is_cubic() ? spec.law.c1 : 1.0),
                                       have_c[2] ? c[2] : (spec.law.is_cubic() ? spec.law.c2 : 1.0));
    } else {
        const bool was_bv = !spec.law.is_cubic();
        spec.law = NonlinearLaw::butler_volmer(have_c[3] ? c[3] : (was_bv ? spec.law.c3 : 5.0),
                                               have_c[4] ? c[4] : (was_bv ? spec.law.c4 : 5.0),
                                               have_c[5] ? c[5] : (was_bv ? spec.law.c5 : 1.0));
    }
    return spec;
}

ProblemSpec parse_problem_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_problem_config(is);
}

} // namespace afem
