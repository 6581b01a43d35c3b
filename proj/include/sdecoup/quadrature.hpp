#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sdecoup {

namespace detail {

// Gauss7/Kronrod15 nodes and weights on [-1,1].
// Column layout: abscissa, Gauss weight (0 for Kronrod-only nodes), Kronrod weight.
inline constexpr double g7k15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class F>
void quad_g7k15(const F& f, double a, double b, double& k15, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double y0 = f(mid);
    double g7 = g7k15[0][1] * y0;
    double k = g7k15[0][2] * y0;
    double kabs = g7k15[0][2] * std::fabs(y0);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * g7k15[i][0];
        const double yl = f(mid - dx);
        const double yr = f(mid + dx);
        g7 += g7k15[i][1] * (yl + yr);
        k += g7k15[i][2] * (yl + yr);
        kabs += g7k15[i][2] * (std::fabs(yl) + std::fabs(yr));
    }
    g7 *= half;
    k *= half;
    kabs *= half;
    k15 = k;
    // QUADPACK-style error heuristic, scaled to the panel's magnitude
    const double diff = std::fabs(g7 - k);
    if (kabs > 0.0) {
        const double q = 200.0 * diff / kabs;
        err = kabs * (q < 1.0 ? q * std::sqrt(q) : 1.0);
    } else {
        err = diff;
    }
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b].
/// Starts from a uniform 8-panel split, then bisects the panel with the
/// largest error estimate until the total estimated error drops below
/// rel_tol * |integral| (with abs_tol as a floor). Throws if the panel
/// budget is exhausted, which signals a pathological integrand.
template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-300) {
    if (!(a <= b)) throw std::invalid_argument("integrate: bad interval");
    if (a == b) return 0.0;

    struct Seg {
        double a, b, value, error;
    };
    std::vector<Seg> segs;
    segs.reserve(64);
    const int initial = 8;
    double total = 0.0, total_err = 0.0;
    for (int i = 0; i < initial; ++i) {
        Seg s{a + (b - a) * double(i) / initial, a + (b - a) * double(i + 1) / initial, 0, 0};
        detail::quad_g7k15(f, s.a, s.b, s.value, s.error);
        total += s.value;
        total_err += s.error;
        segs.push_back(s);
    }

    const std::size_t max_splits = 4000;
    std::size_t splits = 0;
    while (total_err > std::max(rel_tol * std::fabs(total), abs_tol)) {
        if (++splits > max_splits)
            throw std::runtime_error("integrate: did not converge");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const Seg s = segs[worst];
        const double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b)
            throw std::runtime_error("integrate: interval collapsed before converging");
        Seg l{s.a, m, 0, 0}, r{m, s.b, 0, 0};
        detail::quad_g7k15(f, l.a, l.b, l.value, l.error);
        detail::quad_g7k15(f, r.a, r.b, r.value, r.error);
        total += l.value + r.value - s.value;
        total_err += l.error + r.error - s.error;
        segs[worst] = l;
        segs.push_back(r);
    }
    return total;
}

} // namespace sdecoup
