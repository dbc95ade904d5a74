#include "cherenkov/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cherenkov/errors.hpp"

namespace cherenkov::quad {
namespace {

// Kronrod 21-point abscissae; odd indices are the embedded 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077712664650695, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const RealFunction& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = fc * kWgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double lo = f(centre - dx);
        const double hi = f(centre + dx);
        f1[j] = lo;
        f2[j] = hi;
        resk += kWgk[j] * (lo + hi);
        resabs += kWgk[j] * (std::abs(lo) + std::abs(hi));
        if (j % 2 == 1) resg += kWg[j / 2] * (lo + hi);
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
    return {a, b, value, err};
}

constexpr long kEvalsPerSegment = 21;

QuadResult adaptive_core(const RealFunction& f, std::span<const double> edges, const QuadOptions& opts) {
    std::vector<Segment> heap;
    QuadResult out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        heap.push_back(gauss_kronrod(f, edges[i], edges[i + 1]));
        out.evaluations += kEvalsPerSegment;
    }
    std::make_heap(heap.begin(), heap.end());
    auto resum = [&heap] {
        double v = 0.0, e = 0.0;
        for (const Segment& s : heap) {
            v += s.value;
            e += s.error;
        }
        return std::pair{v, e};
    };
    auto [value, error] = resum();
    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };
    bool stalled = false;
    long bisections = 0;
    while (error > target() && out.evaluations + 2 * kEvalsPerSegment <= opts.max_evaluations) {
        std::pop_heap(heap.begin(), heap.end());
        const Segment worst = heap.back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            std::push_heap(heap.begin(), heap.end());
            stalled = true;
            break;
        }
        heap.pop_back();
        const Segment left = gauss_kronrod(f, worst.a, mid);
        const Segment right = gauss_kronrod(f, mid, worst.b);
        out.evaluations += 2 * kEvalsPerSegment;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        // running sums drift; resync periodically
        if (++bisections % 256 == 0) std::tie(value, error) = resum();
    }
    std::tie(value, error) = resum();
    out.value = value;
    out.error_estimate = error;
    out.converged = std::isfinite(value) && error <= target();
    if (!out.converged) {
        const Segment& worst = heap.front();
        std::ostringstream msg;
        msg << (stalled ? "roundoff limit" : "evaluation budget exhausted") << "; worst subinterval [" << worst.a
            << ", " << worst.b << "] error " << worst.error;
        out.warnings.push_back(msg.str());
    }
    return out;
}

}  // namespace

QuadResult integrate_adaptive(const RealFunction& f, double a, double b, const QuadOptions& opts) {
    if (!(a < b)) throw DomainError("integrate_adaptive: requires a < b");
    const std::array<double, 2> edges{a, b};
    return adaptive_core(f, edges, opts);
}

QuadResult integrate_adaptive(const RealFunction& f, double a, double b, double rel_tol) {
    QuadOptions opts;
    opts.rel_tol = rel_tol;
    return integrate_adaptive(f, a, b, opts);
}

QuadResult integrate_semi_infinite(const RealFunction& f, double a, const QuadOptions& opts) {
    auto mapped = [&f, a](double t) {
        const double u = 1.0 - t;
        const double x = a + t / u;
        if (!std::isfinite(x)) return 0.0;
        return f(x) / (u * u);
    };
    return integrate_adaptive(mapped, 0.0, 1.0, opts);
}

QuadResult integrate_pv(const RealFunction& f, double pole, double a, double b, const QuadOptions& opts) {
    if (!(a < pole && pole < b)) throw DomainError("integrate_pv: pole must lie strictly inside (a, b)");
    const double h = std::min(pole - a, b - pole);
    auto folded = [&f, pole](double t) { return (f(pole + t) - f(pole - t)) / t; };
    QuadResult sym = integrate_adaptive(folded, 0.0, h, opts);

    QuadResult rest;
    rest.converged = true;
    auto direct = [&f, pole](double x) { return f(x) / (x - pole); };
    const double lo_gap = pole - a - h;
    const double hi_gap = b - pole - h;
    if (hi_gap > 0.0 && hi_gap > 1e-15 * (b - a))
        rest = integrate_adaptive(direct, pole + h, b, opts);
    else if (lo_gap > 0.0 && lo_gap > 1e-15 * (b - a))
        rest = integrate_adaptive(direct, a, pole - h, opts);

    QuadResult out;
    out.value = sym.value + rest.value;
    out.error_estimate = sym.error_estimate + rest.error_estimate;
    out.evaluations = sym.evaluations + rest.evaluations;
    out.converged = std::isfinite(out.value) && sym.converged && rest.converged;
    out.warnings = sym.warnings;
    out.warnings.insert(out.warnings.end(), rest.warnings.begin(), rest.warnings.end());
    return out;
}

QuadResult integrate_bracketed(const RealFunction& f, std::span<const double> breakpoints, double a, double b,
                               const QuadOptions& opts) {
    if (!(a < b)) throw DomainError("integrate_bracketed: requires a < b");
    std::vector<double> edges{a};
    std::vector<std::string> warnings;
    std::vector<double> inner;
    for (double x : breakpoints) {
        if (x > a && x < b)
            inner.push_back(x);
        else {
            std::ostringstream msg;
            msg << "breakpoint " << x << " outside (" << a << ", " << b << ") ignored";
            warnings.push_back(msg.str());
        }
    }
    std::sort(inner.begin(), inner.end());
    for (double x : inner)
        if (x > edges.back()) edges.push_back(x);
    edges.push_back(b);
    QuadResult out = adaptive_core(f, edges, opts);
    warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
    out.warnings = std::move(warnings);
    return out;
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: requires n >= 1");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace cherenkov::quad
