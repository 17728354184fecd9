#include "hedgegap/quadrature.hpp"

#include <algorithm>

namespace hedgegap::mathkit {

namespace detail {

namespace {
double simpson_value(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_value(a, fa, m, fm, flm);
    const double right = simpson_value(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    // seed with a handful of panels so narrow features are not missed
    const int seed_panels = 16;
    double acc = 0.0;
    const double h = (b - a) / seed_panels;
    for (int k = 0; k < seed_panels; ++k) {
        const double x0 = a + k * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        const double f0 = f(x0), f1 = f(x1), fm = f(xm);
        const double whole = simpson_value(x0, f0, x1, f1, fm);
        acc += adaptive_step(f, x0, f0, x1, f1, fm, whole, tol / seed_panels, max_depth);
    }
    return acc;
}

}  // namespace detail

double expect_terminal(const std::function<double(double)>& h, const NormalLaw& law,
                       const QuadratureConfig& cfg) {
    return expect_terminal<const std::function<double(double)>&>(h, law, cfg);
}

double conditional_expectation(const std::function<double(double)>& h, double t, double x0,
                               double T, const QuadratureConfig& cfg) {
    return conditional_expectation<const std::function<double(double)>&>(h, t, x0, T, cfg);
}

double integrate_density(const std::function<double(double)>& h, const NormalLaw& law,
                         double lo, double hi, const QuadratureConfig& cfg) {
    cfg.validate();
    if (!(lo < hi)) return 0.0;
    const double panel = 0.5 * law.sigma();
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
    auto weighted = [&](double x) { return h(x) * normal_pdf(x, law); };
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double a = lo + (hi - lo) * k / n;
        const double b = lo + (hi - lo) * (k + 1) / n;
        acc += detail::gl16_panel(weighted, a, b);
    }
    return acc;
}

double conditional_tail_mean(const std::function<double(double)>& h, const NormalLaw& law,
                             double c, TailSide side, const QuadratureConfig& cfg) {
    cfg.validate();
    const double log_mass = (side == TailSide::above) ? log_normal_tail(c, law)
                                                      : log_normal_cdf(c, law);
    const double sigma = law.sigma();
    const double z0 = (c - law.mean) / sigma;
    auto integrand = [&](double u) {
        const double x = (side == TailSide::above) ? c + u : c - u;
        const double z = (x - law.mean) / sigma;
        const double logw = -0.5 * z * z - std::log(sigma) - 0.9189385332046727 - log_mass;
        return std::exp(logw) * h(x);
    };
    // March panels of width sigma/2 away from the threshold until the
    // weighted contribution stays negligible. Covers integrands with
    // exponential growth (the weighted product is eventually Gaussian).
    const double panel = 0.5 * sigma;
    const int hard_cap = static_cast<int>(std::ceil((std::fabs(z0) + 120.0) / 0.5));
    double acc = 0.0;
    int quiet = 0;
    for (int k = 0; k < hard_cap; ++k) {
        const double part = detail::gl16_panel(integrand, k * panel, (k + 1) * panel);
        acc += part;
        if (std::fabs(part) <= cfg.absolute_tolerance * (1.0 + std::fabs(acc)) * 1e-3) {
            if (++quiet >= 3 && (k + 1) * 0.5 >= cfg.truncation_width) break;
        } else {
            quiet = 0;
        }
    }
    return acc;
}

}  // namespace hedgegap::mathkit
