#pragma once
// Least-squares fitting helpers for asymptotic-rate extraction:
// straight-line fits, log-log power-law fits, and a logarithmic growth
// model used at the exponent boundary where power laws degenerate.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ssr = 0.0;  // residual sum of squares in the fitted coordinates
};

// Ordinary least squares y = slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching samples");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        f.ssr += r * r;
    }
    return f;
}

// Power-law fit y ~ c * x^p via log-log least squares.  Returns the fitted
// exponent p; `ssr_linear` reports the residual sum of squares measured in
// the original (not log) coordinates so different models can be compared.
struct PowerFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double ssr_linear = 0.0;
};

inline PowerFit fit_power_law(const std::vector<double>& x,
                              const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0) continue;  // log model needs positivity
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const LineFit lf = fit_line(lx, ly);
    PowerFit pf;
    pf.exponent = lf.slope;
    pf.prefactor = std::exp(lf.intercept);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - pf.prefactor * std::pow(x[i], pf.exponent);
        pf.ssr_linear += r * r;
    }
    return pf;
}

// Logarithmic growth model y ~ a + b*log(x + 2), the degenerate-rate
// alternative to a power law.  ssr_linear again in original coordinates.
struct LogFit {
    double a = 0.0;
    double b = 0.0;
    double ssr_linear = 0.0;
};

inline LogFit fit_log_model(const std::vector<double>& x,
                            const std::vector<double>& y) {
    std::vector<double> lx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i] + 2.0);
    const LineFit lf = fit_line(lx, y);
    LogFit f;
    f.b = lf.slope;
    f.a = lf.intercept;
    f.ssr_linear = lf.ssr;
    return f;
}

}  // namespace lab
