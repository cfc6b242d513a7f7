#include "festcircuit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace festcircuit::linalg {

LeastSquares least_squares(const Matrix& x, const Vector& y) {
    const std::size_t m = x.rows(), n = x.cols();
    if (y.size() != m) throw std::invalid_argument("linalg: design and response sizes differ");
    if (m < n) throw std::invalid_argument("linalg: fewer rows than columns");

    Matrix a = x;
    Vector b = y;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) max_abs = std::max(max_abs, std::abs(a.at(i, j)));

    // Householder reflections applied column by column, also to b.
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a.at(i, k) * a.at(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("linalg: rank-deficient design matrix");
        const double alpha = a.at(k, k) >= 0.0 ? -norm : norm;

        Vector v(m - k);
        v[0] = a.at(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a.at(i, k);
        double vtv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
        if (vtv == 0.0) {
            a.at(k, k) = alpha;
            continue;
        }
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a.at(i, j);
            const double scale = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) a.at(i, j) -= scale * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
        const double scale = 2.0 * dot / vtv;
        for (std::size_t i = k; i < m; ++i) b[i] -= scale * v[i - k];
    }

    const double tol = std::max<double>(m, n) * max_abs * std::numeric_limits<double>::epsilon();
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(a.at(k, k)) <= tol) {
            throw std::runtime_error("linalg: rank-deficient design matrix");
        }
    }

    LeastSquares result;
    result.coefficients.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double sum = b[k];
        for (std::size_t j = k + 1; j < n; ++j) sum -= a.at(k, j) * result.coefficients[j];
        result.coefficients[k] = sum / a.at(k, k);
    }
    result.r = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) result.r.at(i, j) = a.at(i, j);
    return result;
}

Matrix upper_triangular_inverse(const Matrix& r) {
    const std::size_t n = r.rows();
    if (r.cols() != n) throw std::invalid_argument("linalg: matrix is not square");
    Matrix inv(n, n);
    for (std::size_t j = n; j-- > 0;) {
        if (r.at(j, j) == 0.0) throw std::runtime_error("linalg: singular triangular matrix");
        inv.at(j, j) = 1.0 / r.at(j, j);
        for (std::size_t i = j; i-- > 0;) {
            double sum = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) sum += r.at(i, k) * inv.at(k, j);
            inv.at(i, j) = -sum / r.at(i, i);
        }
    }
    return inv;
}

Vector normal_matrix_inverse_diagonal(const Matrix& r) {
    const Matrix inv = upper_triangular_inverse(r);
    const std::size_t n = inv.rows();
    Vector diag(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = i; j < n; ++j) sum += inv.at(i, j) * inv.at(i, j);
        diag[i] = sum;
    }
    return diag;
}

EigenDecomposition jacobi_eigen_symmetric(const Matrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw std::invalid_argument("linalg: matrix is not square");
    Matrix a = input;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

    auto off_diagonal_norm = [&]() {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) sum += a.at(i, j) * a.at(i, j);
        return std::sqrt(sum);
    };

    const double tol = 1e-14 * std::max(1.0, off_diagonal_norm());
    for (int sweep = 0; sweep < 100 && off_diagonal_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = a.at(p, p), aqq = a.at(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v.at(k, p), vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a.at(i, i) > a.at(j, j); });

    EigenDecomposition result;
    result.values.resize(n);
    result.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        result.values[k] = a.at(src, src);
        // Fix the sign: largest-magnitude component positive, lowest index on
        // magnitude ties.
        std::size_t pivot = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(v.at(i, src));
            if (mag > best + 1e-15) {
                best = mag;
                pivot = i;
            }
        }
        const double sign = v.at(pivot, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) result.vectors.at(i, k) = sign * v.at(i, src);
    }
    return result;
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// Continued fraction for the incomplete beta, modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 1e-15;
    constexpr double kTiny = 1e-300;

    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double numerator = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + numerator * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + numerator / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        numerator = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + numerator * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + numerator / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("linalg: beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - log_beta(b, a)) *
                     beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("linalg: degrees of freedom must be positive");
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

} // namespace festcircuit::linalg
