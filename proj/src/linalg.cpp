#include "liouville/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace liouville {

Mat Mat::identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vec mat_vec(const Mat& m, const Vec& x) {
    const int n = m.size();
    Vec y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    const int n = a.size();
    Mat c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

double max_abs(const Mat& m) {
    double v = 0.0;
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) v = std::max(v, std::fabs(m(i, j)));
    return v;
}

double max_abs(const Vec& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

double determinant(Mat m) {
    const int n = m.size();
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
            det = -det;
        }
        det *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

bool invert(const Mat& m, Mat& out, double pivot_floor) {
    const int n = m.size();
    Mat a = m;
    out = Mat::identity(n);
    const double scale = std::max(max_abs(m), 1e-300);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (std::fabs(a(piv, k)) < pivot_floor * scale) return false;
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(k, j));
                std::swap(out(piv, j), out(k, j));
            }
        const double inv_p = 1.0 / a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) *= inv_p;
            out(k, j) *= inv_p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                out(i, j) -= f * out(k, j);
            }
        }
    }
    return true;
}

bool solve_linear(Mat m, Vec b, Vec& x, double pivot_floor) {
    const int n = m.size();
    const double scale = std::max(max_abs(m), 1e-300);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
        if (std::fabs(m(piv, k)) < pivot_floor * scale) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
            std::swap(b[piv], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return true;
}

Vec singular_values(const Mat& m) {
    const int n = m.size();
    // One-sided Jacobi on the columns of a working copy.
    Mat a = m;
    bool rotated = true;
    int sweeps = 0;
    while (rotated && sweeps++ < 60) {
        rotated = false;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int i = 0; i < n; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                if (std::fabs(apq) <= 1e-30 + 1e-15 * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = cs * aip - sn * aiq;
                    a(i, q) = sn * aip + cs * aiq;
                }
            }
    }
    Vec sv(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a(i, j) * a(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

} // namespace liouville
