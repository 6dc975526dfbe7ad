#pragma once

#include <cstddef>
#include <vector>

namespace liouville {

using Vec = std::vector<double>;

/// Dense square matrix, row-major. Sizes here are tiny (n <= 16), so all
/// factorizations are straightforward pivoted eliminations.
class Mat {
public:
    Mat() = default;
    explicit Mat(int n, double fill = 0.0) : n_(n), a_(static_cast<size_t>(n) * n, fill) {}

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    static Mat identity(int n);

    bool operator==(const Mat&) const = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

Vec mat_vec(const Mat& m, const Vec& x);
Mat mat_mul(const Mat& a, const Mat& b);

double max_abs(const Mat& m);
double max_abs(const Vec& v);

/// Determinant by LU with partial pivoting.
double determinant(Mat m);

/// Inverse by Gauss-Jordan with partial pivoting. Returns false when a pivot
/// collapses below `pivot_floor` times the matrix scale.
bool invert(const Mat& m, Mat& out, double pivot_floor = 1e-14);

/// Solve m x = b in place of a copy; false on pivot collapse.
bool solve_linear(Mat m, Vec b, Vec& x, double pivot_floor = 1e-14);

/// Singular values (descending) via one-sided Jacobi; adequate for the small
/// sensitivity matrices used here.
Vec singular_values(const Mat& m);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);

} // namespace liouville
