#pragma once

#include <Eigen/Dense>
#include <complex>

namespace slkrein {

using Cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Mat2r = Eigen::Matrix2d;

inline constexpr Cplx kImag{0.0, 1.0};

inline Mat2 mat2(Cplx a11, Cplx a12, Cplx a21, Cplx a22) {
    Mat2 m;
    m << a11, a12, a21, a22;
    return m;
}

// Column-swap involution; conjugating by it exchanges the two boundary slots.
inline Mat2 swap_matrix() { return mat2(0, 1, 1, 0); }

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

// Smallest/largest singular values, the workhorse for all rank decisions.
inline std::pair<double, double> singular_range(const Mat2& m) {
    Eigen::JacobiSVD<Mat2> svd(m);
    return {svd.singularValues()(1), svd.singularValues()(0)};
}

inline int rank2x2(const Mat2& m, double rel_tol = 1e-10) {
    auto [smin, smax] = singular_range(m);
    if (smax <= 0.0) return 0;
    if (smin <= rel_tol * smax) return 1;
    return 2;
}

// Rank of the 2x4 concatenation (M1 M2).
inline int rank2x4(const Mat2& m1, const Mat2& m2, double rel_tol = 1e-10) {
    Eigen::Matrix<Cplx, 2, 4> cat;
    cat << m1, m2;
    Eigen::JacobiSVD<Eigen::Matrix<Cplx, 2, 4>> svd(cat);
    double smax = svd.singularValues()(0);
    if (smax <= 0.0) return 0;
    int r = 0;
    for (int i = 0; i < 2; ++i)
        if (svd.singularValues()(i) > rel_tol * smax) ++r;
    return r;
}

// Eigenvalues of the Hermitian part (M - M^*)/(2i), ascending.
inline std::pair<double, double> hermitian_imag_eigs(const Mat2& m) {
    Mat2 im = (m - m.adjoint()) / (2.0 * kImag);
    Eigen::SelfAdjointEigenSolver<Mat2> es(im);
    return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

}  // namespace slkrein
