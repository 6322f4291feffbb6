// Dense 2x2 complex matrix algebra with closed-form Hermitian eigensystems.
// Small enough that no external linear-algebra dependency is warranted.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>

namespace qthermo {

using cplx = std::complex<double>;

struct mat2 {
    // row-major: e[0]=(0,0) e[1]=(0,1) e[2]=(1,0) e[3]=(1,1)
    std::array<cplx, 4> e{};

    static mat2 zero() { return {}; }
    static mat2 identity() { return mat2{{cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)}}; }
    static mat2 diagonal(double a, double d) { return mat2{{cplx(a), cplx(0.0), cplx(0.0), cplx(d)}}; }

    cplx& operator()(int i, int j) { return e[2 * i + j]; }
    const cplx& operator()(int i, int j) const { return e[2 * i + j]; }

    mat2& operator+=(const mat2& o) {
        for (int k = 0; k < 4; ++k) e[k] += o.e[k];
        return *this;
    }
    mat2& operator-=(const mat2& o) {
        for (int k = 0; k < 4; ++k) e[k] -= o.e[k];
        return *this;
    }
    mat2& operator*=(cplx s) {
        for (int k = 0; k < 4; ++k) e[k] *= s;
        return *this;
    }
};

inline mat2 operator+(mat2 a, const mat2& b) { return a += b; }
inline mat2 operator-(mat2 a, const mat2& b) { return a -= b; }
inline mat2 operator*(cplx s, mat2 a) { return a *= s; }
inline mat2 operator*(mat2 a, cplx s) { return a *= s; }
inline mat2 operator*(double s, mat2 a) { return a *= cplx(s); }
inline mat2 operator-(const mat2& a) { return cplx(-1.0) * a; }

inline mat2 operator*(const mat2& a, const mat2& b) {
    mat2 r;
    r(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    r(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    r(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    r(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return r;
}

inline cplx trace(const mat2& m) { return m.e[0] + m.e[3]; }

inline mat2 adjoint(const mat2& m) {
    return mat2{{std::conj(m.e[0]), std::conj(m.e[2]), std::conj(m.e[1]), std::conj(m.e[3])}};
}

inline mat2 commutator(const mat2& a, const mat2& b) { return a * b - b * a; }

inline double hermiticity_defect(const mat2& m) {
    double d = std::abs(std::imag(m.e[0]));
    d = std::max(d, std::abs(std::imag(m.e[3])));
    d = std::max(d, std::abs(m.e[1] - std::conj(m.e[2])));
    return d;
}

inline double max_abs_diff(const mat2& a, const mat2& b) {
    double d = 0.0;
    for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a.e[k] - b.e[k]));
    return d;
}

using vec2 = std::array<cplx, 2>;

inline cplx inner(const vec2& u, const vec2& v) {
    return std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1];
}

inline vec2 mat_vec(const mat2& m, const vec2& v) {
    return {m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]};
}

// |u><v|
inline mat2 outer(const vec2& u, const vec2& v) {
    return mat2{{u[0] * std::conj(v[0]), u[0] * std::conj(v[1]),
                 u[1] * std::conj(v[0]), u[1] * std::conj(v[1])}};
}

// <u| m |u>, real part (exact for Hermitian m)
inline double expectation(const mat2& m, const vec2& u) {
    cplx mu0 = m(0, 0) * u[0] + m(0, 1) * u[1];
    cplx mu1 = m(1, 0) * u[0] + m(1, 1) * u[1];
    return std::real(std::conj(u[0]) * mu0 + std::conj(u[1]) * mu1);
}

struct eigensystem2 {
    std::array<double, 2> values;   // ascending
    std::array<vec2, 2> vectors;    // orthonormal, vectors[k] belongs to values[k]
};

// Closed-form spectral decomposition of a Hermitian 2x2 matrix. The imaginary
// parts of the diagonal are ignored; callers are expected to pass matrices
// that are Hermitian to tolerance.
inline eigensystem2 eigen_hermitian(const mat2& m) {
    const double a = std::real(m(0, 0));
    const double d = std::real(m(1, 1));
    const cplx b = m(0, 1);
    const double ab = std::abs(b);
    const double mean = 0.5 * (a + d);
    const double delta = 0.5 * (a - d);
    const double r = std::hypot(delta, ab);

    eigensystem2 es;
    es.values = {mean - r, mean + r};
    if (ab == 0.0) {
        if (a <= d) {
            es.vectors = {vec2{cplx(1.0), cplx(0.0)}, vec2{cplx(0.0), cplx(1.0)}};
        } else {
            es.vectors = {vec2{cplx(0.0), cplx(1.0)}, vec2{cplx(1.0), cplx(0.0)}};
        }
        return es;
    }
    // (b, lambda - a) solves (m - lambda) v = 0 for either eigenvalue
    vec2 vp{b, cplx(r - delta)};
    vec2 vm{b, cplx(-r - delta)};
    const double np = std::sqrt(std::norm(vp[0]) + std::norm(vp[1]));
    const double nm = std::sqrt(std::norm(vm[0]) + std::norm(vm[1]));
    es.vectors = {vec2{vm[0] / nm, vm[1] / nm}, vec2{vp[0] / np, vp[1] / np}};
    return es;
}

// f applied to the spectrum: sum_k f(lambda_k) |v_k><v_k|
template <class F>
mat2 spectral_apply(const mat2& hermitian, F&& f) {
    const eigensystem2 es = eigen_hermitian(hermitian);
    return f(es.values[0]) * outer(es.vectors[0], es.vectors[0]) +
           f(es.values[1]) * outer(es.vectors[1], es.vectors[1]);
}

inline std::array<double, 2> eigenvalues_hermitian(const mat2& m) {
    return eigen_hermitian(m).values;
}

// (1/2) Tr |a - b| for Hermitian a, b
inline double trace_distance(const mat2& a, const mat2& b) {
    const auto ev = eigenvalues_hermitian(a - b);
    return 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));
}

inline double unitarity_defect(const mat2& u) {
    return max_abs_diff(adjoint(u) * u, mat2::identity());
}

}  // namespace qthermo
