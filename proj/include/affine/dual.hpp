#ifndef AFFINE_DUAL_HPP
#define AFFINE_DUAL_HPP

#include <cmath>

namespace affine {

// Forward-mode AD scalar. Nesting Dual<Dual<...>> gives higher derivatives.
template <class T>
struct Dual {
    T v{};  // value
    T d{};  // derivative along the seeded direction

    Dual() = default;
    Dual(double c) : v(c), d() {}
    Dual(const T& v_, const T& d_) : v(v_), d(d_) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
};

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return Dual<T>(-a.v, -a.d); }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T iv = T(1.0) / b.v;
    T q = a.v * iv;
    return Dual<T>(q, (a.d - q * b.d) * iv);
}

template <class T> Dual<T> operator+(const Dual<T>& a, double c) { return Dual<T>(a.v + c, a.d); }
template <class T> Dual<T> operator+(double c, const Dual<T>& a) { return Dual<T>(a.v + c, a.d); }
template <class T> Dual<T> operator-(const Dual<T>& a, double c) { return Dual<T>(a.v - c, a.d); }
template <class T> Dual<T> operator-(double c, const Dual<T>& a) { return Dual<T>(c - a.v, -a.d); }
template <class T> Dual<T> operator*(const Dual<T>& a, double c) { return Dual<T>(a.v * c, a.d * c); }
template <class T> Dual<T> operator*(double c, const Dual<T>& a) { return Dual<T>(a.v * c, a.d * c); }
template <class T> Dual<T> operator/(const Dual<T>& a, double c) { return a * (1.0 / c); }
template <class T> Dual<T> operator/(double c, const Dual<T>& a) { return Dual<T>(c) / a; }

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T> Dual<T> sin(const Dual<T>& a) { return Dual<T>(sin(a.v), cos(a.v) * a.d); }
template <class T> Dual<T> cos(const Dual<T>& a) { return Dual<T>(cos(a.v), -sin(a.v) * a.d); }
template <class T> Dual<T> exp(const Dual<T>& a) { T e = exp(a.v); return Dual<T>(e, e * a.d); }
template <class T> Dual<T> log(const Dual<T>& a) { return Dual<T>(log(a.v), a.d / a.v); }
template <class T> Dual<T> sqrt(const Dual<T>& a) { T s = sqrt(a.v); return Dual<T>(s, a.d / (2.0 * s)); }
template <class T> Dual<T> pow(const Dual<T>& a, double c) {
    T p = pow(a.v, c);
    return Dual<T>(p, c * pow(a.v, c - 1.0) * a.d);
}

// Value part all the way down; used for pivoting and diagnostics.
inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.v); }

inline bool finite_all(double x) { return std::isfinite(x); }
template <class T> bool finite_all(const Dual<T>& x) { return finite_all(x.v) && finite_all(x.d); }

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;
using Dual3 = Dual<Dual2>;

}  // namespace affine

#endif
