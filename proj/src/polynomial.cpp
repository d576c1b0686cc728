#include "fbeuler/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace fbeuler {

namespace {
double ipow(double b, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}
} // namespace

double Polynomial::eval(const Vec3& p) const {
    double s = 0.0;
    for (const auto& m : terms_) {
        s += m.coeff * ipow(p[0], m.px) * ipow(p[1], m.py) * ipow(p[2], m.pz);
    }
    return s;
}

Polynomial Polynomial::derivative(int axis) const {
    std::vector<Monomial> out;
    for (const auto& m : terms_) {
        Monomial d = m;
        int* p = axis == 0 ? &d.px : axis == 1 ? &d.py : &d.pz;
        if (*p == 0) continue;
        d.coeff *= *p;
        *p -= 1;
        out.push_back(d);
    }
    return Polynomial(std::move(out));
}

Polynomial Polynomial::laplacian() const {
    return derivative(0).derivative(0) + derivative(1).derivative(1) +
           derivative(2).derivative(2);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<Monomial> out = terms_;
    out.insert(out.end(), o.terms_.begin(), o.terms_.end());
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    return *this + o * -1.0;
}

Polynomial Polynomial::operator*(double s) const {
    std::vector<Monomial> out = terms_;
    for (auto& m : out) m.coeff *= s;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    std::vector<Monomial> out;
    out.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            out.push_back({a.coeff * b.coeff, a.px + b.px, a.py + b.py, a.pz + b.pz});
        }
    }
    return Polynomial(std::move(out));
}

bool Polynomial::is_zero(double tol) const {
    for (const auto& m : terms_) {
        if (std::abs(m.coeff) > tol) return false;
    }
    return true;
}

void Polynomial::simplify() {
    std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
        if (a.px != b.px) return a.px < b.px;
        if (a.py != b.py) return a.py < b.py;
        return a.pz < b.pz;
    });
    std::vector<Monomial> merged;
    for (const auto& m : terms_) {
        if (!merged.empty() && merged.back().px == m.px && merged.back().py == m.py &&
            merged.back().pz == m.pz) {
            merged.back().coeff += m.coeff;
        } else {
            merged.push_back(m);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Monomial& m) { return m.coeff == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

PolyVectorField PolyVectorField::curl() const {
    return {z.derivative(1) - y.derivative(2),
            x.derivative(2) - z.derivative(0),
            y.derivative(0) - x.derivative(1)};
}

Polynomial PolyVectorField::divergence() const {
    return x.derivative(0) + y.derivative(1) + z.derivative(2);
}

Mat3 PolyVectorField::gradient(const Vec3& p) const {
    Mat3 g;
    const Polynomial* comp[3] = {&x, &y, &z};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            g(i, j) = comp[j]->derivative(i).eval(p);
        }
    }
    return g;
}

PolyVectorField PolyVectorField::laplacian() const {
    return {x.laplacian(), y.laplacian(), z.laplacian()};
}

PolyVectorField gradient_field(const Polynomial& phi) {
    return {phi.derivative(0), phi.derivative(1), phi.derivative(2)};
}

} // namespace fbeuler
