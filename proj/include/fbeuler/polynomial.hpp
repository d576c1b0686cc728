#pragma once

#include <initializer_list>
#include <vector>

#include "fbeuler/surface_mesh.hpp"

namespace fbeuler {

/// Trivariate polynomial as a flat monomial list. Used for analytic velocity
/// specifications and their exact derivatives.
struct Monomial {
    double coeff = 0.0;
    int px = 0, py = 0, pz = 0;
};

class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<Monomial> terms) : terms_(terms) { simplify(); }
    explicit Polynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) { simplify(); }
    static Polynomial constant(double c) { return Polynomial({Monomial{c, 0, 0, 0}}); }

    double eval(const Vec3& p) const;
    Polynomial derivative(int axis) const;
    Polynomial laplacian() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial operator*(const Polynomial& o) const;

    bool is_zero(double tol = 1e-14) const;
    const std::vector<Monomial>& terms() const { return terms_; }

private:
    void simplify();
    std::vector<Monomial> terms_;
};

/// Polynomial vector field with exact curl / divergence / gradient algebra.
struct PolyVectorField {
    Polynomial x, y, z;

    Vec3 eval(const Vec3& p) const { return Vec3(x.eval(p), y.eval(p), z.eval(p)); }
    PolyVectorField curl() const;
    Polynomial divergence() const;
    /// (grad u)_ij = d u_j / d x_i
    Mat3 gradient(const Vec3& p) const;
    PolyVectorField laplacian() const;
};

PolyVectorField gradient_field(const Polynomial& phi);

} // namespace fbeuler
