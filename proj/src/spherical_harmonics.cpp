#include "fbeuler/spherical_harmonics.hpp"

#include <cmath>

#include "fbeuler/polynomial.hpp"

namespace fbeuler {

namespace {

// Real orthonormal solid harmonics r^l Y_lm as homogeneous polynomials,
// indexed by l*l + (m + l), l <= 4.
const std::vector<Polynomial>& solid_table() {
    static const std::vector<Polynomial> table = [] {
        std::vector<Polynomial> t(25);
        auto mono = [](double c, int px, int py, int pz) { return Monomial{c, px, py, pz}; };

        t[0] = Polynomial({mono(0.28209479177387814, 0, 0, 0)});

        const double c1 = 0.48860251190291992;
        t[1] = Polynomial({mono(c1, 0, 1, 0)});  // y
        t[2] = Polynomial({mono(c1, 0, 0, 1)});  // z
        t[3] = Polynomial({mono(c1, 1, 0, 0)});  // x

        const double c2a = 1.0925484305920792;   // xy, yz, xz
        const double c20 = 0.31539156525252005;  // 2z^2 - x^2 - y^2
        const double c22 = 0.54627421529603959;  // x^2 - y^2
        t[4] = Polynomial({mono(c2a, 1, 1, 0)});
        t[5] = Polynomial({mono(c2a, 0, 1, 1)});
        t[6] = Polynomial({mono(2 * c20, 0, 0, 2), mono(-c20, 2, 0, 0), mono(-c20, 0, 2, 0)});
        t[7] = Polynomial({mono(c2a, 1, 0, 1)});
        t[8] = Polynomial({mono(c22, 2, 0, 0), mono(-c22, 0, 2, 0)});

        const double c3a = 0.59004358992664352;  // (3x^2 - y^2) y and (x^2 - 3y^2) x
        const double c3b = 2.8906114426405538;   // xyz
        const double c3c = 0.45704579946446573;  // (4z^2 - x^2 - y^2) {y,x}
        const double c30 = 0.37317633259011539;  // z (2z^2 - 3x^2 - 3y^2)
        const double c32 = 1.4453057213202769;   // z (x^2 - y^2)
        t[9] = Polynomial({mono(3 * c3a, 2, 1, 0), mono(-c3a, 0, 3, 0)});
        t[10] = Polynomial({mono(c3b, 1, 1, 1)});
        t[11] = Polynomial({mono(4 * c3c, 0, 1, 2), mono(-c3c, 2, 1, 0), mono(-c3c, 0, 3, 0)});
        t[12] = Polynomial({mono(2 * c30, 0, 0, 3), mono(-3 * c30, 2, 0, 1), mono(-3 * c30, 0, 2, 1)});
        t[13] = Polynomial({mono(4 * c3c, 1, 0, 2), mono(-c3c, 3, 0, 0), mono(-c3c, 1, 2, 0)});
        t[14] = Polynomial({mono(c32, 2, 0, 1), mono(-c32, 0, 2, 1)});
        t[15] = Polynomial({mono(c3a, 3, 0, 0), mono(-3 * c3a, 1, 2, 0)});

        const double c4a = 2.5033429417967046;   // xy (x^2 - y^2)
        const double c4b = 1.7701307697799304;   // (3x^2 - y^2) yz and (x^2 - 3y^2) xz
        const double c4c = 0.94617469575756008;  // xy (6z^2 - x^2 - y^2)
        const double c4d = 0.66904654355728921;  // {y,x} z (4z^2 - 3x^2 - 3y^2)
        const double c40 = 0.10578554691520431;  // 3x^4+3y^4+8z^4+6x^2y^2-24x^2z^2-24y^2z^2
        const double c42 = 0.47308734787878004;  // (x^2-y^2)(6z^2 - x^2 - y^2)
        const double c44 = 0.62583573544917614;  // x^4 - 6x^2y^2 + y^4
        t[16] = Polynomial({mono(c4a, 3, 1, 0), mono(-c4a, 1, 3, 0)});
        t[17] = Polynomial({mono(3 * c4b, 2, 1, 1), mono(-c4b, 0, 3, 1)});
        t[18] = Polynomial({mono(6 * c4c, 1, 1, 2), mono(-c4c, 3, 1, 0), mono(-c4c, 1, 3, 0)});
        t[19] = Polynomial({mono(4 * c4d, 0, 1, 3), mono(-3 * c4d, 2, 1, 1), mono(-3 * c4d, 0, 3, 1)});
        t[20] = Polynomial({mono(3 * c40, 4, 0, 0), mono(3 * c40, 0, 4, 0), mono(8 * c40, 0, 0, 4),
                            mono(6 * c40, 2, 2, 0), mono(-24 * c40, 2, 0, 2), mono(-24 * c40, 0, 2, 2)});
        t[21] = Polynomial({mono(4 * c4d, 1, 0, 3), mono(-3 * c4d, 3, 0, 1), mono(-3 * c4d, 1, 2, 1)});
        t[22] = Polynomial({mono(6 * c42, 2, 0, 2), mono(-c42, 4, 0, 0), mono(-c42, 2, 2, 0),
                            mono(-6 * c42, 0, 2, 2), mono(c42, 0, 4, 0), mono(c42, 2, 2, 0)});
        t[23] = Polynomial({mono(c4b, 3, 0, 1), mono(-3 * c4b, 1, 2, 1)});
        t[24] = Polynomial({mono(c44, 4, 0, 0), mono(-6 * c44, 2, 2, 0), mono(c44, 0, 4, 0)});
        return t;
    }();
    return table;
}

int table_index(int l, int m) {
    if (l < 0 || l > 4 || m < -l || m > l) throw Error("spherical harmonic (l,m) out of range");
    return l * l + m + l;
}

} // namespace

const Polynomial& solid_harmonic_poly(int l, int m) {
    return solid_table()[table_index(l, m)];
}

double solid_harmonic(int l, int m, const Vec3& x) {
    return solid_table()[table_index(l, m)].eval(x);
}

Vec3 solid_harmonic_gradient(int l, int m, const Vec3& x) {
    const Polynomial& p = solid_table()[table_index(l, m)];
    return Vec3(p.derivative(0).eval(x), p.derivative(1).eval(x), p.derivative(2).eval(x));
}

double real_sph_harmonic(int l, int m, const Vec3& x) {
    double r = x.norm();
    if (r == 0.0) throw Error("spherical harmonic direction undefined at origin");
    Vec3 dir = x / r;
    return solid_harmonic(l, m, dir);
}

} // namespace fbeuler
