#pragma once

#include <cmath>
#include <numbers>

#include "lcl/mps.hpp"

namespace lcl::fixtures {

inline CMatrix pauli_x() { return (CMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline CMatrix pauli_y() { return (CMatrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished(); }
inline CMatrix pauli_z() { return (CMatrix(2, 2) << 1, 0, 0, -1).finished(); }

inline MPSFamily identity_family(int D) {
    return MPSFamily(KrausSet({CMatrix::Identity(D, D)}), "identity");
}

// Two-block family on C^4: block H1 spanned by (|1>-|2>)/sqrt2, (|3>-|4>)/sqrt2
// carries {X,Y,Z}/sqrt3, block H2 (symmetric combinations) carries {X, iY}/sqrt2.
// Gamma(N) = 1 + 3(-1/3)^N + 1 + (-1)^N.
inline MPSFamily example1() {
    const double s = 1 / std::sqrt(2.0);
    CMatrix u(4, 4);
    u << s, 0, s, 0,
        -s, 0, s, 0,
         0, s, 0, s,
         0, -s, 0, s;
    const CMatrix z2 = CMatrix::Zero(2, 2);
    const double r3 = 1 / std::sqrt(3.0), r2 = 1 / std::sqrt(2.0);
    const CMatrix b1[5] = {r3 * pauli_x(), r3 * pauli_y(), r3 * pauli_z(), z2, z2};
    const CMatrix b2[5] = {z2, z2, z2, r2 * pauli_x(), cplx(0, r2) * pauli_y()};
    std::vector<CMatrix> mats;
    for (int k = 0; k < 5; ++k) {
        CMatrix blk = CMatrix::Zero(4, 4);
        blk.topLeftCorner(2, 2) = b1[k];
        blk.bottomRightCorner(2, 2) = b2[k];
        mats.push_back(u * blk * u.adjoint());
    }
    return MPSFamily(KrausSet(std::move(mats)), "example1");
}

// The three 4x4 matrices exactly as printed, with varpi = exp(i pi/4).
inline MPSFamily example1_literal() {
    const double a = std::sqrt(3.0) / 6, b = std::sqrt(2.0) / 4;
    const cplx w = std::polar(1.0, std::numbers::pi / 4);
    const cplx a1 = a + b, a2 = -a + b, a3 = a * w + b, a4 = -a * w + b, a5 = a, a6 = -a;
    CMatrix m1(4, 4), m2(4, 4), m3(4, 4);
    m1 << 0, 0, a1, a2, 0, 0, a2, a1, a1, a2, 0, 0, a2, a1, 0, 0;
    m2 << 0, 0, a3, a4, 0, 0, a4, a3, a3, a4, 0, 0, a4, a3, 0, 0;
    m3 << a5, a6, 0, 0, a6, a5, 0, 0, 0, 0, a6, a5, 0, 0, a5, a6;
    return MPSFamily(KrausSet({m1, m2, m3}), "example1_literal");
}

} // namespace lcl::fixtures
