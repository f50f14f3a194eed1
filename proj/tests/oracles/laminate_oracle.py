#!/usr/bin/env python3
"""Rank-1 laminate oracle for the homogenized plane-elasticity tensor.

Layers are stacked along y (interfaces are horizontal lines), so traction
components sigma22, sigma12 are continuous across layers and the tangential
strain eps11 is continuous. The effective Voigt matrix follows from a 1D
partition of the phase matrices into tangential (p) and normal (n) blocks:

    C_nn^H = <C_nn^-1>^-1
    C_np^H = C_nn^H <C_nn^-1 C_np>
    C_pp^H = <C_pp - C_pn C_nn^-1 C_np> + <C_pn C_nn^-1> C_nn^H <C_nn^-1 C_np>

Voigt order is (11, 22, 12) with engineering shear. Values printed here are
frozen in tests/unit/test_homogenizer.cpp and tests/acceptance.cpp.
"""
import numpy as np


def isotropic(E, nu):
    mu = E / (2.0 * (1.0 + nu))
    kappa = E / (2.0 * (1.0 - nu))
    return np.array([[kappa + mu, kappa - mu, 0.0],
                     [kappa - mu, kappa + mu, 0.0],
                     [0.0, 0.0, mu]])


def laminate(phases, fractions):
    p = [0]
    n = [1, 2]
    inv_nn = sum(f * np.linalg.inv(C[np.ix_(n, n)]) for C, f in zip(phases, fractions))
    c_nn = np.linalg.inv(inv_nn)
    inv_np = sum(f * np.linalg.inv(C[np.ix_(n, n)]) @ C[np.ix_(n, p)] for C, f in zip(phases, fractions))
    c_np = c_nn @ inv_np
    schur = sum(f * (C[np.ix_(p, p)] - C[np.ix_(p, n)] @ np.linalg.inv(C[np.ix_(n, n)]) @ C[np.ix_(n, p)])
                for C, f in zip(phases, fractions))
    c_pp = schur + inv_np.T @ c_nn @ inv_np
    out = np.zeros((3, 3))
    out[np.ix_(p, p)] = c_pp
    out[np.ix_(n, n)] = c_nn
    out[np.ix_(n, p)] = c_np
    out[np.ix_(p, n)] = c_np.T
    return out


if __name__ == "__main__":
    C = laminate([isotropic(0.91, 0.3), isotropic(1.82, 0.3)], [0.5, 0.5])
    np.set_printoptions(precision=15)
    print("A1111 = %.15g" % C[0, 0])
    print("A1122 = %.15g" % C[0, 1])
    print("A2222 = %.15g" % C[1, 1])
    print("A1212 = %.15g" % C[2, 2])
