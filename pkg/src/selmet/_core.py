"""Compiled inner loops for the landmark dynamics.

Everything here works on plain float64 arrays and scalars so numba can
compile it; the public modules wrap these with validation and typed
errors.  Conventions:

* landmark positions/momenta are (M, 2) arrays,
* control-field centroids are a (K, 2) array (K may be 0),
* the flattened phase vector is [q.ravel(), p.ravel()], length 4M,
* a returned ``blow`` index is -1 on success, otherwise the 1-based
  step at which the state first became non-finite.

Velocity kernel: K(r) = exp(-|r|^2 / (2 s_k)) with s_k the kernel
variance.  Control field: nu(x) = floor + sum_k exp(-|h_k - x|^2 / s_nu)
(no factor 2 in the exponent).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def nu_at(x0, x1, cent, s_nu, floor):
    v = floor
    for k in range(cent.shape[0]):
        dx = cent[k, 0] - x0
        dy = cent[k, 1] - x1
        v += np.exp(-(dx * dx + dy * dy) / s_nu)
    return v


@njit(cache=True)
def rhs(q, p, cent, s_nu, floor, s_k, dq, dp):
    """Phase velocity of the selective geodesic equations, written into dq, dp."""
    M = q.shape[0]
    for i in range(M):
        nv = floor
        ng0 = 0.0
        ng1 = 0.0
        for k in range(cent.shape[0]):
            dx = cent[k, 0] - q[i, 0]
            dy = cent[k, 1] - q[i, 1]
            e = np.exp(-(dx * dx + dy * dy) / s_nu)
            nv += e
            ng0 += (2.0 / s_nu) * dx * e
            ng1 += (2.0 / s_nu) * dy * e
        u0 = 0.0
        u1 = 0.0
        f0 = 0.0
        f1 = 0.0
        for j in range(M):
            rx = q[i, 0] - q[j, 0]
            ry = q[i, 1] - q[j, 1]
            kij = np.exp(-(rx * rx + ry * ry) / (2.0 * s_k))
            u0 += p[j, 0] * kij
            u1 += p[j, 1] * kij
            cij = p[i, 0] * p[j, 0] + p[i, 1] * p[j, 1]
            f0 += cij * (-rx / s_k) * kij
            f1 += cij * (-ry / s_k) * kij
        pi2 = p[i, 0] * p[i, 0] + p[i, 1] * p[i, 1]
        dq[i, 0] = u0 + nv * p[i, 0]
        dq[i, 1] = u1 + nv * p[i, 1]
        dp[i, 0] = -f0 - 0.5 * ng0 * pi2
        dp[i, 1] = -f1 - 0.5 * ng1 * pi2


@njit(cache=True)
def hamiltonian(q, p, cent, s_nu, floor, s_k):
    M = q.shape[0]
    h = 0.0
    for i in range(M):
        for j in range(M):
            rx = q[i, 0] - q[j, 0]
            ry = q[i, 1] - q[j, 1]
            kij = np.exp(-(rx * rx + ry * ry) / (2.0 * s_k))
            h += 0.5 * kij * (p[i, 0] * p[j, 0] + p[i, 1] * p[j, 1])
        nv = nu_at(q[i, 0], q[i, 1], cent, s_nu, floor)
        h += 0.5 * nv * (p[i, 0] * p[i, 0] + p[i, 1] * p[i, 1])
    return h


@njit(cache=True)
def rhs_jacobian(q, p, cent, s_nu, floor, s_k, A):
    """Jacobian of the phase velocity w.r.t. the flattened phase vector.

    A is (4M, 4M), overwritten.  Row/column layout matches
    [q.ravel(), p.ravel()].
    """
    M = q.shape[0]
    m2 = 2 * M
    A[:, :] = 0.0
    for i in range(M):
        nv = floor
        n0 = 0.0
        n1 = 0.0
        hn00 = 0.0
        hn01 = 0.0
        hn11 = 0.0
        c2 = 2.0 / s_nu
        for k in range(cent.shape[0]):
            dx = cent[k, 0] - q[i, 0]
            dy = cent[k, 1] - q[i, 1]
            e = np.exp(-(dx * dx + dy * dy) / s_nu)
            nv += e
            n0 += c2 * dx * e
            n1 += c2 * dy * e
            hn00 += c2 * e * (c2 * dx * dx - 1.0)
            hn01 += c2 * e * (c2 * dx * dy)
            hn11 += c2 * e * (c2 * dy * dy - 1.0)
        pi0 = p[i, 0]
        pi1 = p[i, 1]
        pi2 = pi0 * pi0 + pi1 * pi1
        # running sums for the i-th diagonal blocks
        spg00 = spg01 = spg10 = spg11 = 0.0  # sum_l p_l (grad K)^T
        sch00 = sch01 = sch11 = 0.0          # sum_{l!=i} (p_i.p_l) Hess K
        sgp00 = sgp01 = sgp10 = sgp11 = 0.0  # sum_l (grad K) p_l^T
        for l in range(M):
            rx = q[i, 0] - q[l, 0]
            ry = q[i, 1] - q[l, 1]
            kil = np.exp(-(rx * rx + ry * ry) / (2.0 * s_k))
            g0 = -rx / s_k * kil
            g1 = -ry / s_k * kil
            cil = pi0 * p[l, 0] + pi1 * p[l, 1]
            spg00 += p[l, 0] * g0
            spg01 += p[l, 0] * g1
            spg10 += p[l, 1] * g0
            spg11 += p[l, 1] * g1
            sgp00 += g0 * p[l, 0]
            sgp01 += g0 * p[l, 1]
            sgp10 += g1 * p[l, 0]
            sgp11 += g1 * p[l, 1]
            if l != i:
                h00 = kil * (rx * rx / (s_k * s_k) - 1.0 / s_k)
                h01 = kil * (rx * ry / (s_k * s_k))
                h11 = kil * (ry * ry / (s_k * s_k) - 1.0 / s_k)
                sch00 += cil * h00
                sch01 += cil * h01
                sch11 += cil * h11
                # dq_i / dq_l
                A[2 * i, 2 * l] = -p[l, 0] * g0
                A[2 * i, 2 * l + 1] = -p[l, 0] * g1
                A[2 * i + 1, 2 * l] = -p[l, 1] * g0
                A[2 * i + 1, 2 * l + 1] = -p[l, 1] * g1
                # dq_i / dp_l
                A[2 * i, m2 + 2 * l] = kil
                A[2 * i + 1, m2 + 2 * l + 1] = kil
                # dp_i / dq_l
                A[m2 + 2 * i, 2 * l] = cil * h00
                A[m2 + 2 * i, 2 * l + 1] = cil * h01
                A[m2 + 2 * i + 1, 2 * l] = cil * h01
                A[m2 + 2 * i + 1, 2 * l + 1] = cil * h11
                # dp_i / dp_l
                A[m2 + 2 * i, m2 + 2 * l] = -g0 * pi0
                A[m2 + 2 * i, m2 + 2 * l + 1] = -g0 * pi1
                A[m2 + 2 * i + 1, m2 + 2 * l] = -g1 * pi0
                A[m2 + 2 * i + 1, m2 + 2 * l + 1] = -g1 * pi1
        # dq_i / dq_i
        A[2 * i, 2 * i] = spg00 + pi0 * n0
        A[2 * i, 2 * i + 1] = spg01 + pi0 * n1
        A[2 * i + 1, 2 * i] = spg10 + pi1 * n0
        A[2 * i + 1, 2 * i + 1] = spg11 + pi1 * n1
        # dq_i / dp_i: (K(0) + nu) I
        A[2 * i, m2 + 2 * i] = 1.0 + nv
        A[2 * i + 1, m2 + 2 * i + 1] = 1.0 + nv
        # dp_i / dq_i
        A[m2 + 2 * i, 2 * i] = -sch00 - 0.5 * pi2 * hn00
        A[m2 + 2 * i, 2 * i + 1] = -sch01 - 0.5 * pi2 * hn01
        A[m2 + 2 * i + 1, 2 * i] = -sch01 - 0.5 * pi2 * hn01
        A[m2 + 2 * i + 1, 2 * i + 1] = -sch11 - 0.5 * pi2 * hn11
        # dp_i / dp_i
        A[m2 + 2 * i, m2 + 2 * i] = -sgp00 - n0 * pi0
        A[m2 + 2 * i, m2 + 2 * i + 1] = -sgp01 - n0 * pi1
        A[m2 + 2 * i + 1, m2 + 2 * i] = -sgp10 - n1 * pi0
        A[m2 + 2 * i + 1, m2 + 2 * i + 1] = -sgp11 - n1 * pi1


@njit(cache=True)
def _all_finite(a):
    for v in a.flat:
        if not np.isfinite(v):
            return False
    return True


@njit(cache=True)
def rk4_path(q0, p0, cent, s_nu, floor, s_k, t0, t1, n_steps):
    """Classical fixed-step RK4; stores every state and its Hamiltonian."""
    M = q0.shape[0]
    qs = np.empty((n_steps + 1, M, 2))
    ps = np.empty((n_steps + 1, M, 2))
    hs = np.empty(n_steps + 1)
    qs[0] = q0
    ps[0] = p0
    hs[0] = hamiltonian(q0, p0, cent, s_nu, floor, s_k)
    h = (t1 - t0) / n_steps
    q = q0.copy()
    p = p0.copy()
    k1q = np.empty((M, 2))
    k1p = np.empty((M, 2))
    k2q = np.empty((M, 2))
    k2p = np.empty((M, 2))
    k3q = np.empty((M, 2))
    k3p = np.empty((M, 2))
    k4q = np.empty((M, 2))
    k4p = np.empty((M, 2))
    for step in range(n_steps):
        rhs(q, p, cent, s_nu, floor, s_k, k1q, k1p)
        rhs(q + (0.5 * h) * k1q, p + (0.5 * h) * k1p, cent, s_nu, floor, s_k, k2q, k2p)
        rhs(q + (0.5 * h) * k2q, p + (0.5 * h) * k2p, cent, s_nu, floor, s_k, k3q, k3p)
        rhs(q + h * k3q, p + h * k3p, cent, s_nu, floor, s_k, k4q, k4p)
        q = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        p = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        if not (_all_finite(q) and _all_finite(p)):
            return qs, ps, hs, step + 1
        qs[step + 1] = q
        ps[step + 1] = p
        hs[step + 1] = hamiltonian(q, p, cent, s_nu, floor, s_k)
    return qs, ps, hs, -1


@njit(cache=True)
def _flat_rhs(y, cent, s_nu, floor, s_k, out):
    M = y.shape[0] // 4
    q = y[: 2 * M].reshape(M, 2)
    p = y[2 * M :].reshape(M, 2)
    dq = out[: 2 * M].reshape(M, 2)
    dp = out[2 * M :].reshape(M, 2)
    rhs(q, p, cent, s_nu, floor, s_k, dq, dp)


@njit(cache=True)
def _flat_jacobian(y, cent, s_nu, floor, s_k, A):
    M = y.shape[0] // 4
    q = y[: 2 * M].reshape(M, 2)
    p = y[2 * M :].reshape(M, 2)
    rhs_jacobian(q, p, cent, s_nu, floor, s_k, A)


@njit(cache=True)
def rk4_endpoint_sensitivity(q0, p0, cent, s_nu, floor, s_k, t0, t1, n_steps):
    """RK4 with the variational system: returns (y_end, d y_end / d p0, blow).

    Each RK4 stage is differentiated analytically, so the sensitivity is
    the exact derivative of the discrete endpoint map.
    """
    M = q0.shape[0]
    m2 = 2 * M
    D = 4 * M
    y = np.empty(D)
    for i in range(M):
        y[2 * i] = q0[i, 0]
        y[2 * i + 1] = q0[i, 1]
        y[m2 + 2 * i] = p0[i, 0]
        y[m2 + 2 * i + 1] = p0[i, 1]
    S = np.zeros((D, m2))
    for j in range(m2):
        S[m2 + j, j] = 1.0
    A = np.empty((D, D))
    k1 = np.empty(D)
    k2 = np.empty(D)
    k3 = np.empty(D)
    k4 = np.empty(D)
    h = (t1 - t0) / n_steps
    for step in range(n_steps):
        _flat_rhs(y, cent, s_nu, floor, s_k, k1)
        _flat_jacobian(y, cent, s_nu, floor, s_k, A)
        K1 = np.dot(A, S)

        y2 = y + (0.5 * h) * k1
        _flat_rhs(y2, cent, s_nu, floor, s_k, k2)
        _flat_jacobian(y2, cent, s_nu, floor, s_k, A)
        K2 = np.dot(A, S + (0.5 * h) * K1)

        y3 = y + (0.5 * h) * k2
        _flat_rhs(y3, cent, s_nu, floor, s_k, k3)
        _flat_jacobian(y3, cent, s_nu, floor, s_k, A)
        K3 = np.dot(A, S + (0.5 * h) * K2)

        y4 = y + h * k3
        _flat_rhs(y4, cent, s_nu, floor, s_k, k4)
        _flat_jacobian(y4, cent, s_nu, floor, s_k, A)
        K4 = np.dot(A, S + h * K3)

        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        S = S + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
        if not (_all_finite(y) and _all_finite(S)):
            return y, S, step + 1
    return y, S, -1
