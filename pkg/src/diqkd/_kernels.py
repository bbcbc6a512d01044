"""Scalar numerical kernels shared by the public modules.

Everything here is flat float64 code compiled by numba (see _accel).  The
public modules in this package validate inputs and then delegate to these
kernels; the kernels themselves assume valid inputs and never raise.  Keep
Python objects, dicts and closures out of this file so the whole thing stays
compilable and cacheable.

Conventions used throughout:

* detector order is (A, A_perp, B, B_perp); subsets of detectors are bitmasks
  with bit 0 = A, bit 1 = A_perp, bit 2 = B, bit 3 = B_perp
* click patterns per party are two-bit masks: bit 0 = designated ("main")
  detector clicked, bit 1 = orthogonal detector clicked
* binarization maps pattern 1 ({main} only) to outcome -1, every other
  pattern to +1
* protocol codes: 0 = binary error correction, no preprocessing;
  1 = four-valued error correction, no preprocessing; 2 = four-valued error
  correction with bit-flip preprocessing probability p
* entropies are in bits
"""

import math

import numpy as np

from ._accel import jit, prange

INV_LN2 = 1.4426950408889634
CHSH_MAX = 2.8284271247461903  # 2*sqrt(2)

OBJ_ORACLE = 0
OBJ_RATE_SPDC = 1
OBJ_RATE_QUBIT = 2

PROTO_BINARY_EC = 0
PROTO_FOURVAL_EC = 1
PROTO_NOISY = 2


# ---------------------------------------------------------------------------
# entropies


@jit
def h2_k(z):
    """Binary entropy in bits; round-off just outside [0, 1] is clamped."""
    if z <= 0.0 or z >= 1.0:
        return 0.0
    return -(z * math.log(z) + (1.0 - z) * math.log(1.0 - z)) * INV_LN2


@jit
def entropy_vec_k(w):
    """Shannon entropy in bits of a nonnegative vector (0 log 0 = 0)."""
    s = 0.0
    for i in range(w.size):
        v = w[i]
        if v > 0.0:
            s -= v * math.log(v)
    return s * INV_LN2


@jit
def cond_entropy_table_k(t):
    """H(column | row) in bits for a joint probability table."""
    hj = 0.0
    hr = 0.0
    for i in range(t.shape[0]):
        rs = 0.0
        for j in range(t.shape[1]):
            v = t[i, j]
            if v > 0.0:
                hj -= v * math.log(v)
            rs += v
        if rs > 0.0:
            hr -= rs * math.log(rs)
    return (hj - hr) * INV_LN2


@jit
def nq_k(z, q):
    return 0.5 * (1.0 + math.sqrt(1.0 - 4.0 * (1.0 - q) * z * (1.0 - z)))


@jit
def hq_k(z, q):
    return h2_k(z) - h2_k(nq_k(z, q))


@jit
def ip_bound_k(S, p):
    """Closed-form bound on Eve's information at CHSH score S, flip rate p.

    The caller is responsible for range checks; tiny excursions outside
    [2, 2*sqrt(2)] are clamped here so optimizer round-off stays harmless.
    """
    s = S
    if s < 2.0:
        s = 2.0
    elif s > CHSH_MAX:
        s = CHSH_MAX
    r1 = 0.25 * s * s - 1.0
    if r1 < 0.0:
        r1 = 0.0
    t1 = h2_k(0.5 * (1.0 + math.sqrt(r1)))
    r2 = 1.0 - p * (1.0 - p) * (8.0 - s * s)
    if r2 < 0.0:
        r2 = 0.0
    t2 = h2_k(0.5 * (1.0 + math.sqrt(r2)))
    return t1 - t2


# ---------------------------------------------------------------------------
# Jacobi eigensolver (real symmetric, any small n; used at n = 4 and n = 8)


@jit
def jacobi_eigh_k(a, want_vectors, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns eigenvalues sorted descending and, when requested, the matching
    eigenvector columns.  Convergence is declared when the Frobenius norm of
    the off-diagonal part drops below tol.
    """
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n)
    for _sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += A[p, q] * A[p, q]
        if math.sqrt(2.0 * off) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * math.atan2(2.0 * apq, A[q, q] - A[p, p])
                c = math.cos(theta)
                s = math.sin(theta)
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                if want_vectors:
                    for k in range(n):
                        vkp = V[k, p]
                        vkq = V[k, q]
                        V[k, p] = c * vkp - s * vkq
                        V[k, q] = s * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i]
    order = np.argsort(-w)
    ws = np.empty(n)
    Vs = np.empty((n, n))
    for j in range(n):
        ws[j] = w[order[j]]
        for i in range(n):
            Vs[i, j] = V[i, order[j]]
    return ws, Vs


# ---------------------------------------------------------------------------
# Eve's conditional state and information


@jit
def eve_state_fill_k(L1, L2, L3, L4, q, C, sign, out):
    """Eve's 4x4 conditional state for measurement axis cos(2*phi) = C.

    sign = +1 builds the state conditioned on Bob's +1 outcome, -1 the other
    one (which only flips the off-diagonal block).
    """
    cc = C
    if cc > 1.0:
        cc = 1.0
    elif cc < -1.0:
        cc = -1.0
    cphi = math.sqrt(0.5 * (1.0 + cc))
    sphi = math.sqrt(0.5 * (1.0 - cc))
    sq = sign * math.sqrt(q)
    for i in range(4):
        for j in range(4):
            out[i, j] = 0.0
    out[0, 0] = L1
    out[1, 1] = L2
    out[2, 2] = L3
    out[3, 3] = L4
    v = sq * math.sqrt(L1 * L3) * cphi
    out[0, 2] = v
    out[2, 0] = v
    v = sq * math.sqrt(L1 * L4) * sphi
    out[0, 3] = v
    out[3, 0] = v
    v = sq * math.sqrt(L2 * L3) * sphi
    out[1, 2] = v
    out[2, 1] = v
    v = -sq * math.sqrt(L2 * L4) * cphi
    out[1, 3] = v
    out[3, 1] = v


@jit
def eve_cond_entropy_k(L1, L2, L3, L4, q, C):
    m = np.empty((4, 4))
    eve_state_fill_k(L1, L2, L3, L4, q, C, 1.0, m)
    w, _ = jacobi_eigh_k(m, False, 1e-13, 50)
    return entropy_vec_k(w)


@jit
def weights_entropy_k(L1, L2, L3, L4):
    s = 0.0
    if L1 > 0.0:
        s -= L1 * math.log(L1)
    if L2 > 0.0:
        s -= L2 * math.log(L2)
    if L3 > 0.0:
        s -= L3 * math.log(L3)
    if L4 > 0.0:
        s -= L4 * math.log(L4)
    return s * INV_LN2


@jit
def bell_chsh_k(L1, L2, L3, L4):
    d1 = L1 - L2
    d2 = L3 - L4
    return CHSH_MAX * math.sqrt(d1 * d1 + d2 * d2)


@jit
def eve_info_k(L1, L2, L3, L4, q, C):
    return weights_entropy_k(L1, L2, L3, L4) - eve_cond_entropy_k(L1, L2, L3, L4, q, C)


@jit(parallel=True)
def oracle_scan_k(S, q, Pg, xg, yg, Cg, vals, args):
    """Exhaustive grid scan of Eve's information at CHSH score >= S.

    The mixing parametrization is L = (P*x, (1-P)*y, P*(1-x), (1-P)*(1-y))
    with the ordering constraints L1 >= L2, L3 >= L4.  Each P-slice keeps its
    own top-K list; vals must come in filled with -inf.  vals has shape
    (len(Pg), K) and args (len(Pg), K, 4) holding (P, x, y, C).
    """
    K = vals.shape[1]
    for iP in prange(Pg.size):
        P = Pg[iP]
        for ix in range(xg.size):
            x = xg[ix]
            L1 = P * x
            L3 = P * (1.0 - x)
            for iy in range(yg.size):
                y = yg[iy]
                L2 = (1.0 - P) * y
                L4 = (1.0 - P) * (1.0 - y)
                if L1 < L2 - 1e-15 or L3 < L4 - 1e-15:
                    continue
                if bell_chsh_k(L1, L2, L3, L4) < S - 1e-12:
                    continue
                # H(L) caps the information for every C: skip dominated cells
                if weights_entropy_k(L1, L2, L3, L4) <= vals[iP, K - 1]:
                    continue
                for ic in range(Cg.size):
                    v = eve_info_k(L1, L2, L3, L4, q, Cg[ic])
                    if v > vals[iP, K - 1]:
                        j = K - 1
                        while j > 0 and vals[iP, j - 1] < v:
                            vals[iP, j] = vals[iP, j - 1]
                            args[iP, j, 0] = args[iP, j - 1, 0]
                            args[iP, j, 1] = args[iP, j - 1, 1]
                            args[iP, j, 2] = args[iP, j - 1, 2]
                            args[iP, j, 3] = args[iP, j - 1, 3]
                            j -= 1
                        vals[iP, j] = v
                        args[iP, j, 0] = P
                        args[iP, j, 1] = x
                        args[iP, j, 2] = y
                        args[iP, j, 3] = Cg[ic]


# ---------------------------------------------------------------------------
# photon-pair source statistics


@jit
def coupling_fill_k(Tg, Tb, alpha, phia, beta, phib, out):
    """Effective 2x2 coupling between Alice's and Bob's detected modes."""
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    cb = math.cos(beta)
    sb = math.sin(beta)
    ea = complex(math.cos(phia), math.sin(phia))
    eb = complex(math.cos(phib), math.sin(phib))
    eac = ea.conjugate()
    ebc = eb.conjugate()
    out[0, 0] = Tg * ca * sb * ebc - Tb * sa * eac * cb
    out[0, 1] = -Tg * ca * cb - Tb * sa * eac * sb * eb
    out[1, 0] = Tg * sa * ea * sb * ebc + Tb * ca * cb
    out[1, 1] = -Tg * sa * ea * cb + Tb * ca * sb * eb


@jit
def gram_capacity_k(m00, m01, m10, m11):
    """(1 - l1^2)(1 - l2^2) for the singular values l_i of a 2x2 matrix.

    Expands to 1 - tr(G) + det(G) with G the Gram matrix, so no square roots
    are needed and the result is exact for l_i < 1.
    """
    g00 = abs(m00) ** 2 + abs(m10) ** 2
    g11 = abs(m01) ** 2 + abs(m11) ** 2
    g01 = m00.conjugate() * m01 + m10.conjugate() * m11
    return 1.0 - (g00 + g11) + (g00 * g11 - abs(g01) ** 2)


@jit
def silent16_k(m, eta, pdc, N, out16):
    """out16[mask] = P(all detectors in mask silent), mask bit order A, A_perp, B, B_perp.

    eta and pdc are per-detector efficiency and dark-count vectors in the same
    order; N is the number of independent mode pairs feeding the detectors.
    """
    m00 = m[0, 0]
    m01 = m[0, 1]
    m10 = m[1, 0]
    m11 = m[1, 1]
    norm = gram_capacity_k(m00, m01, m10, m11)
    sr0 = math.sqrt(1.0 - eta[0])
    sr1 = math.sqrt(1.0 - eta[1])
    sr2 = math.sqrt(1.0 - eta[2])
    sr3 = math.sqrt(1.0 - eta[3])
    for mask in range(16):
        ra = sr0 if mask & 1 else 1.0
        rap = sr1 if mask & 2 else 1.0
        rb = sr2 if mask & 4 else 1.0
        rbp = sr3 if mask & 8 else 1.0
        denom = gram_capacity_k(m00 * ra * rb, m01 * ra * rbp, m10 * rap * rb, m11 * rap * rbp)
        dark = 1.0
        if mask & 1:
            dark *= 1.0 - pdc[0]
        if mask & 2:
            dark *= 1.0 - pdc[1]
        if mask & 4:
            dark *= 1.0 - pdc[2]
        if mask & 8:
            dark *= 1.0 - pdc[3]
        ratio = norm / denom
        acc = 1.0
        for _ in range(N):
            acc *= ratio
        out16[mask] = dark * acc


@jit
def exact_patterns_k(s16, out44):
    """Click-pattern joint from silent-subset probabilities (inclusion-exclusion).

    out44[a, b] with a the Alice click mask (bit 0 main, bit 1 perp) and b the
    Bob click mask.  Round-off negatives above -1e-10 are clamped to zero.
    """
    for t0 in range(16):
        pc0 = (t0 & 1) + ((t0 >> 1) & 1) + ((t0 >> 2) & 1) + ((t0 >> 3) & 1)
        free = (~t0) & 15
        acc = 0.0
        sub = free
        while True:
            t = t0 | sub
            pct = (t & 1) + ((t >> 1) & 1) + ((t >> 2) & 1) + ((t >> 3) & 1)
            if (pct - pc0) & 1:
                acc -= s16[t]
            else:
                acc += s16[t]
            if sub == 0:
                break
            sub = (sub - 1) & free
        if acc < 0.0 and acc > -1e-10:
            acc = 0.0
        clicked = (~t0) & 15
        out44[clicked & 3, clicked >> 2] = acc


@jit
def pair_joint44_buf_k(Tg, Tb, alpha, phia, beta, phib, eta, pdc, N, m, s16, out44):
    coupling_fill_k(Tg, Tb, alpha, phia, beta, phib, m)
    silent16_k(m, eta, pdc, N, s16)
    exact_patterns_k(s16, out44)


@jit
def pair_joint44_k(Tg, Tb, alpha, phia, beta, phib, eta, pdc, N, out44):
    m = np.empty((2, 2), np.complex128)
    s16 = np.empty(16)
    pair_joint44_buf_k(Tg, Tb, alpha, phia, beta, phib, eta, pdc, N, m, s16, out44)


@jit
def table_corr_k(j44):
    """Binarized correlator: pattern {main} -> -1, everything else +1."""
    e = 0.0
    for a in range(4):
        sa = -1.0 if a == 1 else 1.0
        for b in range(4):
            sb = -1.0 if b == 1 else 1.0
            e += sa * sb * j44[a, b]
    return e


@jit
def chsh_spdc_buf_k(Tg, Tb, a1, a2, b1, b2, eta, pdc, N, m, s16, j44):
    pair_joint44_buf_k(Tg, Tb, a1, 0.0, b1, 0.0, eta, pdc, N, m, s16, j44)
    s = table_corr_k(j44)
    pair_joint44_buf_k(Tg, Tb, a1, 0.0, b2, 0.0, eta, pdc, N, m, s16, j44)
    s += table_corr_k(j44)
    pair_joint44_buf_k(Tg, Tb, a2, 0.0, b1, 0.0, eta, pdc, N, m, s16, j44)
    s += table_corr_k(j44)
    pair_joint44_buf_k(Tg, Tb, a2, 0.0, b2, 0.0, eta, pdc, N, m, s16, j44)
    s -= table_corr_k(j44)
    return s


@jit
def chsh_spdc_k(Tg, Tb, a1, a2, b1, b2, eta, pdc, N):
    """CHSH score of the binarized statistics at planar settings."""
    m = np.empty((2, 2), np.complex128)
    s16 = np.empty(16)
    j44 = np.empty((4, 4))
    return chsh_spdc_buf_k(Tg, Tb, a1, a2, b1, b2, eta, pdc, N, m, s16, j44)


@jit
def ec_from_joint44_k(j44, p, four_valued, t42):
    """Error-correction entropy from the key-setting click-pattern joint.

    Bob is binarized and then flipped with probability p.  With four_valued
    Alice keeps all four click patterns, otherwise she is binarized too and
    the cost is h2 of the mismatch rate.  t42 is scratch of shape (4, 2).
    """
    for a in range(4):
        t42[a, 0] = 0.0
        t42[a, 1] = 0.0
        for b in range(4):
            if b == 1:
                t42[a, 0] += j44[a, b]
            else:
                t42[a, 1] += j44[a, b]
    for a in range(4):
        x0 = t42[a, 0]
        x1 = t42[a, 1]
        t42[a, 0] = (1.0 - p) * x0 + p * x1
        t42[a, 1] = (1.0 - p) * x1 + p * x0
    if four_valued:
        ec = cond_entropy_table_k(t42)
    else:
        qerr = t42[1, 1] + t42[0, 0] + t42[2, 0] + t42[3, 0]
        ec = h2_k(qerr)
    return ec if ec > 0.0 else 0.0


@jit
def ec_spdc_k(Tg, Tb, a0, b1, eta, pdc, N, p, four_valued):
    j44 = np.empty((4, 4))
    t42 = np.empty((4, 2))
    pair_joint44_k(Tg, Tb, a0, 0.0, b1, 0.0, eta, pdc, N, j44)
    return ec_from_joint44_k(j44, p, four_valued, t42)


@jit
def rate_spdc_k(proto, Tg, Tb, a0, a1, a2, b1, b2, p, eta, pdc, N):
    """Key rate for the photon-pair source; returns (rate, S, ec, eve)."""
    m = np.empty((2, 2), np.complex128)
    s16 = np.empty(16)
    j44 = np.empty((4, 4))
    t42 = np.empty((4, 2))
    S = chsh_spdc_buf_k(Tg, Tb, a1, a2, b1, b2, eta, pdc, N, m, s16, j44)
    if S > CHSH_MAX:
        S = CHSH_MAX
    pp = p if proto == PROTO_NOISY else 0.0
    four = proto != PROTO_BINARY_EC
    pair_joint44_buf_k(Tg, Tb, a0, 0.0, b1, 0.0, eta, pdc, N, m, s16, j44)
    ec = ec_from_joint44_k(j44, pp, four, t42)
    if S < 2.0:
        eve = 1.0
    else:
        eve = ip_bound_k(S, pp)
    return 1.0 - eve - ec, S, ec, eve


# ---------------------------------------------------------------------------
# ideal two-qubit source with lossy detection


@jit
def qubit_joint3_fill_k(theta, eta, aa, bb, out33):
    """Outcome table for the pure two-qubit source; rows Alice, cols Bob.

    Index order (+1, -1, no-click).  aa and bb are Bloch rotation angles of
    the measured axes in the x-z plane.
    """
    c2 = math.cos(2.0 * theta)
    s2 = math.sin(2.0 * theta)
    ea = math.cos(aa) * c2
    eb = math.cos(bb) * c2
    eab = math.cos(aa) * math.cos(bb) + math.sin(aa) * math.sin(bb) * s2
    for i in range(2):
        si = 1.0 - 2.0 * i
        for j in range(2):
            sj = 1.0 - 2.0 * j
            out33[i, j] = eta * eta * 0.25 * (1.0 + si * ea + sj * eb + si * sj * eab)
        out33[i, 2] = eta * (1.0 - eta) * 0.5 * (1.0 + si * ea)
    for j in range(2):
        sj = 1.0 - 2.0 * j
        out33[2, j] = (1.0 - eta) * eta * 0.5 * (1.0 + sj * eb)
    out33[2, 2] = (1.0 - eta) * (1.0 - eta)


@jit
def corr_qubit_buf_k(theta, eta, aa, bb, t3):
    qubit_joint3_fill_k(theta, eta, aa, bb, t3)
    e = 0.0
    for i in range(3):
        si = -1.0 if i == 1 else 1.0
        for j in range(3):
            sj = -1.0 if j == 1 else 1.0
            e += si * sj * t3[i, j]
    return e


@jit
def corr_qubit_k(theta, eta, aa, bb):
    t3 = np.empty((3, 3))
    return corr_qubit_buf_k(theta, eta, aa, bb, t3)


@jit
def chsh_qubit_buf_k(theta, eta, a1, a2, b1, b2, t3):
    return (
        corr_qubit_buf_k(theta, eta, a1, b1, t3)
        + corr_qubit_buf_k(theta, eta, a1, b2, t3)
        + corr_qubit_buf_k(theta, eta, a2, b1, t3)
        - corr_qubit_buf_k(theta, eta, a2, b2, t3)
    )


@jit
def chsh_qubit_k(theta, eta, a1, a2, b1, b2):
    t3 = np.empty((3, 3))
    return chsh_qubit_buf_k(theta, eta, a1, a2, b1, b2, t3)


@jit
def ec_qubit_buf_k(theta, eta, a0, b1, p, four_valued, t3, t32):
    """Error-correction entropy for the qubit source (no-click kept on Alice's side)."""
    qubit_joint3_fill_k(theta, eta, a0, b1, t3)
    for i in range(3):
        t32[i, 0] = (1.0 - p) * t3[i, 1] + p * (t3[i, 0] + t3[i, 2])
        t32[i, 1] = (1.0 - p) * (t3[i, 0] + t3[i, 2]) + p * t3[i, 1]
    if four_valued:
        ec = cond_entropy_table_k(t32)
    else:
        # Alice binarized as well: no-click counts as +1
        qerr = t32[0, 0] + t32[1, 1] + t32[2, 1]
        ec = h2_k(qerr)
    return ec if ec > 0.0 else 0.0


@jit
def ec_qubit_k(theta, eta, a0, b1, p, four_valued):
    t3 = np.empty((3, 3))
    t32 = np.empty((3, 2))
    return ec_qubit_buf_k(theta, eta, a0, b1, p, four_valued, t3, t32)


@jit
def rate_qubit_k(proto, theta, a0, a1, a2, b1, b2, p, eta):
    t3 = np.empty((3, 3))
    t32 = np.empty((3, 2))
    S = chsh_qubit_buf_k(theta, eta, a1, a2, b1, b2, t3)
    if S > CHSH_MAX:
        S = CHSH_MAX
    pp = p if proto == PROTO_NOISY else 0.0
    four = proto != PROTO_BINARY_EC
    ec = ec_qubit_buf_k(theta, eta, a0, b1, pp, four, t3, t32)
    if S < 2.0:
        eve = 1.0
    else:
        eve = ip_bound_k(S, pp)
    return 1.0 - eve - ec, S, ec, eve


# ---------------------------------------------------------------------------
# objective dispatch, Nelder-Mead, multistart


@jit
def objective_k(kind, x, c):
    """Minimization objective selected by integer kind.

    OBJ_ORACLE: x = (P, xfrac, yfrac, C), c = (S, q); infeasible points return
    a 10.0+ penalty so any feasible value always ranks better.
    OBJ_RATE_SPDC: x = (Tg, Tb, a0, a1, a2, b1, b2[, p]),
    c = (proto, N, p_fixed, eta_a, eta_ap, eta_b, eta_bp, pdc_a, pdc_ap, pdc_b, pdc_bp).
    OBJ_RATE_QUBIT: x = (theta, a0, a1, a2, b1, b2[, p]), c = (proto, eta, p_fixed).
    """
    if kind == OBJ_ORACLE:
        P = x[0]
        xf = x[1]
        yf = x[2]
        C = x[3]
        L1 = P * xf
        L3 = P * (1.0 - xf)
        L2 = (1.0 - P) * yf
        L4 = (1.0 - P) * (1.0 - yf)
        pen = 0.0
        if L1 < L2:
            pen += L2 - L1
        if L3 < L4:
            pen += L4 - L3
        sc = bell_chsh_k(L1, L2, L3, L4)
        if sc < c[0]:
            pen += c[0] - sc
        if pen > 1e-12:
            return 10.0 + pen
        return -eve_info_k(L1, L2, L3, L4, c[1], C)
    elif kind == OBJ_RATE_SPDC:
        proto = int(c[0])
        N = int(c[1])
        p = x[7] if x.size == 8 else c[2]
        r, _, _, _ = rate_spdc_k(
            proto, x[0], x[1], x[2], x[3], x[4], x[5], x[6], p, c[3:7], c[7:11], N
        )
        return -r
    else:
        proto = int(c[0])
        p = x[6] if x.size == 7 else c[2]
        r, _, _, _ = rate_qubit_k(proto, x[0], x[1], x[2], x[3], x[4], x[5], p, c[1])
        return -r


@jit
def nelder_mead_k(kind, consts, x0, lo, hi, maxfev, xatol, fatol):
    """Box-clipped Nelder-Mead with adaptive coefficients.

    Returns (best value, best point, evaluations).  The reported optimum is
    the best vertex ever evaluated, so restarts can only improve on it.
    """
    n = x0.size
    alpha = 1.0
    beta = 1.0 + 2.0 / n
    gamma = 0.75 - 0.5 / n
    delta = 1.0 - 1.0 / n

    sim = np.empty((n + 1, n))
    fx = np.empty(n + 1)
    for j in range(n):
        v = x0[j]
        if v < lo[j]:
            v = lo[j]
        elif v > hi[j]:
            v = hi[j]
        sim[0, j] = v
    for i in range(n):
        for j in range(n):
            sim[i + 1, j] = sim[0, j]
        st = 0.05 * (hi[i] - lo[i])
        v = sim[0, i] + st
        if v > hi[i]:
            v = sim[0, i] - st
        sim[i + 1, i] = v

    fbest = 1e300
    xbest = np.empty(n)
    nev = 0
    for i in range(n + 1):
        fx[i] = objective_k(kind, sim[i], consts)
        nev += 1
        if fx[i] < fbest:
            fbest = fx[i]
            for j in range(n):
                xbest[j] = sim[i, j]

    cen = np.empty(n)
    xr = np.empty(n)
    xe = np.empty(n)
    xc = np.empty(n)
    while nev < maxfev:
        order = np.argsort(fx)
        sim = sim[order].copy()
        fx = fx[order].copy()

        fspan = fx[n] - fx[0]
        xspan = 0.0
        for i in range(1, n + 1):
            for j in range(n):
                d = abs(sim[i, j] - sim[0, j])
                if d > xspan:
                    xspan = d
        if fspan <= fatol and xspan <= xatol:
            break

        for j in range(n):
            s = 0.0
            for i in range(n):
                s += sim[i, j]
            cen[j] = s / n

        for j in range(n):
            v = cen[j] + alpha * (cen[j] - sim[n, j])
            if v < lo[j]:
                v = lo[j]
            elif v > hi[j]:
                v = hi[j]
            xr[j] = v
        fr = objective_k(kind, xr, consts)
        nev += 1
        if fr < fbest:
            fbest = fr
            for j in range(n):
                xbest[j] = xr[j]

        if fr < fx[0]:
            for j in range(n):
                v = cen[j] + beta * (xr[j] - cen[j])
                if v < lo[j]:
                    v = lo[j]
                elif v > hi[j]:
                    v = hi[j]
                xe[j] = v
            fe = objective_k(kind, xe, consts)
            nev += 1
            if fe < fbest:
                fbest = fe
                for j in range(n):
                    xbest[j] = xe[j]
            if fe < fr:
                for j in range(n):
                    sim[n, j] = xe[j]
                fx[n] = fe
            else:
                for j in range(n):
                    sim[n, j] = xr[j]
                fx[n] = fr
        elif fr < fx[n - 1]:
            for j in range(n):
                sim[n, j] = xr[j]
            fx[n] = fr
        else:
            shrink = False
            if fr < fx[n]:
                for j in range(n):
                    v = cen[j] + gamma * (xr[j] - cen[j])
                    if v < lo[j]:
                        v = lo[j]
                    elif v > hi[j]:
                        v = hi[j]
                    xc[j] = v
                fc = objective_k(kind, xc, consts)
                nev += 1
                if fc < fbest:
                    fbest = fc
                    for j in range(n):
                        xbest[j] = xc[j]
                if fc <= fr:
                    for j in range(n):
                        sim[n, j] = xc[j]
                    fx[n] = fc
                else:
                    shrink = True
            else:
                for j in range(n):
                    v = cen[j] - gamma * (cen[j] - sim[n, j])
                    if v < lo[j]:
                        v = lo[j]
                    elif v > hi[j]:
                        v = hi[j]
                    xc[j] = v
                fc = objective_k(kind, xc, consts)
                nev += 1
                if fc < fbest:
                    fbest = fc
                    for j in range(n):
                        xbest[j] = xc[j]
                if fc < fx[n]:
                    for j in range(n):
                        sim[n, j] = xc[j]
                    fx[n] = fc
                else:
                    shrink = True
            if shrink:
                for i in range(1, n + 1):
                    for j in range(n):
                        sim[i, j] = sim[0, j] + delta * (sim[i, j] - sim[0, j])
                    fx[i] = objective_k(kind, sim[i], consts)
                    nev += 1
                    if fx[i] < fbest:
                        fbest = fx[i]
                        for j in range(n):
                            xbest[j] = sim[i, j]
    return fbest, xbest, nev


@jit(parallel=True)
def multistart_k(kind, consts, starts, lo, hi, maxfev, xatol, fatol, out_f, out_x):
    """Run Nelder-Mead from every start; results land in per-start slots.

    The caller reduces out_f/out_x sequentially, so the outcome does not
    depend on thread scheduling.
    """
    for i in prange(starts.shape[0]):
        f, xb, _ = nelder_mead_k(kind, consts, starts[i], lo, hi, maxfev, xatol, fatol)
        out_f[i] = f
        for j in range(xb.size):
            out_x[i, j] = xb[j]
