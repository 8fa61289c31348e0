"""Closed-form roots of low-degree real polynomials with Newton polishing."""

from __future__ import annotations

import math

import numpy as np


def _polish(coeffs, z: complex, steps: int = 1) -> complex:
    # coeffs highest degree first
    for _ in range(steps):
        p = 0j
        dp = 0j
        for c in coeffs:
            dp = dp * z + p
            p = p * z + c
        if dp == 0:
            break
        step = p / dp
        z_new = z - step
        # Newton can diverge at multiple roots; keep the better point
        if abs(_horner(coeffs, z_new)) <= abs(p):
            z = z_new
    return z


def _horner(coeffs, z):
    p = 0j
    for c in coeffs:
        p = p * z + c
    return p


def cubic_roots(c1: float, c2: float, c3: float, polish: int = 1) -> np.ndarray:
    """Roots of the monic cubic ``x^3 + c1 x^2 + c2 x + c3``.

    Cardano for one real root, the trigonometric form for three; each root
    gets ``polish`` Newton steps.  Returned sorted by descending real part.
    """
    shift = c1 / 3.0
    p = c2 - c1 * c1 / 3.0
    q = 2.0 * c1**3 / 27.0 - c1 * c2 / 3.0 + c3
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if p == 0.0 and q == 0.0:
        ts = [0.0, 0.0, 0.0]
    elif disc > 0:
        sq = math.sqrt(disc)
        # pick the sign that avoids cancellation
        A = -math.copysign(np.cbrt(abs(q) / 2.0 + sq), q)
        B = -p / (3.0 * A) if A != 0 else 0.0
        re = -(A + B) / 2.0
        im = math.sqrt(3.0) / 2.0 * (A - B)
        ts = [A + B, complex(re, im), complex(re, -im)]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m) if p != 0 else 0.0
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]

    coeffs = (1.0, c1, c2, c3)
    roots = [_polish(coeffs, complex(t) - shift, polish) for t in ts]
    # keep conjugate pairs exact after polishing
    out = np.array(roots, dtype=complex)
    if disc > 0 and not (p == 0.0 and q == 0.0):
        out[0] = out[0].real
        out[2] = np.conj(out[1])
    return out[np.argsort(-out.real, kind="stable")]


def real_roots(coeffs_low_to_high, tol: float = 0.0, polish: int = 2) -> np.ndarray:
    """Real roots of a polynomial of degree <= 3 (coefficients low to high).

    Leading coefficients with ``|c| <= tol * max|c|`` are dropped before the
    closed form is applied.
    """
    c = [float(x) for x in coeffs_low_to_high]
    scale = max((abs(x) for x in c), default=0.0)
    while c and abs(c[-1]) <= tol * scale:
        c.pop()
    deg = len(c) - 1
    if deg > 3:
        raise ValueError("only degrees up to 3 are supported")
    if deg <= 0:
        return np.array([])
    if deg == 1:
        return np.array([-c[0] / c[1]])
    if deg == 2:
        c0, b, a = c
        disc = b * b - 4 * a * c0
        if disc < 0:
            return np.array([])
        sq = math.sqrt(disc)
        qq = -0.5 * (b + math.copysign(sq, b))
        rts = [qq / a] + ([c0 / qq] if qq != 0 else [qq / a])
        hi = (a, b, c0)
        return np.sort([_polish(hi, complex(r), polish).real for r in rts])
    c0, c1, c2, c3 = c
    z = cubic_roots(c2 / c3, c1 / c3, c0 / c3, polish=polish)
    hi = (c3, c2, c1, c0)
    rts = [_polish(hi, complex(r.real), polish).real for r in z if abs(r.imag) <= 1e-9 * max(1.0, abs(r))]
    return np.sort(np.array(rts))
