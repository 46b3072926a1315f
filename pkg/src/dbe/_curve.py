"""Arithmetic on the supersingular curve y^2 = x^3 + x over F_p, p = 3 mod 4.

Points are affine tuples ``(x, y)``; ``None`` is the point at infinity.
F_{p^2} = F_p[i]/(i^2 + 1) elements are tuples ``(a, b)`` meaning a + b*i.
"""

from typing import Optional, Tuple

Point = Optional[Tuple[int, int]]
Fp2 = Tuple[int, int]

FP2_ONE: Fp2 = (1, 0)


# -- F_{p^2} -----------------------------------------------------------------

def fp2_mul(x: Fp2, y: Fp2, p: int) -> Fp2:
    a, b = x
    c, d = y
    return ((a * c - b * d) % p, (a * d + b * c) % p)


def fp2_sqr(x: Fp2, p: int) -> Fp2:
    a, b = x
    return ((a + b) * (a - b) % p, 2 * a * b % p)


def fp2_conj(x: Fp2, p: int) -> Fp2:
    return (x[0], -x[1] % p)


def fp2_inv(x: Fp2, p: int) -> Fp2:
    a, b = x
    norm_inv = pow(a * a + b * b, -1, p)
    return (a * norm_inv % p, -b * norm_inv % p)


def fp2_pow(x: Fp2, e: int, p: int) -> Fp2:
    if e < 0:
        x, e = fp2_inv(x, p), -e
    result = FP2_ONE
    for bit in bin(e)[2:]:
        result = fp2_sqr(result, p)
        if bit == "1":
            result = fp2_mul(result, x, p)
    return result


# -- E(F_p) ------------------------------------------------------------------

def on_curve(P: Point, p: int) -> bool:
    if P is None:
        return True
    x, y = P
    return (y * y - x * x * x - x) % p == 0


def point_neg(P: Point, p: int) -> Point:
    if P is None:
        return None
    return (P[0], -P[1] % p)


def point_add(P: Point, Q: Point, p: int) -> Point:
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def point_mul(P: Point, k: int, p: int) -> Point:
    if P is None or k == 0:
        return None
    if k < 0:
        P, k = point_neg(P, p), -k
    R: Point = None
    for bit in bin(k)[2:]:
        R = point_add(R, R, p)
        if bit == "1":
            R = point_add(R, P, p)
    return R


def lift_x(x: int, p: int) -> Point:
    """Return a point with abscissa ``x`` (even-y root), or None if none exists."""
    rhs = (x * x * x + x) % p
    if rhs == 0:
        return (x % p, 0)
    y = pow(rhs, (p + 1) // 4, p)
    if y * y % p != rhs:
        return None
    if y & 1:
        y = p - y
    return (x % p, y)


# -- Tate pairing --------------------------------------------------------------

def _line_at(T: Point, R: Point, xq: int, yq: int, p: int) -> Optional[Fp2]:
    """Line through T and R (tangent if equal) evaluated at (xq, i*yq).

    Returns None for lines whose value lies in F_p (vertical lines and lines
    involving infinity); those are erased by the final exponentiation.
    """
    if T is None or R is None:
        return None
    x1, y1 = T
    x2, y2 = R
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    return ((-y1 - lam * (xq - x1)) % p, yq)


def miller_loop(P: Point, Q: Point, n: int, p: int) -> Fp2:
    """f_{n,P} evaluated at phi(Q) = (-x_Q, i*y_Q), for P in E(F_p)[n].

    Vertical-line denominators take values in F_p and are dropped. The
    image phi(Q) has a nonzero imaginary ordinate (Q has odd order), so no
    evaluated line vanishes.
    """
    xq = -Q[0] % p
    yq = Q[1]
    f = FP2_ONE
    T = P
    for bit in bin(n)[3:]:
        line = _line_at(T, T, xq, yq, p)
        f = fp2_sqr(f, p)
        if line is not None:
            f = fp2_mul(f, line, p)
        T = point_add(T, T, p)
        if bit == "1":
            line = _line_at(T, P, xq, yq, p)
            if line is not None:
                f = fp2_mul(f, line, p)
            T = point_add(T, P, p)
    return f


def final_exponentiation(f: Fp2, cofactor: int, p: int) -> Fp2:
    # (p^2 - 1)/N = (p - 1) * h, and f^p is the conjugate of f.
    f = fp2_mul(fp2_conj(f, p), fp2_inv(f, p), p)
    return fp2_pow(f, cofactor, p)


def tate_pairing(P: Point, Q: Point, n: int, cofactor: int, p: int) -> Fp2:
    """Reduced Tate pairing e(P, phi(Q)) of order n on y^2 = x^3 + x."""
    if P is None or Q is None:
        return FP2_ONE
    return final_exponentiation(miller_loop(P, Q, n, p), cofactor, p)
