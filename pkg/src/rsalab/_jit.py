"""Compiled loops for the linear-time strategies.

Only valid for ``m < 2**31`` with ``base`` already reduced, so every
product fits a signed 64-bit register.
"""

from numba import njit


@njit(cache=True)
def naive(base, e, m):
    c = 1 % m
    for _ in range(e):
        c = c * base % m
    return c


@njit(cache=True)
def halving(base, e, m):
    # reduce the square up front: ret * a must stay below 2**63
    a = base * base % m
    ret = 1
    for _ in range(e >> 1):
        ret = ret * a % m
    if e & 1:
        ret = ret * base % m
    return ret
