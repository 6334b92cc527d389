"""Modular arithmetic and modular exponentiation strategies.

Every strategy computes ``g**e % m`` for 64-bit operands and returns the
canonical representative in ``[0, m)``.  They differ only in how many
multiplications they spend:

=============== ===========================================
naive           ``e - 1`` multiplications, optional trace
r2l_binary      right-to-left square-and-multiply
l2r_binary      left-to-right square-and-multiply
kary            left-to-right, ``k`` bits per step
sliding_window  odd-power table, skips runs of zero bits
halving         multiplies ``(g mod m)**2`` ``e // 2`` times
=============== ===========================================

:func:`oracle_modexp` is the reference the others are tested against.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError

U64_LIMIT = 1 << 64
#: Exponent cap for the strategies whose cost is linear in ``e``.
LINEAR_EXPONENT_CAP = 1 << 20
#: The halving kernel multiplies in fixed width; moduli must stay below this.
HALVING_MODULUS_LIMIT = 1 << 31
MAX_WINDOW = 8
#: Use the compiled loops (when numba is importable) for small moduli.
USE_JIT = True

VARIANTS = ("naive", "r2l_binary", "l2r_binary", "kary", "sliding_window", "halving")

_ALIASES = {
    "r2l": "r2l_binary",
    "l2r": "l2r_binary",
    "k-ary": "kary",
    "sliding": "sliding_window",
    "sliding-window": "sliding_window",
    "window": "sliding_window",
}


def _u64(name: str, x: int) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise TypeError(f"{name} must be an int, got {type(x).__name__}")
    if not 0 <= x < U64_LIMIT:
        raise DomainError(f"{name}={x} is not an unsigned 64-bit value")
    return x


def _modulus(m: int) -> int:
    _u64("modulus", m)
    if m == 0:
        raise DomainError("zero modulus")
    return m


def _check_window(k: int) -> int:
    if not isinstance(k, int) or not 1 <= k <= MAX_WINDOW:
        raise DomainError(f"window out of range: k={k}, expected 1..{MAX_WINDOW}")
    return k


@dataclass(frozen=True)
class Residue:
    """A value reduced modulo ``modulus``."""

    value: int
    modulus: int

    def __post_init__(self):
        _modulus(self.modulus)
        if not 0 <= self.value < self.modulus:
            raise DomainError(f"{self.value} is not reduced modulo {self.modulus}")

    @classmethod
    def of(cls, x: int, modulus: int) -> "Residue":
        return cls(_u64("value", x) % _modulus(modulus), modulus)


@dataclass(frozen=True)
class AlgorithmSelector:
    """Names one exponentiation strategy plus its tuning knobs.

    ``window`` only matters for ``kary`` and ``sliding_window``;
    ``faithful`` only for ``halving``.
    """

    variant: str
    window: int = 4
    faithful: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown algorithm {self.variant!r}")
        _check_window(self.window)

    @classmethod
    def parse(cls, name: str, window: int = 4, faithful: bool = False) -> "AlgorithmSelector":
        """Build a selector from a CLI-style name such as ``l2r`` or ``sliding``."""
        variant = _ALIASES.get(name.strip().lower(), name.strip().lower())
        return cls(variant, window, faithful)

    @property
    def label(self) -> str:
        if self.variant in ("kary", "sliding_window"):
            return f"{self.variant}:{self.window}"
        if self.variant == "halving" and self.faithful:
            return "halving:faithful"
        return self.variant

    def __call__(self, g: int, e: int, m: int) -> int:
        return modexp(g, e, m, self)


def modular_arith(u: int, v: int, m: int, op: str) -> int:
    """Return ``(u op v) mod m`` for ``op`` in add, sub, mul.

    Operands are reduced first, so each of the three reduction identities
    holds by construction.  Subtraction wraps into ``[0, m)``.
    """
    _u64("u", u)
    _u64("v", v)
    _modulus(m)
    a, b = u % m, v % m
    if op == "add":
        return (a + b) % m
    if op == "sub":
        return (a - b) % m
    if op == "mul":
        return (a * b) % m
    raise DomainError(f"unknown operation {op!r}")


@functools.lru_cache(maxsize=None)
def _jit():
    try:
        from . import _jit as compiled
    except ImportError:
        return None
    return compiled


def _compiled(m: int):
    if USE_JIT and m < HALVING_MODULUS_LIMIT:
        return _jit()
    return None


def naive_trace(g: int, e: int, m: int, cap: int = LINEAR_EXPONENT_CAP) -> list[int]:
    """Partial values ``g**1 .. g**e`` (mod m), one per step of the naive loop."""
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    if e > cap:
        raise DomainError(f"exponent too large for naive strategy: {e} > {cap}")
    base = g % m
    trace = []
    c = base
    for step in range(1, e + 1):
        if step > 1:
            c = (c * base) % m
        trace.append(c)
    return trace


def modexp_naive(g: int, e: int, m: int, cap: int = LINEAR_EXPONENT_CAP) -> int:
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    if e > cap:
        raise DomainError(f"exponent too large for naive strategy: {e} > {cap}")
    base = g % m
    compiled = _compiled(m)
    if compiled is not None:
        return int(compiled.naive(base, e, m))
    c = 1 % m
    for _ in range(e):
        c = c * base % m
    return c


def modexp_r2l(g: int, e: int, m: int) -> int:
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    acc = 1 % m
    square = g % m
    while e:
        if e & 1:
            acc = (acc * square) % m
            e -= 1
        e >>= 1
        if e:
            square = (square * square) % m
    return acc


def modexp_l2r(g: int, e: int, m: int) -> int:
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    base = g % m
    acc = 1 % m
    for i in range(e.bit_length() - 1, -1, -1):
        acc = (acc * acc) % m
        if (e >> i) & 1:
            acc = (acc * base) % m
    return acc


def modexp_kary(g: int, e: int, m: int, k: int = 4) -> int:
    """Left-to-right exponentiation over base-``2**k`` digits of ``e``."""
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    _check_window(k)
    base = g % m
    table = [1 % m]
    for _ in range(1, 1 << k):
        table.append((table[-1] * base) % m)

    digits = []
    mask = (1 << k) - 1
    while e:
        digits.append(e & mask)
        e >>= k
    acc = 1 % m
    for digit in reversed(digits):
        for _ in range(k):
            acc = (acc * acc) % m
        acc = (acc * table[digit]) % m
    return acc


def modexp_sliding(g: int, e: int, m: int, k: int = 4) -> int:
    """Sliding-window exponentiation with a table of odd powers only."""
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    _check_window(k)
    if e == 0:
        return 1 % m
    base = g % m
    g2 = (base * base) % m
    # odd[j] holds base**(2j+1)
    odd = [base]
    for _ in range(1, 1 << (k - 1)):
        odd.append((odd[-1] * g2) % m)

    acc = 1 % m
    i = e.bit_length() - 1
    while i >= 0:
        if not (e >> i) & 1:
            acc = (acc * acc) % m
            i -= 1
            continue
        low = max(i - k + 1, 0)
        while not (e >> low) & 1:
            low += 1
        width = i - low + 1
        window = (e >> low) & ((1 << width) - 1)
        for _ in range(width):
            acc = (acc * acc) % m
        acc = (acc * odd[window >> 1]) % m
        i = low - 1
    return acc


def modexp_halving(
    g: int, e: int, m: int, faithful: bool = False, cap: int = LINEAR_EXPONENT_CAP
) -> int:
    """The device kernel's loop: ``(g mod m)**2`` applied ``e // 2`` times.

    With ``faithful=True`` an exponent of zero returns ``g mod m``, exactly
    as the original kernel does.  The default returns the empty product.
    The kernel's float counter is replaced by integer state so the loop
    stays exact past 2**24.
    """
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    if m >= HALVING_MODULUS_LIMIT:
        raise DomainError(f"modulus out of kernel range: {m} >= 2**31")
    if e > cap:
        raise DomainError(f"exponent too large for halving strategy: {e} > {cap}")
    base = g % m
    if e == 0:
        return base if faithful else 1 % m
    compiled = _compiled(m)
    if compiled is not None:
        return int(compiled.halving(base, e, m))
    a = base * base
    ret = 1
    for _ in range(e >> 1):
        ret = (ret * a) % m
    if e & 1:
        ret = (ret * base) % m
    return ret


def oracle_modexp(g: int, e: int, m: int) -> int:
    """Reference result from the interpreter's arbitrary-precision ``pow``."""
    _u64("g", g)
    _u64("e", e)
    _modulus(m)
    return pow(g, e, m)


def modexp(g: int, e: int, m: int, algo: AlgorithmSelector) -> int:
    """Dispatch to the strategy named by ``algo``."""
    v = algo.variant
    if v == "naive":
        return modexp_naive(g, e, m)
    if v == "r2l_binary":
        return modexp_r2l(g, e, m)
    if v == "l2r_binary":
        return modexp_l2r(g, e, m)
    if v == "kary":
        return modexp_kary(g, e, m, algo.window)
    if v == "sliding_window":
        return modexp_sliding(g, e, m, algo.window)
    return modexp_halving(g, e, m, algo.faithful)


STRATEGIES: dict[str, Callable[..., int]] = {
    "naive": modexp_naive,
    "r2l_binary": modexp_r2l,
    "l2r_binary": modexp_l2r,
    "kary": modexp_kary,
    "sliding_window": modexp_sliding,
    "halving": modexp_halving,
}
