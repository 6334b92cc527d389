"""Textbook RSA over small primes: key generation, validation, block transforms.

There is no padding and no secure randomness here.  Keys exist to be
studied and benchmarked, never to protect anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from . import modmath
from .errors import DomainError
from .modmath import AlgorithmSelector

PRIME_LIMIT = 1 << 16

# Deterministic for every n < 2**64 (Jaeschke / Sorenson-Webster bound).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

PUBLIC_TAG = "rsa-toy-public"
PRIVATE_TAG = "rsa-toy-private"


def is_prime(x: int) -> bool:
    """Deterministic Miller-Rabin for any 64-bit ``x``."""
    if x < 2:
        return False
    for p in _MR_BASES:
        if x % p == 0:
            return x == p
    d, s = x - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        y = pow(a, d, x)
        if y == 1 or y == x - 1:
            continue
        for _ in range(s - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def inverse_mod(a: int, m: int) -> int:
    g, x, _ = egcd(a % m, m)
    if g != 1:
        raise DomainError(f"{a} has no inverse modulo {m}")
    return x % m


@dataclass(frozen=True)
class PublicKey:
    n: int
    e: int

    def __post_init__(self):
        if self.n < 2 or self.e <= 1:
            raise DomainError(f"invalid public key (n={self.n}, e={self.e})")


@dataclass(frozen=True)
class PrivateKey:
    n: int
    d: int

    def __post_init__(self):
        if self.n < 2 or self.d <= 0:
            raise DomainError(f"invalid private key (n={self.n}, d={self.d})")


@dataclass(frozen=True)
class KeyPair:
    p: int
    q: int
    n: int
    phi: int
    e: int
    d: int

    @property
    def public(self) -> PublicKey:
        return PublicKey(self.n, self.e)

    @property
    def private(self) -> PrivateKey:
        return PrivateKey(self.n, self.d)


def keygen(p: int, q: int, e: int | None = None) -> KeyPair:
    """Build a key pair from two distinct primes below 2**16.

    Without ``e`` the smallest exponent >= 3 coprime to the totient is
    used, which keeps key generation deterministic.
    """
    for name, x in (("p", p), ("q", q)):
        if not 2 <= x < PRIME_LIMIT:
            raise DomainError(f"{name}={x} outside [2, 2**16)")
        if not is_prime(x):
            raise DomainError(f"not prime: {name}={x}")
    if p == q:
        raise DomainError("primes must differ")
    n = p * q
    phi = (p - 1) * (q - 1)
    if e is None:
        e = 3
        while math.gcd(e, phi) != 1:
            e += 1
    if not 1 < e < phi:
        raise DomainError(f"exponent must satisfy 1 < e < phi={phi}, got {e}")
    if math.gcd(e, phi) != 1:
        raise DomainError("exponent not coprime with totient")
    return KeyPair(p, q, n, phi, e, inverse_mod(e, phi))


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    def __str__(self) -> str:
        lines = [f"{'PASS' if ok else 'FAIL'}  {name:<16} {detail}" for name, ok, detail in self.checks]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def _factor_semiprime(n: int) -> tuple[int, int] | None:
    if n < 4:
        return None
    f = 2
    while f * f <= n:
        if n % f == 0:
            return f, n // f
        f += 1 if f == 2 else 2
    return None


def validate_keypair(
    n: int, e: int, d: int, p: int | None = None, q: int | None = None
) -> ValidationReport:
    """Check every key-pair invariant; failures are reported, never raised."""
    report = ValidationReport()
    if p is None or q is None:
        factors = _factor_semiprime(n)
        if factors is None:
            report.add("factorization", False, f"n={n} has no nontrivial factor")
            report.add("totient", False, "unavailable without factors")
            return _exponent_checks(report, e, d, None)
        p, q = factors
        report.add("factorization", True, f"n = {p} * {q} (trial division)")

    report.add("p_prime", is_prime(p), f"p={p}")
    report.add("q_prime", is_prime(q), f"q={q}")
    report.add("distinct", p != q, f"p={p}, q={q}")
    report.add("modulus", p * q == n, f"p*q={p * q}, n={n}")
    phi = (p - 1) * (q - 1)
    report.add("totient", phi > 0, f"phi={phi}")
    return _exponent_checks(report, e, d, phi)


def _exponent_checks(report: ValidationReport, e: int, d: int, phi: int | None) -> ValidationReport:
    if not phi:
        for name in ("e_range", "e_coprime", "d_range", "inverse"):
            report.add(name, False, "no totient")
        return report
    g = math.gcd(e, phi)
    report.add("e_range", 1 < e < phi, f"1 < {e} < {phi}")
    report.add("e_coprime", g == 1, f"gcd(e, phi)={g}" if g == 1 else f"exponent not coprime: gcd(e, phi)={g}")
    report.add("d_range", 0 < d < phi, f"0 < {d} < {phi}")
    residue = (d * e) % phi
    report.add("inverse", residue == 1, f"(d*e) mod phi = {residue}")
    return report


def encrypt_block(m: int, key: PublicKey, algo: AlgorithmSelector) -> int:
    if not 0 <= m < key.n:
        raise DomainError(f"block exceeds modulus: {m} >= {key.n}")
    return modmath.modexp(m, key.e, key.n, algo)


def decrypt_block(c: int, key: PrivateKey, algo: AlgorithmSelector) -> int:
    if not 0 <= c < key.n:
        raise DomainError(f"block exceeds modulus: {c} >= {key.n}")
    return modmath.modexp(c, key.d, key.n, algo)


def transform_kernel(block: int, context: tuple[int, int, AlgorithmSelector]) -> int:
    """Element kernel shared by encryption and decryption.

    ``context`` is ``(n, exponent, algo)``; passing ``e`` encrypts and
    passing ``d`` decrypts.
    """
    n, exponent, algo = context
    if not 0 <= block < n:
        raise DomainError(f"block exceeds modulus: {block} >= {n}")
    return modmath.modexp(block, exponent, n, algo)


def write_key(path: str | Path, key: PublicKey | PrivateKey) -> None:
    if isinstance(key, PublicKey):
        text = f"{PUBLIC_TAG}\n{key.n} {key.e}\n"
    else:
        text = f"{PRIVATE_TAG}\n{key.n} {key.d}\n"
    Path(path).write_text(text, encoding="ascii")


def read_key(path: str | Path) -> PublicKey | PrivateKey:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if len(lines) != 2:
        raise DomainError(f"{path}: expected 2 lines, found {len(lines)}")
    try:
        n, exponent = (int(tok) for tok in lines[1].split())
    except ValueError:
        raise DomainError(f"{path}: line 2 must be '<n> <exponent>'") from None
    if lines[0] == PUBLIC_TAG:
        return PublicKey(n, exponent)
    if lines[0] == PRIVATE_TAG:
        return PrivateKey(n, exponent)
    raise DomainError(f"{path}: unknown key header {lines[0]!r}")
