"""Embedded worked-example fixtures used as a release gate."""

from __future__ import annotations

from . import codec, modmath, rsa
from .modmath import AlgorithmSelector

FIG4_TRACE = [4, 16, 64, 256, 30, 120, 480, 429, 225, 403, 121, 484, 445]
SEC2_PACKETS = [1500, 1700, 1111, 411, 413, 217, 2415, 1908, 1413]


def _fig4_trace():
    trace = modmath.naive_trace(4, 13, 497)
    return trace == FIG4_TRACE, f"trace ends {trace[-1]}"


def _sec2_packets():
    packets = codec.encode_text("parallel encryption")
    text = codec.decode_packets(packets)
    ok = packets == SEC2_PACKETS and text == "parallelencryption"
    return ok, codec.format_stream(packets)


def _fig2_keypair():
    kp = rsa.keygen(17, 11, 7)
    algo = AlgorithmSelector("l2r_binary")
    roundtrip = all(
        rsa.decrypt_block(rsa.encrypt_block(m, kp.public, algo), kp.private, algo) == m
        for m in range(kp.n)
    )
    ok = (kp.n, kp.phi, kp.d) == (187, 160, 23) and roundtrip
    return ok, f"n={kp.n} phi={kp.phi} d={kp.d} roundtrip={'ok' if roundtrip else 'broken'}"


def _sec2_invalid_key():
    report = rsa.validate_keypair(17947, 131, 137)
    residue = (131 * 137) % 17680
    ok = report.failed() == ["inverse"] and residue == 267
    return ok, f"failed checks {report.failed()}, (d*e) mod phi = {residue}"


def _fig12_e0_divergence():
    faithful = modmath.modexp_halving(5, 0, 7, faithful=True)
    corrected = modmath.modexp_halving(5, 0, 7, faithful=False)
    return (faithful, corrected) == (5, 1), f"faithful={faithful} corrected={corrected}"


def _table2_modulus():
    ok = not rsa.is_prime(1005) and rsa.is_prime(1009) and rsa.is_prime(509) and 1009 * 509 == 513581
    return ok, f"is_prime(1005)={rsa.is_prime(1005)}, 1009*509={1009 * 509}"


FIXTURES = {
    "fig4-trace": _fig4_trace,
    "sec2-packets": _sec2_packets,
    "fig2-keypair": _fig2_keypair,
    "sec2-invalid-key": _sec2_invalid_key,
    "fig12-e0-divergence": _fig12_e0_divergence,
    "table2-n-1009x509": _table2_modulus,
}


def run_selftest() -> list[tuple[str, bool, str]]:
    results = []
    for name, fixture in FIXTURES.items():
        try:
            ok, detail = fixture()
        except Exception as exc:  # noqa: BLE001 - a crashing fixture is a failure
            ok, detail = False, f"raised {exc!r}"
        results.append((name, ok, detail))
    return results
