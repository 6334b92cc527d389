"""Letter-pair packetization and benchmark payloads.

Letters map to two-digit codes (``a`` = 00 ... ``z`` = 25) and each pair of
letters becomes one four-digit packet ``hi * 100 + lo``.  Spaces are dropped
before pairing and are not recovered on decode.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

MAX_PACKET = 2525
RAW_MAX = 800

# MMIX constants (Knuth); state wraps at 2**64.
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


def is_packet(value: int) -> bool:
    return 0 <= value <= MAX_PACKET and value // 100 <= 25 and value % 100 <= 25


@dataclass(frozen=True)
class MessagePayload:
    blocks: tuple[int, ...]
    mode: str = "raw"

    def __post_init__(self):
        if self.mode == "letters":
            bad = next((b for b in self.blocks if not is_packet(b)), None)
        elif self.mode == "raw":
            bad = next((b for b in self.blocks if not 0 <= b <= RAW_MAX), None)
        else:
            raise DomainError(f"unknown payload mode {self.mode!r}")
        if bad is not None:
            raise DomainError(f"block {bad} invalid in {self.mode} mode")

    def __len__(self):
        return len(self.blocks)


def encode_text(text: str) -> list[int]:
    letters = []
    for i, ch in enumerate(text):
        if ch == " ":
            continue
        if not "a" <= ch <= "z":
            raise DomainError(f"unsupported character at index {i}: {ch!r}")
        letters.append(ord(ch) - ord("a"))
    if len(letters) % 2:
        raise DomainError("odd-length message")
    return [hi * 100 + lo for hi, lo in zip(letters[::2], letters[1::2])]


def decode_packets(packets) -> str:
    out = []
    for value in packets:
        if not isinstance(value, int) or not is_packet(value):
            raise DomainError(f"invalid packet {value!r}")
        hi, lo = divmod(value, 100)
        out.append(chr(ord("a") + hi) + chr(ord("a") + lo))
    return "".join(out)


def format_stream(blocks, width: int = 4) -> str:
    """Space-separated decimal, zero-padded to ``width`` digits."""
    return " ".join(f"{b:0{width}d}" for b in blocks)


def parse_stream(text: str) -> list[int]:
    blocks = []
    for tok in text.split():
        if not tok.isdigit():
            raise DomainError(f"not a decimal block: {tok!r}")
        blocks.append(int(tok))
    return blocks


def generate_payload(size_bytes: int, seed: int) -> MessagePayload:
    """Reproducible raw payload of ``size_bytes`` blocks in ``[0, 800]``."""
    if size_bytes < 1:
        raise DomainError("payload size must be at least 1")
    state = seed & _MASK64
    blocks = []
    for _ in range(size_bytes):
        state = (state * LCG_MULTIPLIER + LCG_INCREMENT) & _MASK64
        blocks.append(state % (RAW_MAX + 1))
    return MessagePayload(tuple(blocks), "raw")
