"""Toy RSA lab: modular exponentiation strategies, block RSA, and an SPMD map engine."""

from .errors import DomainError, KernelError
from .modmath import AlgorithmSelector, modexp, oracle_modexp
from .rsa import KeyPair, PrivateKey, PublicKey, decrypt_block, encrypt_block, keygen, validate_keypair
from .spmd import LaunchConfig, launch_map, sequential_map

__version__ = "0.1.0"
