# latent-shift-lab/src/latent_shift_lab/scm/seeds.py

import hashlib

import numpy as np


def derive_seed(root: int, component: str, domain_id: int = 0) -> int:
    """64-bit sub-seed for one (component, domain) stream of a root seed."""
    digest = hashlib.blake2b(f"{root}:{component}:{domain_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(root: int, component: str, domain_id: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, component, domain_id))
