"""
Named seed derivation

Every random draw in the toolkit comes from a generator keyed by the master
seed plus a path of labels, so adding a component never shifts the draws of
another one.
"""

from typing import Union

import numpy as np

from src.app.utils.hashing import stable_int

Label = Union[str, int]


def _key(labels: tuple) -> list[int]:
    return [label if isinstance(label, int) else stable_int(str(label)) for label in labels]


def derive_seed(seed: int, *labels: Label) -> int:
    """Integer seed for the component addressed by labels"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=_key(labels))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def derive_rng(seed: int, *labels: Label) -> np.random.Generator:
    """Generator for the component addressed by labels"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=_key(labels))
    return np.random.Generator(np.random.PCG64(sequence))
