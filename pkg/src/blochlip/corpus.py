"""Built-in mappings whose Bloch numbers are known in closed form.

Holomorphic examples on the unit disk are realised as maps R^2 -> R^2; their
Jacobians are the conformal blocks [[a, -b], [b, a]] of f'(z) = a + ib, so
the operator norm of the differential is |f'(z)|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .derivatives import MappingUnderTest
from .geometry import UnitBall

__all__ = ["CorpusEntry", "corpus_list", "corpus_get"]


@dataclass(frozen=True)
class CorpusEntry:
    mapping: MappingUnderTest
    known_bloch: float | None
    provenance: str
    weight: str
    coweight: str
    psi: str
    attained: bool = True
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.mapping.label,
            "dim": self.mapping.dim,
            "codomain_dim": self.mapping.codomain_dim,
            "known_bloch": self.known_bloch,
            "provenance": self.provenance,
            "attained": self.attained,
            "weight": self.weight,
            "coweight": self.coweight,
            "psi": self.psi,
            "notes": self.notes,
        }


def _to_c(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1]


def _from_c(z):
    return np.stack([z.real, z.imag], axis=-1)


def _conformal(dz):
    a, b = dz.real, dz.imag
    return np.stack([np.stack([a, -b], axis=-1), np.stack([b, a], axis=-1)], axis=-2)


def _holomorphic(label, f, df):
    return MappingUnderTest(
        domain=UnitBall(),
        dim=2,
        codomain_dim=2,
        evaluator=lambda x: _from_c(f(_to_c(x))),
        jacobian=lambda x: _conformal(df(_to_c(x))),
        label=label,
    )


_A = 0.5
_CONST = np.array([0.3, -0.2])
_LINEAR = np.diag([2.0, 1.0, 0.5])


def _build():
    entries = [
        CorpusEntry(
            _holomorphic("identity_disk", lambda z: z, lambda z: np.ones_like(z)),
            1.0,
            "sup of (1-|z|^2) over the disk, attained at 0",
            "hyperbolic", "const1", "hyperbolic",
        ),
        CorpusEntry(
            MappingUnderTest(
                UnitBall(), 2, 2,
                lambda x: np.broadcast_to(_CONST, np.shape(x)[:-1] + (2,)).copy(),
                lambda x: np.zeros(np.shape(x)[:-1] + (2, 2)),
                label="constant",
            ),
            0.0,
            "zero differential",
            "hyperbolic", "const1", "hyperbolic",
        ),
        CorpusEntry(
            _holomorphic(
                "moebius_a0.5",
                lambda z: (_A - z) / (1 - np.conj(_A) * z),
                lambda z: -(1 - abs(_A) ** 2) / (1 - np.conj(_A) * z) ** 2,
            ),
            1.0,
            "Schwarz-Pick equality (1-|z|^2)|f'(z)| = 1-|f(z)|^2 <= 1, attained where f vanishes (z = a)",
            "hyperbolic", "const1", "hyperbolic",
        ),
        CorpusEntry(
            _holomorphic("log_bloch", lambda z: -np.log(1 - z), lambda z: 1 / (1 - z)),
            2.0,
            "(1-|z|^2)/|1-z| <= 1+|z| < 2, supremum approached along real z -> 1",
            "hyperbolic", "const1", "hyperbolic",
            attained=False,
            notes="unattained",
        ),
        CorpusEntry(
            _holomorphic("normal_pole", lambda z: 1 / (1 - z), lambda z: 1 / (1 - z) ** 2),
            None,
            "(1-|z|^2)|f'|/(1+|f|^2) = (1-|z|^2)/(|1-z|^2+1) <= 1",
            "hyperbolic", "spherical", "spherical_normal",
            notes="spherical Bloch number bounded by 1",
        ),
        CorpusEntry(
            MappingUnderTest(
                UnitBall(), 3, 3,
                lambda x: np.asarray(x) @ _LINEAR.T,
                lambda x: np.broadcast_to(_LINEAR, np.shape(x)[:-1] + (3, 3)).copy(),
                label="linear_Rm",
            ),
            2.0,
            "top singular value of diag(2, 1, 0.5)",
            "const1", "const1", "minmax",
        ),
    ]
    return {e.mapping.label: e for e in entries}


_REGISTRY = _build()


def corpus_list() -> list[str]:
    return list(_REGISTRY)


def corpus_get(label: str) -> CorpusEntry:
    try:
        return _REGISTRY[label]
    except KeyError:
        raise KeyError(f"unknown corpus label {label!r}; known: {', '.join(_REGISTRY)}") from None
