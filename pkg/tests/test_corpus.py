import numpy as np
import pytest

from blochlip.corpus import corpus_get, corpus_list
from blochlip.derivatives import DerivativeConfig, jacobian_at, spectral_norms
from blochlip.seminorms import sample_domain

LABELS = ["identity_disk", "constant", "moebius_a0.5", "log_bloch", "normal_pole", "linear_Rm"]


def test_six_labels():
    assert corpus_list() == LABELS


def test_unknown_label():
    with pytest.raises(KeyError, match="unknown corpus label"):
        corpus_get("nope")


@pytest.mark.parametrize("label", LABELS)
def test_exact_jacobian_matches_finite_differences(label):
    f = corpus_get(label).mapping
    X = sample_domain(f.domain, f.dim, 20, 3, 0.5)
    cfg = DerivativeConfig(fd_step=1e-5)
    for x in X:
        np.testing.assert_allclose(jacobian_at(f, x), jacobian_at(f, x, cfg, exact=False), atol=1e-7)


@pytest.mark.parametrize("label", ["identity_disk", "moebius_a0.5", "log_bloch", "normal_pole"])
def test_holomorphic_jacobians_are_conformal(label):
    f = corpus_get(label).mapping
    J = f.jacobian(sample_domain(f.domain, 2, 50, 4, 0.05))
    np.testing.assert_allclose(J[:, 0, 0], J[:, 1, 1])
    np.testing.assert_allclose(J[:, 0, 1], -J[:, 1, 0])
    # both singular values equal |f'(z)|
    np.testing.assert_allclose(spectral_norms(J), np.hypot(J[:, 0, 0], J[:, 1, 0]))


def test_known_values_from_closed_forms():
    """Each known Bloch number equals the supremum of its closed-form integrand on a fine grid."""
    r = np.linspace(0, 1, 200001)[:-1]
    assert np.max((1 - r**2) * 1) == 1.0
    # log_bloch along the real axis: (1 - r^2) / (1 - r) = 1 + r -> 2, never reached
    assert np.max(1 + r) < corpus_get("log_bloch").known_bloch == 2.0
    # Moebius: (1 - |z|^2) |f'(z)| = 1 - |f(z)|^2, equal to 1 at z = a
    f = corpus_get("moebius_a0.5").mapping
    J = f.jacobian(np.array([0.5, 0.0]))
    assert (1 - 0.25) * np.hypot(J[0, 0], J[1, 0]) == pytest.approx(1.0)
    assert corpus_get("linear_Rm").known_bloch == np.linalg.svd(corpus_get("linear_Rm").mapping.jacobian(np.zeros(3)))[1][0]


def test_entry_serialisation():
    d = corpus_get("log_bloch").to_dict()
    assert d["attained"] is False and d["notes"] == "unattained"
    assert corpus_get("normal_pole").to_dict()["known_bloch"] is None
