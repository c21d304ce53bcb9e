import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from src.core.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    ResourceCapError,
    SpectrumError,
    TowerMismatchError,
)
from src.spectral.pspace import PVector
from src.spectral.uhftriple import (
    AlphaSeq,
    UHFSpecConfig,
    build_tower,
    commutator,
    dirac,
    dirac_spectrum,
    embed_algebra,
    lift,
    nested_ranks,
    partial_projector,
    q_ranks,
    random_level_operator,
    resolvent_inverse,
    shifted_resolvent,
    strong_convergence_profile,
    verify_tower,
)

PROFILES = [(1, 2), (1, 2, 2), (1, 3, 2), (1, 2, 2, 2)]


def _tower(*dims):
    return build_tower(UHFSpecConfig(dims=dims))


def test_spec_validation():
    with pytest.raises(ValidationError):
        UHFSpecConfig(dims=(2, 2))
    with pytest.raises(ValidationError):
        UHFSpecConfig(dims=(1, 1))
    assert UHFSpecConfig(dims=(1, 3, 2)).total_dimension == 6


def test_alpha_validation():
    with pytest.raises(ValidationError):
        AlphaSeq(values=(1.0, 2.0))
    with pytest.raises(ValidationError):
        AlphaSeq(values=(0.0, 0.0))
    assert AlphaSeq.of([0, 0, 0]).allow_degenerate
    with pytest.raises(ValidationError):
        AlphaSeq.of([0, -1])


def test_tower_cap():
    with pytest.raises(ResourceCapError):
        build_tower(UHFSpecConfig(dims=(1, 4, 4)), cap=8)


def test_level_one_tower():
    tower = _tower(1, 2)
    assert_allclose(tower.iota[0].entries, [[1], [1]])
    assert_allclose(tower.pi[0].entries, [[0.5, 0.5]])
    assert_allclose(tower.P[0].entries, np.full((2, 2), 0.5))


def test_q_ranks():
    assert q_ranks(_tower(1, 2, 2)) == [1, 1, 2]
    assert q_ranks(_tower(1, 3, 2)) == [1, 2, 3]
    assert nested_ranks(_tower(1, 2, 2)) == [1, 2, 4]


@pytest.mark.parametrize("dims", PROFILES)
def test_tower_identities(dims):
    tower = _tower(*dims)
    checks = verify_tower(tower, [1.0, 1.5, 2.0, 3.0])
    assert [check.name for check in checks if not check.passed] == []
    assert_allclose(tower.P[-1].entries, np.eye(tower.dimension), atol=0)


def test_tower_orthogonality_checks_cover_both_orders():
    names = {check.name for check in verify_tower(_tower(1, 2, 2), [2.0])}

    for n in range(3):
        assert f"Q_{n}^2 = Q_{n}" in names
        for m in range(3):
            if m != n:
                assert f"Q_{n} Q_{m} = 0" in names


@pytest.mark.parametrize("dims", PROFILES)
def test_partial_projectors(dims):
    tower = _tower(*dims)
    level = tower.level
    for n in range(level + 1):
        for m in range(n, level + 1):
            partial_projector(tower, n, m)
    assert_allclose(partial_projector(tower, 0, level).entries, np.eye(tower.dimension))
    last = partial_projector(tower, level, level)
    assert last.shape == (1, 1)


def test_partial_projector_rejects_bad_levels():
    with pytest.raises(InvalidInputError):
        partial_projector(_tower(1, 2), 1, 0)


@pytest.mark.parametrize("dims", PROFILES)
def test_embedded_operators_commute_with_higher_projections(dims):
    tower = _tower(*dims)
    rng = np.random.default_rng(5)
    for n in range(tower.level + 1):
        for _ in range(5):
            a = random_level_operator(tower, n, rng).embedded.entries
            for m in range(n, tower.level + 1):
                p = tower.P[m].entries
                assert np.max(np.abs(a @ p - p @ a)) <= 1e-12 * max(1.0, np.max(np.abs(a)))


def test_embedding_identity_and_nesting():
    tower = _tower(1, 2, 2)
    assert_allclose(embed_algebra(tower, 1, np.eye(2)).embedded.entries, np.eye(4))
    core = np.array([[1, 2j], [3, -1]])
    level_one = embed_algebra(tower, 1, core)
    assert_allclose(lift(tower, level_one, 2).embedded.entries, level_one.embedded.entries)
    with pytest.raises(DimensionMismatchError):
        embed_algebra(tower, 1, np.eye(3))
    with pytest.raises(InvalidInputError):
        lift(tower, level_one, 0)


def test_dirac_spectrum():
    tower = _tower(1, 2, 2)
    assert_allclose(dirac_spectrum(tower, AlphaSeq.of([0, 1, 2])), [0, 1, 2, 2], atol=1e-8)
    assert_allclose(dirac(tower, AlphaSeq.of([0, 0, 0])).entries, np.zeros((4, 4)))


def test_dirac_kills_constants():
    for dims in PROFILES:
        tower = _tower(*dims)
        alpha = AlphaSeq.of(range(len(dims)))
        assert_allclose(dirac(tower, alpha).apply(tower.one()).coords, 0, atol=1e-12)


def test_dirac_rejects_alpha_length():
    with pytest.raises(DimensionMismatchError):
        dirac(_tower(1, 2, 2), AlphaSeq.of([0, 1]))


def test_resolvent_inverse():
    tower = _tower(1, 2)
    assert_allclose(resolvent_inverse(tower, AlphaSeq.of([0, 0])).entries, np.eye(2), atol=1e-15)
    eigenvalues = np.linalg.eigvalsh(resolvent_inverse(tower, AlphaSeq.of([0, 3])).entries)
    assert_allclose(eigenvalues, [0.1, 1.0], atol=1e-12)
    for dims in PROFILES:
        tower = _tower(*dims)
        alpha = AlphaSeq.of(range(len(dims)))
        d = dirac(tower, alpha).entries
        r = resolvent_inverse(tower, alpha).entries
        assert_allclose((np.eye(tower.dimension) + d @ d) @ r, np.eye(tower.dimension), atol=1e-10)


def test_shifted_resolvent():
    tower = _tower(1, 2, 2)
    alpha = AlphaSeq.of([0, 1, 2])
    shift = 0.5 + 0.5j
    r = shifted_resolvent(tower, alpha, shift).entries
    d = dirac(tower, alpha).entries
    assert_allclose((d - shift * np.eye(4)) @ r, np.eye(4), atol=1e-10)
    with pytest.raises(SpectrumError):
        shifted_resolvent(tower, alpha, 2.0)


def test_commutator():
    tower = _tower(1, 2, 2)
    alpha = AlphaSeq.of([0, 1, 2])
    assert_allclose(commutator(tower, alpha, embed_algebra(tower, 2, np.eye(4))).entries, 0, atol=1e-12)
    rng = np.random.default_rng(1)
    a = random_level_operator(tower, 1, rng)
    expected = sum(alpha.values[k] * (tower.Q[k].entries @ a.embedded.entries - a.embedded.entries @ tower.Q[k].entries)
                   for k in range(1, 2))
    assert_allclose(commutator(tower, alpha, a).entries, expected, atol=1e-12)
    assert_allclose(commutator(tower, alpha.scaled(3.0), a).entries, 3 * commutator(tower, alpha, a).entries,
                    atol=1e-12)


def test_commutator_rejects_foreign_operator():
    a = embed_algebra(_tower(1, 3), 1, np.eye(3))
    with pytest.raises(TowerMismatchError):
        commutator(_tower(1, 2, 2), AlphaSeq.of([0, 1, 2]), a)


def test_strong_convergence_profile():
    tower = _tower(1, 2, 2)
    rng = np.random.default_rng(2)
    eta = PVector(space=tower.flat, coords=rng.standard_normal(4))
    for p in (1.0, 2.0, 3.0):
        profile = strong_convergence_profile(tower, eta, p)
        assert len(profile) == 3
        assert profile[-1] == 0.0
