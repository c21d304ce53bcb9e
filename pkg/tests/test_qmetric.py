import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from src.core.config import EstimationBudget
from src.core.exceptions import (
    BudgetError,
    DegeneracyError,
    DimensionMismatchError,
    InvalidFileFormatError,
    InvalidInputError,
    ResourceCapError,
)
from src.spectral.pspace import WeightedPointSpace
from src.spectral.qmetric import (
    SEARCH_TOLERANCE,
    CnTable,
    MetricEstimate,
    StateKind,
    WitnessKind,
    alpha_auto,
    check_algebra_dimension,
    cn_constants,
    custom_state,
    degeneracy_probe,
    key_estimate,
    mixture,
    mk_grid_oracle,
    mk_lower,
    mk_upper,
    parse_state,
    parse_state_token,
    point_state,
    quotient_distance,
    read_state_file,
    subspace_constant,
    trace_state,
)
from src.spectral.uhftriple import (
    AlphaSeq,
    UHFSpecConfig,
    build_tower,
    dirac,
    embed_algebra,
    random_level_operator,
)

# D = alpha_1 Q_1 on two points: the commutator of s sigma_z + t epsilon has norm |s| + |t|
TWO_POINTS = (1, 2)
TWO_POINT_ALPHA = (0.0, 1.0)


def _tower(*dims):
    return build_tower(UHFSpecConfig(dims=dims))


def _alpha(*values, allow_degenerate=False):
    return AlphaSeq(values=values, allow_degenerate=allow_degenerate)


def test_point_and_trace_states():
    omega = point_state(4, 2)
    assert omega.kind == StateKind.POINT
    assert omega.label == "point:2"
    assert_allclose(omega.weights, [0, 0, 1, 0])
    assert trace_state(4).evaluate(np.diag([1.0, 2.0, 3.0, 6.0])) == pytest.approx(3.0)

    with pytest.raises(InvalidInputError):
        point_state(4, 4)
    with pytest.raises(DimensionMismatchError):
        omega.evaluate(np.eye(3))


def test_state_weights_must_sum_to_one():
    with pytest.raises(ValidationError):
        custom_state([0.5, 0.4])
    with pytest.raises(ValidationError):
        custom_state([])
    assert custom_state([0.5 + 1j, 0.5 - 1j]).kind == StateKind.CUSTOM


def test_mixture():
    state = mixture([point_state(2, 0), point_state(2, 1)], [0.25, 0.75])
    assert_allclose(state.weights, [0.25, 0.75])
    assert state.kind == StateKind.CUSTOM

    with pytest.raises(InvalidInputError):
        mixture([point_state(2, 0)], [0.5, 0.5])
    with pytest.raises(InvalidInputError):
        mixture([point_state(2, 0), point_state(2, 1)], [1.5, -0.5])


def test_parse_state():
    assert parse_state(["# comment", "point 1"], 3).label == "point:1"
    assert parse_state(["trace"], 3).kind == StateKind.TRACE
    custom = parse_state(["custom", "0.2 0.3", "0.5"], 3)
    assert_allclose(custom.weights, [0.2, 0.3, 0.5])


@pytest.mark.parametrize("lines", [
    [],
    ["point"],
    ["point x"],
    ["custom", "0.5"],
    ["custom", "0.5 abc 0.5"],
    ["gaussian"],
])
def test_parse_state_rejects_malformed(lines):
    with pytest.raises(InvalidFileFormatError):
        parse_state(lines, 2)


def test_parse_state_token(tmp_path):
    path = tmp_path / "state.txt"
    path.write_text("custom\n0.25\n0.75\n")

    assert parse_state_token("point:1", 2).label == "point:1"
    assert parse_state_token("trace", 2).kind == StateKind.TRACE
    assert parse_state_token(str(path), 2).label == str(path)
    assert read_state_file(str(path), 2).kind == StateKind.CUSTOM

    with pytest.raises(InvalidInputError):
        parse_state_token("point:x", 2)
    with pytest.raises(FileNotFoundError):
        parse_state_token(str(tmp_path / "missing.txt"), 2)


def test_metric_estimate_interval():
    assert MetricEstimate(lower=1.0).upper == math.inf
    assert MetricEstimate(lower=1.0, upper=0.999).lower == 1.0
    with pytest.raises(ValidationError):
        MetricEstimate(lower=1.0, upper=0.5)
    with pytest.raises(ValidationError):
        MetricEstimate(lower=-1.0)


def test_key_estimate_random_operator(rng):
    tower = _tower(1, 2, 2)
    alpha = _alpha(0.0, 1.0, 3.0)
    a = random_level_operator(tower, 1, rng)

    lhs, rhs = key_estimate(tower, alpha, a, 1)
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert rhs > 0

    scaled_lhs, _ = key_estimate(tower, alpha.scaled(3.0), a, 1)
    assert scaled_lhs == pytest.approx(3.0 * lhs, rel=1e-10)


def test_key_estimate_identity_and_levels():
    tower = _tower(1, 2, 2)
    alpha = _alpha(0.0, 1.0, 2.0)
    identity = embed_algebra(tower, 0, np.eye(1))

    assert key_estimate(tower, alpha, identity, 2) == pytest.approx((0.0, 0.0), abs=1e-12)
    with pytest.raises(InvalidInputError):
        key_estimate(tower, alpha, identity, 0)
    with pytest.raises(InvalidInputError):
        key_estimate(tower, alpha, identity, 3)


def test_cn_constants_are_infinite_in_the_spatial_representation(budget):
    cn = cn_constants(_tower(*TWO_POINTS), 2.0, budget)

    assert len(cn.entries) == 1
    entry = cn.entries[0]
    assert not entry.kernel_flag
    assert math.isinf(entry.value)
    assert entry.dimension == 2
    assert entry.kernel_dimension == 1
    assert math.isfinite(entry.restricted) and entry.restricted >= 1.0
    assert not cn.all_finite


def test_alpha_auto():
    assert alpha_auto(CnTable.synthetic([1.0, 1.0, 1.0])).values == (0.0, 2.0, 4.0, 8.0)
    assert alpha_auto(CnTable.synthetic([3.0, 1.0])).values == (0.0, 6.0, 4.0)

    with pytest.raises(DegeneracyError) as error:
        alpha_auto(CnTable.synthetic([1.0, math.inf, 1.0]))
    assert error.value.level == 2


def test_synthetic_constants_are_at_least_one():
    with pytest.raises(ValidationError):
        CnTable.synthetic([0.5])


def test_mk_upper():
    tower = _tower(1, 2, 2, 2)
    alpha = _alpha(0.0, 2.0, 4.0, 8.0)

    assert mk_upper(tower, alpha, CnTable.synthetic([1.0, 1.0, 1.0])) == pytest.approx(1.75)
    assert math.isinf(mk_upper(tower, alpha, CnTable.synthetic([1.0, math.inf, 1.0])))
    with pytest.raises(DimensionMismatchError):
        mk_upper(tower, alpha, CnTable.synthetic([1.0, 1.0]))


def test_mk_lower_of_equal_states_is_zero(budget):
    tower = _tower(*TWO_POINTS)
    omega = point_state(2, 0)

    estimate = mk_lower(tower, _alpha(*TWO_POINT_ALPHA), omega, omega, 2.0, budget)
    assert estimate.lower == 0.0
    assert not np.any(estimate.witness)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_mk_lower_matches_grid_oracle(budget, p):
    tower = _tower(*TWO_POINTS)
    alpha = _alpha(*TWO_POINT_ALPHA)
    omega, psi = point_state(2, 0), point_state(2, 1)

    oracle = mk_grid_oracle(tower, alpha, omega, psi, p)
    estimate = mk_lower(tower, alpha, omega, psi, p, budget)

    assert oracle == pytest.approx(2.0)
    assert estimate.witness_kind == WitnessKind.FEASIBLE
    assert estimate.lower <= oracle + 1e-9
    assert estimate.lower >= oracle - 5e-3


def test_mk_lower_witness_is_feasible(budget):
    tower = _tower(*TWO_POINTS)
    alpha = _alpha(*TWO_POINT_ALPHA)
    omega, psi = point_state(2, 0), trace_state(2)

    estimate = mk_lower(tower, alpha, omega, psi, 2.0, budget)
    assert estimate.witness.shape == (2, 2)
    commutator = alpha.values[1] * (tower.Q[1].entries @ estimate.witness - estimate.witness @ tower.Q[1].entries)
    assert np.linalg.norm(commutator, ord=2) <= 1.0 + 1e-9
    assert estimate.lower == pytest.approx(1.0, abs=5e-3)


def test_mk_lower_is_homogeneous_in_alpha(budget):
    tower = _tower(*TWO_POINTS)
    omega, psi = point_state(2, 0), point_state(2, 1)

    base = mk_lower(tower, _alpha(*TWO_POINT_ALPHA), omega, psi, 2.0, budget)
    doubled = mk_lower(tower, _alpha(0.0, 2.0), omega, psi, 2.0, budget)
    assert doubled.lower == pytest.approx(base.lower / 2.0, abs=2 * 5e-3)


def test_mk_lower_is_infinite_on_the_kernel(budget):
    tower = _tower(*TWO_POINTS)
    zero = _alpha(0.0, 0.0, allow_degenerate=True)
    omega, psi = point_state(2, 0), point_state(2, 1)

    estimate = mk_lower(tower, zero, omega, psi, 2.0, budget)
    assert estimate.witness_kind == WitnessKind.KERNEL
    assert math.isinf(estimate.lower) and math.isinf(estimate.upper)
    assert omega.evaluate(estimate.witness) != pytest.approx(psi.evaluate(estimate.witness))
    assert math.isinf(mk_grid_oracle(tower, zero, omega, psi, 2.0))


def test_mk_lower_rejects_zero_starts():
    tower = _tower(*TWO_POINTS)
    with pytest.raises(BudgetError):
        mk_lower(tower, _alpha(*TWO_POINT_ALPHA), point_state(2, 0), point_state(2, 1), 2.0,
                 EstimationBudget(starts=0))


def test_mk_lower_rejects_states_of_the_wrong_size(budget):
    with pytest.raises(DimensionMismatchError):
        mk_lower(_tower(*TWO_POINTS), _alpha(*TWO_POINT_ALPHA), point_state(3, 0), point_state(3, 1), 2.0, budget)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_grid_oracle_triangle_inequality(p):
    tower = _tower(*TWO_POINTS)
    alpha = _alpha(*TWO_POINT_ALPHA)
    first, second, trace = point_state(2, 0), point_state(2, 1), trace_state(2)

    direct = mk_grid_oracle(tower, alpha, first, second, p)
    via_trace = mk_grid_oracle(tower, alpha, first, trace, p) + mk_grid_oracle(tower, alpha, trace, second, p)
    assert mk_grid_oracle(tower, alpha, first, trace, p) == pytest.approx(1.0)
    assert direct <= via_trace + 1e-2


def test_grid_oracle_limits():
    tower = _tower(1, 3)
    alpha = _alpha(0.0, 1.0)
    with pytest.raises(InvalidInputError):
        mk_grid_oracle(tower, alpha, point_state(3, 0), point_state(3, 1), 2.0)
    with pytest.raises(InvalidInputError):
        mk_grid_oracle(_tower(*TWO_POINTS), _alpha(*TWO_POINT_ALPHA), point_state(2, 0), point_state(2, 1), 3.0)


def test_quotient_distance(budget):
    tower = _tower(*TWO_POINTS)

    identity = quotient_distance(tower, embed_algebra(tower, 0, np.eye(1)), 2.0, budget)
    assert identity.lower == pytest.approx(0.0, abs=1e-12)
    assert identity.upper == pytest.approx(0.0, abs=1e-9)

    sign = quotient_distance(tower, embed_algebra(tower, 1, np.diag([1.0, -1.0])), 2.0, budget)
    assert sign.lower == pytest.approx(1.0)
    assert sign.upper == pytest.approx(1.0, abs=1e-9)


def test_degeneracy_probe():
    tower = _tower(*TWO_POINTS)

    report = degeneracy_probe(tower, _alpha(*TWO_POINT_ALPHA), 2.0)
    assert report.dimension == 2
    assert report.algebra_dimension == 4
    assert not report.separates
    assert report.contains(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert report.contains(np.eye(2))
    assert not report.contains(np.diag([1.0, -1.0]))
    assert max(report.commutator_norms) <= 1e-9

    full = degeneracy_probe(tower, _alpha(0.0, 0.0, allow_degenerate=True), 2.0)
    assert full.dimension == 4
    assert full.contains(np.diag([1.0, -1.0]))


def test_commutator_kernel_matches_the_dense_commutator_map():
    tower = _tower(1, 2, 2)
    alpha = _alpha(0.0, 1.0, 2.0)
    d = dirac(tower, alpha).entries.real
    identity = np.eye(tower.dimension)
    commutator_map = np.kron(d, identity) - np.kron(identity, d.T)

    report = degeneracy_probe(tower, alpha, 2.0)
    # eigenvalues 0, 1, 2, 2 pair up into 1 + 1 + 4 commuting directions
    assert report.dimension == 6
    assert report.dimension == tower.dimension ** 2 - np.linalg.matrix_rank(commutator_map, tol=1e-9)
    for witness in report.witnesses:
        assert np.linalg.norm(commutator_map @ witness.ravel()) <= 1e-9
    assert report.contains(np.eye(4))


def test_algebra_dimension_cap(budget):
    tower = _tower(1, 2, 2)
    alpha = _alpha(0.0, 1.0, 2.0)
    omega, psi = point_state(4, 0), point_state(4, 1)

    with pytest.raises(ResourceCapError):
        mk_lower(tower, alpha, omega, psi, 2.0, budget, cap=15)
    with pytest.raises(ResourceCapError):
        cn_constants(tower, 2.0, budget, cap=15)
    with pytest.raises(ResourceCapError):
        degeneracy_probe(tower, alpha, 2.0, cap=15)
    check_algebra_dimension(4, cap=16)

    large = _tower(1, 2, 2, 2, 2, 2, 2)
    with pytest.raises(ResourceCapError):
        mk_lower(large, _alpha(0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0), point_state(64, 0), point_state(64, 1), 2.0, budget)


def _single_matrix_basis(matrix):
    vector = np.asarray(matrix, dtype=float).ravel()
    return (vector / np.linalg.norm(vector))[:, np.newaxis]


def test_subspace_constant_is_finite_when_row_sums_are_injective(budget):
    space = WeightedPointSpace.counting(2)
    # ||b||_2 = sqrt(5) / 2 and ||b 1||_2 = 1 / 2
    entry = subspace_constant(space, _single_matrix_basis([[1.0, -0.5], [0.0, 0.0]]), 1, 2.0, budget)

    assert entry.kernel_flag
    assert entry.value == pytest.approx(math.sqrt(5.0))
    assert entry.certificate.lower == pytest.approx(entry.certificate.upper)
    assert entry.restricted == pytest.approx(math.sqrt(5.0), rel=SEARCH_TOLERANCE)
    assert entry.dimension == 1
    assert entry.kernel_dimension == 0

    flat = subspace_constant(space, _single_matrix_basis(np.diag([1.0, 0.0])), 2, 2.0, budget)
    assert flat.value == pytest.approx(1.0)

    degenerate = subspace_constant(space, _single_matrix_basis([[1.0, -1.0], [0.0, 0.0]]), 1, 2.0, budget)
    assert not degenerate.kernel_flag
    assert math.isinf(degenerate.value)


def test_finite_constants_drive_auto_alpha_and_the_diameter_bound(budget):
    space = WeightedPointSpace.counting(2)
    table = CnTable(entries=(
        subspace_constant(space, _single_matrix_basis([[1.0, -0.5], [0.0, 0.0]]), 1, 2.0, budget),
        subspace_constant(space, _single_matrix_basis(np.diag([1.0, 0.0])), 2, 2.0, budget),
    ))
    c1, c2 = table.values
    tower = _tower(1, 2, 2)

    alpha = alpha_auto(table)
    assert alpha.values == pytest.approx((0.0, 2.0 * max(c1, 1.0), 4.0 * max(c2, 1.0)))
    assert alpha.values[1] == pytest.approx(2.0 * math.sqrt(5.0))
    assert mk_upper(tower, alpha, table) == pytest.approx(2.0 * (c1 / alpha.values[1] + c2 / alpha.values[2]))
    assert mk_upper(tower, alpha, table) == pytest.approx(1.5)
    assert mk_upper(tower, _alpha(0.0, 1.0, 2.0), table) == pytest.approx(2.0 * math.sqrt(5.0) + 1.0)
