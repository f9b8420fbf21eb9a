import numpy as np
import pytest

from rectpack.contacts import (
    ContactSystem,
    Divergence,
    SingularSystem,
    bond_residual,
    contact_jacobian,
    contact_residuals,
    nonbond_slack,
    solve_contacts,
    system_functions,
)
from rectpack.geom import BondGraph, Packing, check_feasible, extract_bonds
from rectpack.restricted import RnTuple, tuple_to_packing

ALL_WALLS = ((0, "left"), (0, "right"), (0, "bottom"), (0, "top"))


def test_single_circle_box():
    sys_ = ContactSystem(1, BondGraph((), ALL_WALLS))
    p, info = solve_contacts(sys_, Packing(2.3, 1.9, [[1.2, 0.8]]))
    assert p.width == pytest.approx(2, abs=1e-14) and p.height == pytest.approx(2, abs=1e-14)
    assert info.residual <= 1e-12


def test_underdetermined_is_singular():
    sys_ = ContactSystem(1, BondGraph((), ((0, "left"), (0, "bottom"))))
    with pytest.raises(SingularSystem) as exc:
        solve_contacts(sys_, Packing(3, 3, [[1, 1]]))
    assert exc.value.args


def test_inconsistent_bonds_diverge():
    # a fixed 3-wide box cannot have one circle touching both side walls
    sys_ = ContactSystem(1, BondGraph((), ALL_WALLS), free_width=False, width=3.0)
    with pytest.raises((Divergence, SingularSystem)):
        solve_contacts(sys_, Packing(3, 2, [[1.5, 1]]))


def test_hexagonal_pattern_is_recovered_from_perturbed_start():
    base = tuple_to_packing(RnTuple(3, 3, 1, 0, 0, 0))
    bonds = extract_bonds(base)
    sys_ = ContactSystem(base.n, bonds)
    rng = np.random.default_rng(1)
    start = base.replace(centers=base.centers + rng.normal(0, 0.02, base.centers.shape), width=base.width + 0.03)
    p, _ = solve_contacts(sys_, start)
    assert np.allclose(p.centers, base.centers, atol=1e-10)
    assert bond_residual(p, bonds) < 1e-12
    assert check_feasible(p).ok


def test_jacobian_matches_finite_differences():
    base = tuple_to_packing(RnTuple(4, 5, 2, 0, 0, 0))
    sys_ = ContactSystem(base.n, extract_bonds(base))
    z0, res, jac, _ = system_functions(sys_, base)
    z = z0 + np.random.default_rng(3).normal(0, 0.05, z0.shape)
    h = 1e-6
    fd = np.column_stack([(res(z + h * e) - res(z - h * e)) / (2 * h) for e in np.eye(len(z))])
    assert np.max(np.abs(fd - jac(z))) < 1e-6
    assert contact_residuals(sys_, base).shape[0] == contact_jacobian(sys_, base).shape[0]


def test_json_round_trip():
    sys_ = ContactSystem(2, BondGraph(((0, 1),), ((0, "left"),)), free_height=False, height=2.0, pinned=(1,))
    assert ContactSystem.from_json(sys_.to_json()) == sys_


def test_nonbond_slack_of_lattice():
    base = tuple_to_packing(RnTuple(3, 0, 0, 2, 0, 0))
    assert nonbond_slack(base, extract_bonds(base)) > 0.5
