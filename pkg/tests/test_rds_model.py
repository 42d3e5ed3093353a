import numpy as np
import pytest

from fracrd.errors import (
    DissipationViolated,
    MissingMeta,
    ModelUnknown,
    NegativeStateBeyondTolerance,
    NonFiniteRate,
)
from fracrd.rds_model import (
    Assumption,
    ReactionModel,
    bimolecular,
    check_assumption,
    conservative_lift,
    dissipative_pair,
    eval_reactions,
    get_model,
    polynomial_model,
    superquadratic_isc,
)


def test_bimolecular_balanced_state():
    f = eval_reactions(bimolecular(), np.array([1.0, 1.0, 1.0, 1.0]))
    assert np.all(f == 0.0)


def test_bimolecular_arithmetic():
    f = eval_reactions(bimolecular(), np.array([2.0, 0.0, 1.0, 0.0]))
    assert f.tolist() == [-2.0, 2.0, -2.0, 2.0]


def test_bimolecular_exact_cancellation():
    rng = np.random.default_rng(0)
    for _ in range(100):
        u = 10.0 ** rng.uniform(-3, 3) * rng.random(4)
        f = eval_reactions(bimolecular(), u)
        assert np.sum(f) == 0.0  # shared subexpression cancels bitwise


def test_eval_guards():
    with pytest.raises(NegativeStateBeyondTolerance):
        eval_reactions(bimolecular(), np.array([-1.0, 0.0, 0.0, 0.0]))
    bad = ReactionModel("bad", 1, (1.0,), lambda u, t: np.stack([u[0] / 0.0]))
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(NonFiniteRate):
            eval_reactions(bad, np.array([1.0]))


def test_check_conservation_bimolecular():
    rep = check_assumption(bimolecular(), Assumption.CONSERVATION, count=500)
    assert rep.passed and rep.samples_tested == 500


def test_check_mass_dissipation_violation():
    leaky = ReactionModel("leaky", 2, (1.0, 1.0), lambda u, t: np.stack([u[0], 0 * u[1]]))
    rep = check_assumption(leaky, Assumption.M, count=100)
    assert not rep.passed
    assert rep.violations  # witnesses recorded


def test_quasipositivity_bimolecular():
    rep = check_assumption(bimolecular(), Assumption.P, count=200)
    assert rep.passed


def test_superquadratic_assumptions():
    model = superquadratic_isc()
    for which in (Assumption.P, Assumption.M, Assumption.ISC, Assumption.POL):
        assert check_assumption(model, which, count=200).passed


def test_quadratic_growth():
    assert check_assumption(bimolecular(), Assumption.QUADRATIC, count=200).passed
    # quartic rates break the quadratic bound at large states
    rep = check_assumption(superquadratic_isc(), Assumption.QUADRATIC, count=200)
    assert not rep.passed


def test_missing_meta():
    bare = ReactionModel("bare", 2, (1.0, 1.0), lambda u, t: np.stack([-u[0], -u[1]]))
    with pytest.raises(MissingMeta):
        check_assumption(bare, Assumption.ISC)
    with pytest.raises(MissingMeta):
        check_assumption(bare, Assumption.QUADRATIC)
    no_nu = ReactionModel("no-nu", 2, (1.0, 1.0),
                          lambda u, t: np.stack([-u[0], -u[1]]), growth_c=1.0)
    with pytest.raises(MissingMeta):
        check_assumption(no_nu, Assumption.POL)


def test_isc_matrix_validation():
    with pytest.raises(ValueError):
        ReactionModel("x", 2, (1, 1), lambda u, t: u,
                      isc_matrix=np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        ReactionModel("x", 2, (1, 1), lambda u, t: u,
                      isc_matrix=np.array([[2.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        ReactionModel("x", 2, (1, 1), lambda u, t: u,
                      isc_matrix=np.array([[1.0, 0.0], [-1.0, 1.0]]))


def test_conservative_lift_bimolecular():
    lifted = conservative_lift(bimolecular())
    assert lifted.m == 5 and lifted.d[-1] == 1.0
    f = eval_reactions(lifted, np.array([2.0, 0.0, 1.0, 0.0, 0.0]))
    assert f[-1] == 0.0  # already conservative: appended rate vanishes
    assert check_assumption(lifted, Assumption.CONSERVATION, count=100).passed


def test_conservative_lift_dissipative():
    lifted = conservative_lift(dissipative_pair())
    f = eval_reactions(lifted, np.array([1.0, 1.0, 0.0]))
    assert f[-1] == 2.0  # g3 = 2 u1 u2 >= 0
    assert check_assumption(lifted, Assumption.CONSERVATION, count=100).passed


def test_conservative_lift_rejects_growth():
    leaky = ReactionModel("leaky", 1, (1.0,), lambda u, t: np.stack([u[0]]))
    with pytest.raises(DissipationViolated):
        conservative_lift(leaky)


def test_registry():
    assert get_model("bimolecular").m == 4
    assert get_model("dissipative-pair").m == 2
    assert get_model("superquadratic-isc").rho == 1.0
    with pytest.raises(ModelUnknown):
        get_model("nonexistent")


def test_polynomial_model():
    # f1 = -u1 u2, f2 = -u1 u2 expressed as coefficient lists
    model = polynomial_model(
        "pair", 2, (1.0, 1.0),
        [[(-1.0, (1, 1))], [(-1.0, (1, 1))]],
    )
    f = eval_reactions(model, np.array([2.0, 3.0]))
    assert f.tolist() == [-6.0, -6.0]
    assert check_assumption(model, Assumption.M, count=100).passed
