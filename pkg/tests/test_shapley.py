import numpy as np
import pytest

from sgve import bench
from sgve.errors import GameSpecError
from sgve.game import DiscretizedGame, discretize
from sgve.shapley import ShapleyOperator, check_properties

TOL = 1e-9


def constant_game(d: int, c: float, nx: int = 3, ny: int = 3) -> DiscretizedGame:
    rho = np.zeros((nx, ny, d))
    rho[:, :, 0] = 1.0
    gx = np.linspace(0, 1, nx)[:, None]
    gy = np.linspace(0, 1, ny)[:, None]
    return DiscretizedGame(
        states=d,
        grids_x=(gx,) * d, grids_y=(gy,) * d,
        g=tuple(np.full((nx, ny), c) for _ in range(d)),
        rho=(rho,) * d)


def tagged(game: DiscretizedGame, tags) -> DiscretizedGame:
    return DiscretizedGame(states=game.states, grids_x=game.grids_x,
                           grids_y=game.grids_y, g=game.g, rho=game.rho,
                           controller=tuple(tags))


def test_constant_game_shift():
    op = ShapleyOperator(constant_game(3, 2.5), tol=TOL)
    out = op.apply(np.zeros(3))
    assert np.allclose(out, 2.5, atol=2 * TOL)


def test_benchmark_absorbing_component_exact():
    # the benchmark's optimal mixtures are continuum densities, so its grid
    # matrices are LP-degenerate; certificates need the looser benchmark tol
    op = ShapleyOperator(discretize(bench.exshap_spec(), 21), tol=1e-6)
    rng = np.random.default_rng(0)
    for _ in range(5):
        f = rng.uniform(-3, 3, 2)
        assert op.apply(f)[0] == f[0]


def test_benchmark_second_component_at_zero():
    # the state-2 matrix at f = 0 has an exact pure saddle worth 1/2
    op = ShapleyOperator(discretize(bench.exshap_spec(), 201), tol=1e-6)
    out = op.apply(np.zeros(2))
    assert abs(out[1] - 0.5) <= 1e-12


def test_dimension_mismatch():
    op = ShapleyOperator(constant_game(2, 0.0), tol=TOL)
    with pytest.raises(GameSpecError):
        op.apply(np.zeros(3))
    with pytest.raises(GameSpecError):
        op.apply(np.array([np.inf, 0.0]))


def random_game(rng, d=3, max_actions=6):
    return bench.random_discretized_game(rng, states=d, max_actions=max_actions)


def y_independent_game(rng, d=2, nx=4):
    """Tensors constant along the column axis: player 2 is a dummy."""
    base = random_game(rng, d=d, max_actions=nx)
    g = tuple(np.repeat(gk[:, :1], gk.shape[1], axis=1) for gk in base.g)
    rho = tuple(np.repeat(rk[:, :1, :], rk.shape[1], axis=1) for rk in base.rho)
    return DiscretizedGame(states=d, grids_x=base.grids_x, grids_y=base.grids_y,
                           g=g, rho=rho)


def test_mdp_form_matches_general_on_dummy_column_player():
    rng = np.random.default_rng(42)
    for _ in range(5):
        game = y_independent_game(rng)
        pure = ShapleyOperator(tagged(game, ["p1"] * game.states), form="mdp", tol=TOL)
        mixed = ShapleyOperator(game, form="general", tol=TOL)
        f = rng.uniform(-2, 2, game.states)
        assert np.abs(pure.apply(f) - mixed.apply(f)).max() <= 2 * TOL


def test_perfect_info_form_matches_general():
    rng = np.random.default_rng(43)
    game = y_independent_game(rng, d=3)
    # state-wise control tags: dummy opponent either way, so mixing is moot
    pure = ShapleyOperator(tagged(game, ["p1", "p2", "p1"]),
                           form="perfectInfo", tol=TOL)
    mixed = ShapleyOperator(game, form="general", tol=TOL)
    for _ in range(5):
        f = rng.uniform(-2, 2, 3)
        out_pure = pure.apply(f)
        out_mixed = mixed.apply(f)
        assert np.abs(out_pure[0] - out_mixed[0]).max() <= 2 * TOL
        assert np.abs(out_pure[2] - out_mixed[2]).max() <= 2 * TOL
        # a p2-controlled state of a dummy-column game is a one-row min
        A = pure.state_matrix(1, f)
        assert out_pure[1] == A.max(axis=0).min()


def test_single_state_mdp_dominant_action():
    g = np.array([[1.0], [2.0]])
    rho = np.ones((2, 1, 1))
    game = DiscretizedGame(states=1, grids_x=(np.array([[0.0], [1.0]]),),
                           grids_y=(np.array([[0.0]]),), g=(g,), rho=(rho,),
                           controller=("p1",))
    op = ShapleyOperator(game, form="mdp", tol=TOL)
    f = np.zeros(1)
    for n in (1, 4, 9):
        f = np.zeros(1)
        for _ in range(n):
            f = op.apply(f)
        assert f[0] / n == 2.0


def test_switching_form_is_max_of_inner_min():
    rng = np.random.default_rng(44)
    d, nx, ny = 2, 4, 5
    g = tuple(rng.uniform(-1, 1, (nx, ny)) for _ in range(d))
    rho_rows = rng.dirichlet(np.ones(d), size=(d, nx))
    # transitions depend on the row player only
    rho = tuple(np.repeat(rho_rows[k][:, None, :], ny, axis=1) for k in range(d))
    gx, gy = np.linspace(0, 1, nx)[:, None], np.linspace(0, 1, ny)[:, None]
    game = DiscretizedGame(states=d, grids_x=(gx,) * d, grids_y=(gy,) * d,
                           g=g, rho=rho, controller=("p1", "p1"))
    op = ShapleyOperator(game, form="switching", tol=TOL)
    f = rng.uniform(-2, 2, d)
    out = op.apply(f)
    for k in range(d):
        expected = (g[k].min(axis=1) + rho_rows[k] @ f).max()
        assert out[k] == pytest.approx(expected, abs=1e-14)


def test_form_tag_validation():
    game = constant_game(2, 0.0)
    with pytest.raises(GameSpecError):
        ShapleyOperator(game, form="perfectInfo")
    with pytest.raises(GameSpecError):
        ShapleyOperator(tagged(game, ["p1", "p2"]), form="mdp")
    with pytest.raises(GameSpecError):
        ShapleyOperator(game, form="makeBelieve")


def test_properties_on_translation_pair():
    rng = np.random.default_rng(1)
    op = ShapleyOperator(random_game(rng), tol=TOL)
    f = rng.uniform(-1, 1, 3)
    report = check_properties(op, [(f, f + 1.0), (f, f.copy())])
    assert report.additive_homogeneity <= report.slack(TOL)
    assert report.nonexpansiveness <= report.slack(TOL)
    assert report.ordered_pairs == 2
    assert report.monotonicity <= report.slack(TOL)


def test_properties_random_games():
    rng = np.random.default_rng(2)
    for _ in range(10):
        op = ShapleyOperator(random_game(rng, d=int(rng.integers(1, 4))), tol=TOL)
        d = op.dim
        f = rng.uniform(-2, 2, d)
        pairs = [(f, f + rng.uniform(0, 1, d)),
                 (rng.uniform(-2, 2, d), rng.uniform(-2, 2, d))]
        report = check_properties(op, pairs)
        slack = report.slack(TOL)
        assert report.monotonicity <= slack
        assert report.additive_homogeneity <= slack
        assert report.nonexpansiveness <= slack


def test_nonexpansive_against_general_bound():
    rng = np.random.default_rng(6)
    op = ShapleyOperator(random_game(rng), tol=TOL)
    for _ in range(10):
        f = rng.uniform(-3, 3, 3)
        g = rng.uniform(-3, 3, 3)
        lhs = np.abs(op.apply(f) - op.apply(g)).max()
        assert lhs <= np.abs(f - g).max() + 2 * TOL
