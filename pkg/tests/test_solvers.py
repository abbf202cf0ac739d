import random
from fractions import Fraction as F

import pytest

from noisygames.core import DomainError, Objective, UncertaintyGame
from noisygames.pog import Pomdp
from noisygames.simulate import random_pomdp
from noisygames.solvers import (
    Unsupported,
    almost_sure_buchi,
    almost_sure_reach,
    almost_sure_safety,
    positive_reach,
    positive_safety,
    solve_uncertainty_game,
    sure_winning,
)

from oracles import positive_reach_bfs, validate_support_controller

HALF = F(1, 2)


def staged_pomdp() -> Pomdp:
    """Reaches t almost surely under "go", but only via the aa stage."""
    return Pomdp(
        states=["zz", "aa", "t"],
        actions=["go", "wait"],
        delta={
            ("zz", "go"): {"zz": HALF, "aa": HALF},
            ("zz", "wait"): {"zz": F(1)},
            ("aa", "go"): {"t": F(1)},
            ("aa", "wait"): {"aa": F(1)},
            ("t", "go"): {"t": F(1)},
            ("t", "wait"): {"t": F(1)},
        },
        obs=[["zz", "aa"], ["t"]],
        initial="zz",
    )


def test_almost_sure_reach_with_validated_controller():
    m = staged_pomdp()
    region = almost_sure_reach(m, ["t"])
    assert region.initial_winning
    assert validate_support_controller(m, ["t"], region.witness.act)


def test_almost_sure_reach_false_when_target_cut_off():
    m = Pomdp(
        states=["s", "t"],
        actions=["w"],
        delta={("s", "w"): {"s": F(1)}, ("t", "w"): {"t": F(1)}},
        obs=[["s", "t"]],
        initial="s",
    )
    assert not almost_sure_reach(m, ["t"]).initial_winning


def test_almost_sure_buchi_revisits_forever():
    m = Pomdp(
        states=["p", "q"],
        actions=["w"],
        delta={("p", "w"): {"q": F(1)}, ("q", "w"): {"p": F(1)}},
        obs=[["p", "q"]],
        initial="p",
    )
    assert almost_sure_buchi(m, ["p"]).initial_winning


def test_positive_reach_word_witness():
    region = positive_reach(staged_pomdp(), ["t"])
    assert region.initial_winning
    word = region.witness.word
    # Replaying the word must put positive mass on the target.
    supp = {"zz"}
    hit = False
    m = staged_pomdp()
    for letter in word:
        supp = {t for s in supp for t, w in m.succ(s, letter).items() if w > 0}
        hit = hit or "t" in supp
    assert hit


def test_positive_reach_matches_graph_search():
    rng = random.Random(40)
    for _ in range(20):
        m = random_pomdp(rng.randrange(10_000), n_states=rng.randint(2, 4))
        target = [rng.choice(m.states)]
        assert positive_reach(m, target).initial_winning == positive_reach_bfs(m, target)


def test_retry_coin_is_never_safe(retry_pomdp):
    assert not positive_safety(retry_pomdp, ["alive"]).initial_winning
    assert not almost_sure_safety(retry_pomdp, ["alive"]).initial_winning


def test_self_loop_is_safe_forever():
    m = Pomdp(
        states=["ok", "bad"],
        actions=["w"],
        delta={("ok", "w"): {"ok": F(1)}, ("bad", "w"): {"bad": F(1)}},
        obs=[["ok", "bad"]],
        initial="ok",
    )
    assert positive_safety(m, ["ok"]).initial_winning
    assert almost_sure_safety(m, ["ok"]).initial_winning


def test_sure_reach_blocked_by_shared_observation():
    """The target is indistinguishable from a sink, so nothing is sure."""
    m = Pomdp(
        states=["s", "t", "k"],
        actions=["a"],
        delta={
            ("s", "a"): {"t": HALF, "k": HALF},
            ("t", "a"): {"t": F(1)},
            ("k", "a"): {"k": F(1)},
        },
        obs=[["s"], ["t", "k"]],
        initial="s",
    )
    assert not sure_winning(m, Objective.reach(["t"])).initial_winning
    assert positive_reach(m, ["t"]).initial_winning


def test_sure_reach_with_deterministic_step():
    m = Pomdp(
        states=["s", "t"],
        actions=["a"],
        delta={("s", "a"): {"t": F(1)}, ("t", "a"): {"t": F(1)}},
        obs=[["s"], ["t"]],
        initial="s",
    )
    assert sure_winning(m, Objective.reach(["t"])).initial_winning


def test_budget_refusal_names_the_knob(identity_game, monkeypatch):
    monkeypatch.setenv("UG_MAX_ENUM", "1")
    with pytest.raises(DomainError, match="UG_MAX_ENUM"):
        solve_uncertainty_game(identity_game, Objective.buchi(["x"]), mode="almost",
                               player2="all-powerful")


# The full verdict matrix on the perfectly observed coin-flip game. Each
# entry is either ("win", bool) or ("unsupported", classification).

MATRIX = {
    ("all-powerful", "reach", "sure"): ("win", True),
    ("all-powerful", "reach", "almost"): ("win", True),
    ("all-powerful", "reach", "positive"): ("win", True),
    ("all-powerful", "safe", "sure"): ("win", False),
    ("all-powerful", "safe", "almost"): ("win", False),
    ("all-powerful", "safe", "positive"): ("win", False),
    ("all-powerful", "buchi", "sure"): ("win", False),
    ("all-powerful", "buchi", "almost"): ("win", True),
    ("all-powerful", "buchi", "positive"): ("unsupported", "undecidable"),
    ("all-powerful", "cobuchi", "sure"): ("win", False),
    ("all-powerful", "cobuchi", "almost"): ("unsupported", "undecidable"),
    ("all-powerful", "cobuchi", "positive"): ("unsupported", "EXPTIME"),
    ("all-powerful", "parity", "sure"): ("win", False),
    ("all-powerful", "parity", "almost"): ("unsupported", "undecidable"),
    ("all-powerful", "parity", "positive"): ("unsupported", "undecidable"),
    ("standard", "reach", "sure"): ("win", True),
    ("standard", "reach", "almost"): ("unsupported", "2EXPTIME"),
    ("standard", "reach", "positive"): ("win", True),
    ("standard", "safe", "sure"): ("win", False),
    ("standard", "safe", "almost"): ("win", False),
    ("standard", "safe", "positive"): ("unsupported", "2EXPTIME"),
    ("standard", "buchi", "sure"): ("win", False),
    ("standard", "buchi", "almost"): ("unsupported", "2EXPTIME"),
    ("standard", "buchi", "positive"): ("unsupported", "undecidable"),
    ("standard", "cobuchi", "sure"): ("win", False),
    ("standard", "cobuchi", "almost"): ("unsupported", "undecidable"),
    ("standard", "cobuchi", "positive"): ("unsupported", "2EXPTIME"),
    ("standard", "parity", "sure"): ("win", False),
    ("standard", "parity", "almost"): ("unsupported", "undecidable"),
    ("standard", "parity", "positive"): ("unsupported", "undecidable"),
}


def objective_for(kind: str) -> Objective:
    if kind == "parity":
        return Objective.parity({"x": 0, "y": 1})
    return getattr(Objective, kind)(["x"])


@pytest.mark.parametrize("player2,kind,mode", sorted(MATRIX))
def test_dispatch_matrix(identity_game, player2, kind, mode):
    result = solve_uncertainty_game(identity_game, objective_for(kind), mode=mode, player2=player2)
    shape, value = MATRIX[(player2, kind, mode)]
    if shape == "win":
        assert not isinstance(result, Unsupported)
        assert result.initial_winning == value
    else:
        assert isinstance(result, Unsupported)
        assert result.classification == value
        if value == "undecidable":
            assert result.message == "Unsupported: undecidable (Table 1)"


def test_noisy_parity_needs_visible_priorities(uniform_game):
    with pytest.raises(DomainError, match="priority"):
        solve_uncertainty_game(uniform_game, Objective.parity({"x": 0, "y": 1}),
                               mode="sure", player2="standard")
