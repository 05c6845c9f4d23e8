"""Parser tests for the threat-language subset."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpmnrisk.errors import MalParseError
from bpmnrisk.mal import (
    DistKind,
    Distribution,
    MalSource,
    Multiplicity,
    StepKind,
    parse_mal,
    pretty_print,
)


def parse(text: str):
    return parse_mal(MalSource(text, "<test>"))


def test_phishing_fixture_assets(phishing_unresolved):
    lang = phishing_unresolved
    assert [a.name for a in lang.assets] == ["Connection", "Application", "User", "Password"]
    assert len(lang.associations) == 3
    password = lang.assets[3]
    assert password.extends == "Data"


def test_phishing_fixture_kinds_and_distributions(phishing_unresolved):
    by_name = {a.name: a for a in phishing_unresolved.assets}
    app = by_name["Application"]
    steps = {s.name: s for s in app.attack_steps}
    assert steps["access"].kind is StepKind.AND
    assert steps["connect"].kind is StepKind.OR
    assert steps["guessedPwd"].ttc == Distribution.exponential(0.02)
    user_steps = {s.name: s for s in by_name["User"].attack_steps}
    assert user_steps["phish"].ttc == Distribution.exponential(0.1)
    assert user_steps["phish"].targets[0].segments == ("pwds", "obtain")


def test_association_roles_and_multiplicity(phishing_unresolved):
    acc = phishing_unresolved.associations[0]
    assert (acc.left_asset, acc.left_role, acc.left_mult) == (
        "Connection",
        "con",
        Multiplicity.MANY,
    )
    assert (acc.right_asset, acc.right_role) == ("Application", "app")
    cred = phishing_unresolved.associations[1]
    assert cred.left_mult is Multiplicity.ONE


def test_minimal_program():
    lang = parse("category C { asset A { | x } } associations {}")
    assert len(lang.assets) == 1
    step = lang.assets[0].attack_steps[0]
    assert step.kind is StepKind.OR
    assert step.targets == ()
    assert step.ttc.kind is DistKind.INSTANT


def test_comments_and_whitespace_insignificant():
    a = parse("category C { asset A { | x } }")
    b = parse("// header\ncategory C {\n  // inner\n  asset A {\n    | x\n  }\n}\n")
    assert a == b


def test_multiple_targets_on_one_step():
    lang = parse("category C { asset A { | x -> y, z | y | z } }")
    step = lang.assets[0].attack_steps[0]
    assert [str(t) for t in step.targets] == ["y", "z"]


def test_defense_parsed():
    lang = parse("category C { asset A { # hardening -> x | x } }")
    defense = lang.assets[0].defenses[0]
    assert defense.name == "hardening"
    assert str(defense.targets[0]) == "x"


def test_constant_distribution():
    lang = parse("category C { asset A { | x [Constant(3)] } }")
    assert lang.assets[0].attack_steps[0].ttc == Distribution.constant(3.0)


def test_instant_distribution_explicit():
    lang = parse("category C { asset A { | x [Instant] } }")
    assert lang.assets[0].attack_steps[0].ttc.kind is DistKind.INSTANT


def test_syntax_error_carries_position():
    with pytest.raises(MalParseError) as err:
        parse("category C {\n  asset A { | x -> }\n}")
    assert err.value.line == 2
    assert "<test>" in str(err.value)


def test_unknown_distribution_rejected():
    with pytest.raises(MalParseError, match="unknown distribution"):
        parse("category C { asset A { | x [Gamma(1, 2)] } }")


def test_bad_distribution_arguments():
    with pytest.raises(MalParseError):
        parse("category C { asset A { | x [Exp(0)] } }")
    with pytest.raises(MalParseError):
        parse("category C { asset A { | x [Exp(1, 2)] } }")


@pytest.mark.parametrize(
    "source",
    [
        "category C { asset A { E exists } }",
        "category C { asset A { let shortcut = x } }",
        "category C { asset A { # d [Exp(1)] } }",
        "category C { asset A { | x +> y } }",
        "associations { A[a] 0..1 <- N -> * [b]B }",
    ],
)
def test_unsupported_constructs_rejected(source):
    with pytest.raises(MalParseError, match="unsupported construct|expected"):
        parse(source)


def test_duplicate_associations_block_rejected():
    with pytest.raises(MalParseError, match="duplicate associations"):
        parse("associations {} associations {}")


def test_parse_is_deterministic(phishing_source):
    assert parse_mal(phishing_source) == parse_mal(phishing_source)


# --- round-trip property -------------------------------------------------

_ident = st.from_regex(r"[a-z][a-zA-Z0-9]{0,6}", fullmatch=True)
_upper_ident = st.from_regex(r"[A-Z][a-zA-Z0-9]{0,6}", fullmatch=True)


@st.composite
def languages(draw):
    asset_names = draw(
        st.lists(_upper_ident, min_size=1, max_size=4, unique=True)
    )
    assets = []
    step_names: dict[str, list[str]] = {}
    for name in asset_names:
        names = draw(st.lists(_ident, min_size=1, max_size=3, unique=True))
        step_names[name] = names
        assets.append((name, names))

    lines = ["category Generated {"]
    for name, steps in assets:
        lines.append(f"  asset {name} {{")
        for step in steps:
            kind = draw(st.sampled_from(["|", "&"]))
            dist = draw(
                st.sampled_from(["", " [Exp(0.5)]", " [Constant(2)]", " [Instant]"])
            )
            lines.append(f"    {kind} {step}{dist}")
            # local targets only; resolution is out of scope here
            others = [s for s in steps if s != step]
            if others and draw(st.booleans()):
                lines.append(f"      -> {draw(st.sampled_from(others))}")
        lines.append("  }")
    lines.append("}")
    if draw(st.booleans()) and len(asset_names) >= 2:
        lines.append("associations {")
        lines.append(
            f"  {asset_names[0]}[left] * <- Rel -> 1 [right]{asset_names[1]}"
        )
        lines.append("}")
    return "\n".join(lines)


@settings(max_examples=60, deadline=None)
@given(languages())
def test_pretty_print_round_trip(source):
    first = parse(source)
    printed = pretty_print(first)
    assert parse(printed) == first


def test_phishing_fixture_round_trip(phishing_unresolved):
    assert parse(pretty_print(phishing_unresolved)) == phishing_unresolved
