"""Resolution tests: inheritance flattening, role navigation, validation."""

import pytest

from bpmnrisk.errors import MalResolutionError
from bpmnrisk.mal import (
    MalSource,
    StepKind,
    merge_sources,
    parse_mal,
    resolve_language,
)


def resolve(text: str):
    return resolve_language(parse_mal(MalSource(text, "<test>")))


def test_phishing_language_resolves(phishing_language):
    lang = phishing_language
    assert set(lang.assets) == {"Application", "Connection", "Data", "Password", "User"}


def test_phish_target_reaches_password_obtain(phishing_language):
    phish = phishing_language.assets["User"].steps["phish"]
    (target,) = phish.targets
    assert target.roles == ("pwds",)
    assert target.asset == "Password"
    assert target.step == "obtain"


def test_role_navigation(phishing_language):
    end = phishing_language.navigate("Connection", "app")
    assert end.target_asset == "Application"
    end = phishing_language.navigate("Password", "app")
    assert end.target_asset == "Application"
    with pytest.raises(MalResolutionError):
        phishing_language.navigate("Connection", "pwds")


def test_self_extension_rejected():
    with pytest.raises(MalResolutionError, match="cycle"):
        resolve("category C { asset A extends A { | x } }")


def test_extension_cycle_rejected():
    with pytest.raises(MalResolutionError, match="cycle"):
        resolve(
            "category C { asset A extends B { | x } asset B extends A { | y } }"
        )


def test_unknown_parent_rejected():
    with pytest.raises(MalResolutionError, match="unknown asset"):
        resolve("category C { asset A extends Ghost { | x } }")


def test_unknown_association_asset_rejected():
    with pytest.raises(MalResolutionError, match="unknown asset"):
        resolve("category C { asset A { | x } } associations { A[a] * <- R -> * [g]Ghost }")


def test_inherited_steps_are_union():
    lang = resolve(
        """
        category C {
          asset Base { | ping -> pong | pong }
          asset Child extends Base { | extra }
        }
        """
    )
    assert set(lang.assets["Child"].steps) == {"ping", "pong", "extra"}
    assert lang.assets["Child"].steps["ping"].declared_in == "Base"


def test_child_step_shadows_parent():
    lang = resolve(
        """
        category C {
          asset Base { | act [Exp(0.5)] -> other | other }
          asset Child extends Base { & act }
        }
        """
    )
    child_act = lang.assets["Child"].steps["act"]
    assert child_act.kind is StepKind.AND
    assert child_act.targets == ()  # replacement is total, not a merge
    assert child_act.declared_in == "Child"
    assert lang.assets["Base"].steps["act"].kind is StepKind.OR


def test_duplicate_step_rejected():
    with pytest.raises(MalResolutionError, match="duplicate"):
        resolve("category C { asset A { | x | x } }")


def test_step_defense_name_clash_rejected():
    with pytest.raises(MalResolutionError, match="duplicate"):
        resolve("category C { asset A { | x # x } }")


def test_unresolvable_target_rejected():
    with pytest.raises(MalResolutionError, match="does not name an attack step"):
        resolve("category C { asset A { | x -> ghost } }")


def test_unresolvable_role_rejected():
    with pytest.raises(MalResolutionError, match="cannot navigate role"):
        resolve("category C { asset A { | x -> nowhere.y } }")


def test_ambiguous_role_rejected():
    with pytest.raises(MalResolutionError, match="ambiguous"):
        resolve(
            """
            category C { asset A { | x } asset B { | y } asset D { | z } }
            associations {
              B[peer] * <- R1 -> * [other]A
              D[peer] * <- R2 -> * [other]A
            }
            """
        )


def test_association_on_parent_navigable_from_child(phishing_language):
    # Password extends Data; an association on Data would apply to Password
    lang = resolve(
        """
        category C {
          asset Store { | reach -> items.take }
          asset Item { | take }
          asset Gem extends Item { | sparkle }
        }
        associations { Item[items] * <- Holds -> 1 [store]Store }
        """
    )
    assert lang.navigate("Gem", "store").target_asset == "Store"


def test_resolution_deterministic(phishing_unresolved):
    from tests.conftest import DATA_SUPPLEMENT

    supplement = parse_mal(MalSource(DATA_SUPPLEMENT, "<s>"))
    merged = merge_sources(phishing_unresolved, supplement)
    assert resolve_language(merged) == resolve_language(merged)


def test_every_target_dereferences(corelang):
    for asset in corelang.assets.values():
        for step in asset.steps.values():
            for target in step.targets:
                terminal = corelang.assets[target.asset]
                assert target.step in terminal.steps
        for defense in asset.defenses.values():
            for target in defense.targets:
                terminal = corelang.assets[target.asset]
                assert target.step in terminal.steps


def test_bundled_language_contents(corelang):
    assert set(corelang.assets) == {
        "Application",
        "Connection",
        "Credentials",
        "Data",
        "Exploit",
        "Identity",
        "User",
        "Vulnerability",
    }
    app = corelang.assets["Application"]
    assert app.steps["access"].kind is StepKind.AND
    assert "exploit" in app.steps
    assert "authenticated" in corelang.assets["Connection"].defenses
    # credentials behave like data at rest: reading them yields their use
    creds = corelang.assets["Credentials"]
    assert creds.extends == "Data"
    assert {t.step for t in creds.steps["read"].targets} == {"use"}


def test_duplicate_asset_rejected():
    with pytest.raises(MalResolutionError, match="duplicate asset"):
        resolve("category C { asset A { | x } asset A { | y } }")
