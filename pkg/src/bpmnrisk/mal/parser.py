"""Recursive-descent parser for the threat-modeling language subset.

Grammar (comments and whitespace insignificant)::

    program      := category* associations?
    category     := "category" IDENT "{" asset* "}"
    asset        := "asset" IDENT ("extends" IDENT)? "{" item* "}"
    item         := ("|" | "&") IDENT dist? targets?      (attack step)
                  | "#" IDENT targets?                    (defense)
    dist         := "[" IDENT ("(" NUMBER ("," NUMBER)* ")")? "]"
    targets      := "->" path ("," path)*
    path         := IDENT ("." IDENT)*
    associations := "associations" "{" assoc* "}"
    assoc        := IDENT "[" IDENT "]" mult "<-" IDENT "->" mult "[" IDENT "]" IDENT
    mult         := "1" | "*"

Constructs from the full upstream language (existence steps, ``let``
bindings, probabilities on defenses, ``+>`` append targets, multiplicity
ranges) are rejected with an "unsupported construct" error.
"""

from __future__ import annotations

from ..errors import MalParseError
from .ast import (
    AssetTypeDef,
    AssociationDef,
    AttackStepDef,
    DefenseDef,
    Distribution,
    MalSource,
    Multiplicity,
    SourceLoc,
    StepKind,
    TargetPath,
    UnresolvedLanguage,
)
from .lexer import Token, TokenType, tokenize

_KEYWORDS = {"category", "asset", "extends", "associations"}

_DIST_NAMES = {
    "Exp": "exponential",
    "Exponential": "exponential",
    "Constant": "constant",
    "Instant": "instant",
}

_KNOWN_UNSUPPORTED = {
    "E": "existence step",
    "let": "let binding",
    "abstract": "abstract asset",
    "include": "include directive",
}


class _Parser:
    def __init__(self, tokens: list[Token], origin: str):
        self.tokens = tokens
        self.origin = origin
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> MalParseError:
        tok = tok or self.peek()
        return MalParseError(message, self.origin, tok.line, tok.column)

    def expect(self, ttype: TokenType) -> Token:
        tok = self.peek()
        if tok.type is not ttype:
            raise self.error(f"expected {ttype.value!r}, got {tok.value!r}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.type is not TokenType.IDENT:
            raise self.error(f"expected {what}, got {tok.value!r}")
        return self.advance()

    def match(self, ttype: TokenType) -> bool:
        return self.peek().type is ttype

    def match_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.type is TokenType.IDENT and tok.value == word

    # --- grammar rules -------------------------------------------------

    def parse_program(self) -> UnresolvedLanguage:
        assets: list[AssetTypeDef] = []
        associations: list[AssociationDef] = []
        saw_associations = False
        while not self.match(TokenType.EOF):
            if self.match_keyword("category"):
                assets.extend(self.parse_category())
            elif self.match_keyword("associations"):
                if saw_associations:
                    raise self.error("duplicate associations block")
                saw_associations = True
                associations.extend(self.parse_associations())
            else:
                tok = self.peek()
                if tok.type is TokenType.IDENT and tok.value in _KNOWN_UNSUPPORTED:
                    raise self.error(
                        f"unsupported construct: {_KNOWN_UNSUPPORTED[tok.value]}", tok
                    )
                raise self.error("expected 'category' or 'associations'")
        return UnresolvedLanguage(tuple(assets), tuple(associations))

    def parse_category(self) -> list[AssetTypeDef]:
        self.advance()  # category
        name = self.expect_ident("category name").value
        self.expect(TokenType.LBRACE)
        assets: list[AssetTypeDef] = []
        while not self.match(TokenType.RBRACE):
            if self.match_keyword("asset"):
                assets.append(self.parse_asset(name))
            elif self.peek().type is TokenType.IDENT and self.peek().value in _KNOWN_UNSUPPORTED:
                raise self.error(
                    f"unsupported construct: {_KNOWN_UNSUPPORTED[self.peek().value]}"
                )
            else:
                raise self.error("expected 'asset'")
        self.expect(TokenType.RBRACE)
        return assets

    def parse_asset(self, category: str) -> AssetTypeDef:
        start = self.advance()  # asset
        name_tok = self.expect_ident("asset name")
        extends = None
        if self.match_keyword("extends"):
            self.advance()
            extends = self.expect_ident("parent asset name").value
        self.expect(TokenType.LBRACE)
        steps: list[AttackStepDef] = []
        defenses: list[DefenseDef] = []
        while not self.match(TokenType.RBRACE):
            tok = self.peek()
            if tok.type in (TokenType.PIPE, TokenType.AMP):
                steps.append(self.parse_attack_step())
            elif tok.type is TokenType.HASH:
                defenses.append(self.parse_defense())
            elif tok.type in (TokenType.BANG, TokenType.AT, TokenType.PLUS_ARROW):
                raise self.error(f"unsupported construct: {tok.value!r}", tok)
            elif tok.type is TokenType.IDENT and tok.value in _KNOWN_UNSUPPORTED:
                raise self.error(f"unsupported construct: {_KNOWN_UNSUPPORTED[tok.value]}", tok)
            else:
                raise self.error("expected '|', '&' or '#' starting a step or defense")
        self.expect(TokenType.RBRACE)
        return AssetTypeDef(
            name=name_tok.value,
            category=category,
            extends=extends,
            attack_steps=tuple(steps),
            defenses=tuple(defenses),
            loc=SourceLoc(start.line, start.column),
        )

    def parse_attack_step(self) -> AttackStepDef:
        marker = self.advance()
        kind = StepKind.OR if marker.type is TokenType.PIPE else StepKind.AND
        name_tok = self.expect_ident("attack step name")
        ttc = Distribution.instant()
        if self.match(TokenType.LBRACKET):
            ttc = self.parse_distribution()
        if self.match(TokenType.LBRACE):
            raise self.error("unsupported construct: CIA annotation")
        targets = self.parse_targets()
        return AttackStepDef(
            name=name_tok.value,
            kind=kind,
            ttc=ttc,
            targets=targets,
            loc=SourceLoc(marker.line, marker.column),
        )

    def parse_defense(self) -> DefenseDef:
        marker = self.advance()  # '#'
        name_tok = self.expect_ident("defense name")
        if self.match(TokenType.LBRACKET):
            raise self.error("unsupported construct: probability on a defense")
        targets = self.parse_targets()
        return DefenseDef(
            name=name_tok.value,
            targets=targets,
            loc=SourceLoc(marker.line, marker.column),
        )

    def parse_distribution(self) -> Distribution:
        self.expect(TokenType.LBRACKET)
        name_tok = self.expect_ident("distribution name")
        family = _DIST_NAMES.get(name_tok.value)
        if family is None:
            raise self.error(f"unknown distribution {name_tok.value!r}", name_tok)
        args: list[float] = []
        if self.match(TokenType.LPAREN):
            self.advance()
            args.append(self.parse_number())
            while self.match(TokenType.COMMA):
                self.advance()
                args.append(self.parse_number())
            self.expect(TokenType.RPAREN)
        self.expect(TokenType.RBRACKET)
        if family == "instant":
            if args:
                raise self.error("Instant takes no arguments", name_tok)
            return Distribution.instant()
        if len(args) != 1:
            raise self.error(f"{name_tok.value} takes exactly one argument", name_tok)
        try:
            if family == "constant":
                return Distribution.constant(args[0])
            return Distribution.exponential(args[0])
        except ValueError as exc:
            raise self.error(str(exc), name_tok) from exc

    def parse_number(self) -> float:
        tok = self.expect(TokenType.NUMBER)
        try:
            return float(tok.value)
        except ValueError as exc:
            raise self.error(f"bad number {tok.value!r}", tok) from exc

    def parse_targets(self) -> tuple[TargetPath, ...]:
        if self.match(TokenType.PLUS_ARROW):
            raise self.error("unsupported construct: '+>' append target")
        if not self.match(TokenType.ARROW):
            return ()
        self.advance()
        paths = [self.parse_path()]
        while self.match(TokenType.COMMA):
            self.advance()
            paths.append(self.parse_path())
        return tuple(paths)

    def parse_path(self) -> TargetPath:
        segments = [self.expect_ident("role or step name").value]
        while self.match(TokenType.DOT):
            self.advance()
            segments.append(self.expect_ident("role or step name").value)
        return TargetPath(tuple(segments))

    def parse_associations(self) -> list[AssociationDef]:
        self.advance()  # associations
        self.expect(TokenType.LBRACE)
        assocs: list[AssociationDef] = []
        while not self.match(TokenType.RBRACE):
            assocs.append(self.parse_association())
        self.expect(TokenType.RBRACE)
        return assocs

    def parse_association(self) -> AssociationDef:
        left_tok = self.expect_ident("asset name")
        self.expect(TokenType.LBRACKET)
        left_role = self.expect_ident("role name").value
        self.expect(TokenType.RBRACKET)
        left_mult = self.parse_multiplicity()
        self.expect(TokenType.LARROW)
        name = self.expect_ident("association name").value
        self.expect(TokenType.ARROW)
        right_mult = self.parse_multiplicity()
        self.expect(TokenType.LBRACKET)
        right_role = self.expect_ident("role name").value
        self.expect(TokenType.RBRACKET)
        right_asset = self.expect_ident("asset name").value
        return AssociationDef(
            left_asset=left_tok.value,
            left_role=left_role,
            left_mult=left_mult,
            name=name,
            right_mult=right_mult,
            right_role=right_role,
            right_asset=right_asset,
            loc=SourceLoc(left_tok.line, left_tok.column),
        )

    def parse_multiplicity(self) -> Multiplicity:
        tok = self.peek()
        if tok.type is TokenType.STAR:
            self.advance()
            return Multiplicity.MANY
        if tok.type is TokenType.NUMBER:
            self.advance()
            if self.match(TokenType.DOT):
                raise self.error("unsupported construct: multiplicity range")
            if tok.value != "1":
                raise self.error(f"multiplicity must be '1' or '*', got {tok.value!r}", tok)
            return Multiplicity.ONE
        raise self.error(f"expected multiplicity '1' or '*', got {tok.value!r}")


def parse_mal(src: MalSource) -> UnresolvedLanguage:
    """Parse a language source into an unresolved syntax tree."""
    tokens = tokenize(src.text, src.origin)
    return _Parser(tokens, src.origin).parse_program()


def parse_mal_file(path) -> UnresolvedLanguage:
    from pathlib import Path

    p = Path(path)
    return parse_mal(MalSource(p.read_text(encoding="utf-8"), str(p)))


# --- pretty printing ---------------------------------------------------


def _format_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _format_dist(d: Distribution) -> str:
    from .ast import DistKind

    if d.kind is DistKind.CONSTANT:
        return f" [Constant({_format_number(d.value)})]"
    if d.kind is DistKind.EXPONENTIAL:
        return f" [Exp({_format_number(d.value)})]"
    return ""


def pretty_print(lang: UnresolvedLanguage) -> str:
    """Render a parsed language back to source that reparses identically."""
    lines: list[str] = []
    by_category: dict[str, list[AssetTypeDef]] = {}
    order: list[str] = []
    for asset in lang.assets:
        if asset.category not in by_category:
            by_category[asset.category] = []
            order.append(asset.category)
        by_category[asset.category].append(asset)
    for category in order:
        lines.append(f"category {category} {{")
        for asset in by_category[category]:
            header = f"  asset {asset.name}"
            if asset.extends:
                header += f" extends {asset.extends}"
            lines.append(header + " {")
            for step in asset.attack_steps:
                lines.append(f"    {step.kind.value} {step.name}{_format_dist(step.ttc)}")
                if step.targets:
                    lines.append("      -> " + ", ".join(str(t) for t in step.targets))
            for defense in asset.defenses:
                lines.append(f"    # {defense.name}")
                if defense.targets:
                    lines.append("      -> " + ", ".join(str(t) for t in defense.targets))
            lines.append("  }")
        lines.append("}")
    if lang.associations:
        lines.append("associations {")
        for a in lang.associations:
            lines.append(
                f"  {a.left_asset}[{a.left_role}] {a.left_mult.value} <- {a.name} -> "
                f"{a.right_mult.value} [{a.right_role}]{a.right_asset}"
            )
        lines.append("}")
    return "\n".join(lines) + "\n"
