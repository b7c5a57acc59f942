"""Semantic versions and npm-style version ranges.

Versions follow the canonical ``MAJOR.MINOR.PATCH[-prerelease][+build]``
grammar with its usual precedence rules (numeric identifiers compare
numerically and sort below alphanumeric ones, a prerelease sorts below the
plain version, build metadata is ignored). The range grammar is the
node-semver subset commonly found in package manifests:

* exact (``1.2.3`` / ``=1.2.3``), comparators ``>`` ``>=`` ``<`` ``<=``
* caret ``^1.2.3`` and tilde ``~1.2.3``
* wildcards ``*`` / ``x`` components (``1.2.x``) and partial versions
* hyphen ranges ``1.2.3 - 2.0.0``
* space-separated AND within a clause, ``||`` for disjunction

A version that carries a prerelease tag only matches a range when one of
the comparators in the satisfied clause names the same major.minor.patch
triple and itself carries a prerelease tag — so ``^1.2.3-rc.1`` admits
``1.2.3-rc.2`` but a plain ``~1.2.3`` never drags in ``1.3.0-beta``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import total_ordering

from .errors import NoMatchingVersion, VersionParseError

__all__ = [
    "Version",
    "VersionRange",
    "NonSemverRelease",
    "parse_version",
    "resolve_version_range",
]

_VERSION_RE = re.compile(
    r"^(?P<major>0|[1-9]\d*)\.(?P<minor>0|[1-9]\d*)\.(?P<patch>0|[1-9]\d*)"
    r"(?:-(?P<prerelease>(?:0|[1-9]\d*|\d*[a-zA-Z-][0-9a-zA-Z-]*)"
    r"(?:\.(?:0|[1-9]\d*|\d*[a-zA-Z-][0-9a-zA-Z-]*))*))?"
    r"(?:\+(?P<build>[0-9a-zA-Z-]+(?:\.[0-9a-zA-Z-]+)*))?$"
)


class NonSemverRelease(UserWarning):
    """A release label was skipped because it is not a semantic version."""


def _identifier_key(ident: str):
    # numeric identifiers sort below alphanumeric ones
    if ident.isdigit():
        return (0, int(ident), "")
    return (1, 0, ident)


@total_ordering
@dataclass(frozen=True)
class Version:
    major: int
    minor: int
    patch: int
    prerelease: tuple[str, ...] = ()
    build: tuple[str, ...] = ()

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.major, self.minor, self.patch)

    def _key(self):
        if self.prerelease:
            pre = (0, tuple(_identifier_key(p) for p in self.prerelease))
        else:
            pre = (1, ())
        return (self.major, self.minor, self.patch, pre)

    def __lt__(self, other: "Version") -> bool:
        return self._key() < other._key()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Version):
            return NotImplemented
        # build metadata is ignored in precedence
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self) -> str:
        s = f"{self.major}.{self.minor}.{self.patch}"
        if self.prerelease:
            s += "-" + ".".join(self.prerelease)
        if self.build:
            s += "+" + ".".join(self.build)
        return s


def parse_version(text: str) -> Version:
    """Parse a strict semantic version; rejects leading ``v`` and partial
    versions like ``1.2``."""
    m = _VERSION_RE.match(text.strip()) if isinstance(text, str) else None
    if not m:
        raise VersionParseError(f"not a semantic version: {text!r}")
    pre = tuple(m.group("prerelease").split(".")) if m.group("prerelease") else ()
    build = tuple(m.group("build").split(".")) if m.group("build") else ()
    return Version(int(m.group("major")), int(m.group("minor")), int(m.group("patch")), pre, build)


@dataclass(frozen=True)
class _Comparator:
    op: str  # one of < <= > >= =
    version: Version

    def satisfied_by(self, v: Version) -> bool:
        if self.op == "=":
            return v == self.version
        if self.op == ">":
            return v > self.version
        if self.op == ">=":
            return v >= self.version
        if self.op == "<":
            return v < self.version
        return v <= self.version

    def __str__(self) -> str:
        return f"{self.op}{self.version}" if self.op != "=" else str(self.version)


# a partial version: 1 / 1.2 / 1.2.x / 1.x / * , optionally with prerelease
_PARTIAL_RE = re.compile(
    r"^(?P<major>\d+|[xX*])(?:\.(?P<minor>\d+|[xX*]))?(?:\.(?P<patch>\d+|[xX*]))?"
    r"(?:-(?P<prerelease>[0-9A-Za-z.-]+))?(?:\+(?P<build>[0-9A-Za-z.-]+))?$"
)


def _wild(part: str | None) -> bool:
    return part is None or part in ("x", "X", "*")


def _parse_partial(text: str):
    """Split a possibly-partial version into (major, minor, patch, pre, build)
    where wildcard positions are None."""
    m = _PARTIAL_RE.match(text)
    if not m:
        raise VersionParseError(f"not a version or wildcard pattern: {text!r}")
    major = None if _wild(m.group("major")) else int(m.group("major"))
    minor = None if _wild(m.group("minor")) else int(m.group("minor"))
    patch = None if _wild(m.group("patch")) else int(m.group("patch"))
    if major is None and (minor is not None or patch is not None):
        raise VersionParseError(f"wildcard major with concrete tail: {text!r}")
    if minor is None and patch is not None:
        raise VersionParseError(f"wildcard minor with concrete patch: {text!r}")
    pre = tuple(m.group("prerelease").split(".")) if m.group("prerelease") else ()
    if pre and (major is None or minor is None or patch is None):
        raise VersionParseError(f"prerelease tag on a partial version: {text!r}")
    build = tuple(m.group("build").split(".")) if m.group("build") else ()
    return major, minor, patch, pre, build


def _lower(major, minor, patch, pre, build) -> Version:
    return Version(major or 0, minor or 0, patch or 0, pre, build)


def _desugar(token: str) -> list[_Comparator]:
    """Expand one range token into primitive comparators."""
    if token in ("*", "x", "X", ""):
        return [_Comparator(">=", Version(0, 0, 0))]

    op = ""
    body = token
    for candidate in (">=", "<=", ">", "<", "=", "^", "~"):
        if token.startswith(candidate):
            op, body = candidate, token[len(candidate):]
            break
    body = body.strip()
    major, minor, patch, pre, build = _parse_partial(body)

    if op in (">=", "<=", ">", "<", "="):
        if major is None:
            return [_Comparator(">=", Version(0, 0, 0))]
        low = _lower(major, minor, patch, pre, build)
        if minor is not None and patch is not None:
            return [_Comparator(op or "=", low)]
        # partial version after a comparator: treat like npm x-ranges
        span = (
            Version(major + 1, 0, 0) if minor is None else Version(major, minor + 1, 0)
        )
        if op == "=" or op == "":
            return [_Comparator(">=", low), _Comparator("<", span)]
        if op == ">":
            return [_Comparator(">=", span)]
        if op == ">=":
            return [_Comparator(">=", low)]
        if op == "<":
            return [_Comparator("<", low)]
        return [_Comparator("<", span)]  # <=1.2 means <1.3.0

    if op == "^":
        if major is None:
            return [_Comparator(">=", Version(0, 0, 0))]
        low = _lower(major, minor, patch, pre, build)
        if major > 0:
            high = Version(major + 1, 0, 0)
        elif minor is None:
            high = Version(1, 0, 0)
        elif minor > 0 or patch is None:
            high = Version(0, minor + 1, 0)
        else:
            high = Version(0, minor, patch + 1)
        return [_Comparator(">=", low), _Comparator("<", high)]

    if op == "~":
        if major is None:
            return [_Comparator(">=", Version(0, 0, 0))]
        low = _lower(major, minor, patch, pre, build)
        high = Version(major + 1, 0, 0) if minor is None else Version(major, minor + 1, 0)
        return [_Comparator(">=", low), _Comparator("<", high)]

    # bare version, possibly partial
    if minor is None or patch is None:
        low = _lower(major, minor, patch, pre, build)
        span = Version(major + 1, 0, 0) if minor is None else Version(major, minor + 1, 0)
        return [_Comparator(">=", low), _Comparator("<", span)]
    return [_Comparator("=", Version(major, minor, patch, pre, build))]


def _desugar_hyphen(left: str, right: str) -> list[_Comparator]:
    lo_major, lo_minor, lo_patch, lo_pre, lo_build = _parse_partial(left)
    comps = [_Comparator(">=", _lower(lo_major, lo_minor, lo_patch, lo_pre, lo_build))]
    hi_major, hi_minor, hi_patch, hi_pre, hi_build = _parse_partial(right)
    if hi_major is None:
        return comps
    if hi_minor is None:
        comps.append(_Comparator("<", Version(hi_major + 1, 0, 0)))
    elif hi_patch is None:
        comps.append(_Comparator("<", Version(hi_major, hi_minor + 1, 0)))
    else:
        comps.append(_Comparator("<=", Version(hi_major, hi_minor, hi_patch, hi_pre, hi_build)))
    return comps


_HYPHEN_RE = re.compile(r"\s+-\s+")


@dataclass(frozen=True)
class VersionRange:
    """A parsed range: a disjunction of comparator conjunctions.

    ``raw`` preserves the text as written; equality and the canonical
    string are defined over the desugared comparator structure, so
    ``parse(str(parse(s)))`` round-trips to an equal value.
    """

    clauses: tuple[tuple[_Comparator, ...], ...]
    raw: str = ""

    @classmethod
    def pin(cls, label: str) -> "VersionRange":
        """Exact requirement for one release label, semver or not.

        Non-semver labels produce a range with no comparator clauses; such
        pins match nothing through the grammar and are resolved by literal
        label lookup instead (see the resolver).
        """
        try:
            exact = parse_version(label)
        except VersionParseError:
            return cls(clauses=(), raw=label)
        return cls(clauses=((_Comparator("=", exact),),), raw=label)

    @classmethod
    def parse(cls, text: str) -> "VersionRange":
        if not isinstance(text, str):
            raise VersionParseError(f"range must be a string, got {type(text).__name__}")
        raw = text
        clauses = []
        for clause_text in text.split("||"):
            clause_text = clause_text.strip()
            comps: list[_Comparator] = []
            parts = _HYPHEN_RE.split(clause_text)
            if len(parts) == 2:
                comps.extend(_desugar_hyphen(parts[0].strip(), parts[1].strip()))
            elif len(parts) > 2:
                raise VersionParseError(f"malformed hyphen range: {clause_text!r}")
            else:
                # "> 1.2.3" and ">1.2.3" are the same comparator
                clause_text = re.sub(r"([><=^~]+)\s+", r"\1", clause_text)
                if not clause_text:
                    comps.extend(_desugar("*"))
                else:
                    for token in clause_text.split():
                        comps.extend(_desugar(token))
            clauses.append(tuple(comps))
        if not clauses:
            clauses = [tuple(_desugar("*"))]
        return cls(clauses=tuple(clauses), raw=raw)

    def matches(self, version: Version) -> bool:
        """Pure predicate: does ``version`` satisfy this range?"""
        for clause in self.clauses:
            if all(c.satisfied_by(version) for c in clause):
                if not version.prerelease:
                    return True
                if any(
                    c.version.triple == version.triple and c.version.prerelease
                    for c in clause
                ):
                    return True
        return False

    def __str__(self) -> str:
        if not self.clauses:
            return self.raw
        return " || ".join(" ".join(str(c) for c in clause) for clause in self.clauses)

    def _key(self):
        return (self.clauses, None if self.clauses else self.raw)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VersionRange):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def resolve_version_range(
    rng: VersionRange | str, available: list[Version | str]
) -> Version:
    """Pick the greatest available version satisfying ``rng``.

    Release labels that are not semantic versions are skipped with a
    :class:`NonSemverRelease` warning rather than failing the whole
    resolution. Raises :class:`NoMatchingVersion` when nothing satisfies.
    """
    if isinstance(rng, str):
        rng = VersionRange.parse(rng)
    candidates: list[Version] = []
    for item in available:
        if isinstance(item, Version):
            candidates.append(item)
            continue
        try:
            candidates.append(parse_version(item))
        except VersionParseError:
            warnings.warn(f"skipping non-semver release {item!r}", NonSemverRelease)
    matching = [v for v in candidates if rng.matches(v)]
    if not matching:
        raise NoMatchingVersion(f"no version in {len(available)} candidates satisfies {rng}")
    return max(matching)
