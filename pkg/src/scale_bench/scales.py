"""Category registry and the left-right scale arithmetic.

The registry embeds the full MARPOR-style category scheme: 56 major
categories, dotted subcategories, the 4-digit country-specific codes, and
the residual category "0".  Scoring projects every category onto one of
three classes (left / right / other) and computes

    score = (R - L) / (R + L + O)

over the class counts of a manifesto, yielding a value in [-1, 1].
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError

# --------------------------------------------------------------------------
# Category registry
# --------------------------------------------------------------------------

# (code, name, kind) where kind is one of: residual, major, sub, additional.
# Names follow the codebook's category list; they are informative metadata
# and carry no behaviour.
_CATEGORY_TABLE: tuple[tuple[str, str, str], ...] = (
    ("0", "Residual / uncoded", "residual"),
    # Domain 1: external relations
    ("101", "Foreign Special Relationships: Positive", "major"),
    ("102", "Foreign Special Relationships: Negative", "major"),
    ("103", "Anti-Imperialism", "major"),
    ("104", "Military: Positive", "major"),
    ("105", "Military: Negative", "major"),
    ("106", "Peace", "major"),
    ("107", "Internationalism: Positive", "major"),
    ("108", "European Community/Union: Positive", "major"),
    ("109", "Internationalism: Negative", "major"),
    ("110", "European Community/Union: Negative", "major"),
    ("103.1", "State Centred Anti-Imperialism", "sub"),
    ("103.2", "Foreign Financial Influence", "sub"),
    # Domain 2: freedom and democracy
    ("201", "Freedom and Human Rights", "major"),
    ("202", "Democracy General", "major"),
    ("203", "Constitutionalism: Positive", "major"),
    ("204", "Constitutionalism: Negative", "major"),
    ("201.1", "Freedom", "sub"),
    ("201.2", "Human Rights", "sub"),
    ("202.1", "Democracy General: Positive", "sub"),
    ("202.2", "Democracy General: Negative", "sub"),
    ("202.3", "Representative Democracy: Positive", "sub"),
    ("202.4", "Direct Democracy: Positive", "sub"),
    # Domain 3: political system
    ("301", "Decentralisation", "major"),
    ("302", "Centralisation", "major"),
    ("303", "Governmental and Administrative Efficiency", "major"),
    ("304", "Political Corruption", "major"),
    ("305", "Political Authority", "major"),
    ("305.1", "Political Authority: Party Competence", "sub"),
    ("305.2", "Political Authority: Personal Competence", "sub"),
    ("305.3", "Political Authority: Strong Government", "sub"),
    ("305.4", "Pre-Democratic Elites: Positive", "sub"),
    ("305.5", "Pre-Democratic Elites: Negative", "sub"),
    ("305.6", "Rehabilitation and Compensation", "sub"),
    # Domain 4: economy
    ("401", "Free Market Economy", "major"),
    ("402", "Incentives: Positive", "major"),
    ("403", "Market Regulation", "major"),
    ("404", "Economic Planning", "major"),
    ("405", "Corporatism / Mixed Economy", "major"),
    ("406", "Protectionism: Positive", "major"),
    ("407", "Protectionism: Negative", "major"),
    ("408", "Economic Goals", "major"),
    ("409", "Keynesian Demand Management", "major"),
    ("410", "Economic Growth: Positive", "major"),
    ("411", "Technology and Infrastructure", "major"),
    ("412", "Controlled Economy", "major"),
    ("413", "Nationalisation", "major"),
    ("414", "Economic Orthodoxy", "major"),
    ("415", "Marxist Analysis", "major"),
    ("416", "Anti-Growth Economy: Positive", "major"),
    # 406.1 and 416 share a name in the codebook; both are kept as codes.
    ("406.1", "Anti-Growth Economy: Positive (406 subtype)", "sub"),
    ("416.1", "Anti-Growth Economy: Positive (416 subtype)", "sub"),
    ("416.2", "Sustainability: Positive", "sub"),
    # Domain 5: welfare and quality of life
    ("501", "Environmental Protection", "major"),
    ("502", "Culture: Positive", "major"),
    ("503", "Equality: Positive", "major"),
    ("504", "Welfare State Expansion", "major"),
    ("505", "Welfare State Limitation", "major"),
    ("506", "Education Expansion", "major"),
    ("507", "Education Limitation", "major"),
    # Domain 6: fabric of society
    ("601", "National Way of Life: Positive", "major"),
    ("602", "National Way of Life: Negative", "major"),
    ("603", "Traditional Morality: Positive", "major"),
    ("604", "Traditional Morality: Negative", "major"),
    ("605", "Law and Order", "major"),
    ("606", "Civic Mindedness: Positive", "major"),
    ("607", "Multiculturalism: Positive", "major"),
    ("608", "Multiculturalism: Negative", "major"),
    ("601.1", "National Way of Life General: Positive", "sub"),
    ("601.2", "Immigration: Negative", "sub"),
    ("602.1", "National Way of Life General: Negative", "sub"),
    ("602.2", "Immigration: Positive", "sub"),
    ("605.1", "Law and Order: Positive", "sub"),
    ("605.2", "Law and Order: Negative", "sub"),
    ("606.1", "Civic Mindedness General: Positive", "sub"),
    ("606.2", "Bottom-Up Activism", "sub"),
    ("607.1", "Multiculturalism General: Positive", "sub"),
    ("607.2", "Immigrants: Diversity", "sub"),
    ("607.3", "Indigenous Groups: Positive", "sub"),
    ("608.1", "Multiculturalism General: Negative", "sub"),
    ("608.2", "Immigrants: Assimilation", "sub"),
    ("608.3", "Indigenous Groups: Negative", "sub"),
    # Domain 7: social groups
    ("701", "Labour Groups: Positive", "major"),
    ("702", "Labour Groups: Negative", "major"),
    ("703", "Agriculture and Farmers", "major"),
    ("704", "Middle Class and Professional Groups", "major"),
    ("705", "Underprivileged Minority Groups", "major"),
    ("706", "Non-economic Demographic Groups", "major"),
    ("703.1", "Agriculture and Farmers: Positive", "sub"),
    ("703.2", "Agriculture and Farmers: Negative", "sub"),
    # Country-specific 4-digit codes; the first three digits name the parent
    # major category.
    ("1011", "Russia/USSR/CIS: Positive", "additional"),
    ("1012", "Western States: Positive", "additional"),
    ("1013", "Eastern European Countries: Positive", "additional"),
    ("1014", "Baltic States: Positive", "additional"),
    ("1015", "Nordic Council: Positive", "additional"),
    ("1016", "SFR Yugoslavia: Positive", "additional"),
    ("1021", "Russia/USSR/CIS: Negative", "additional"),
    ("1022", "Western States: Negative", "additional"),
    ("1023", "Eastern European Countries: Negative", "additional"),
    ("1024", "Baltic States: Negative", "additional"),
    ("1025", "Nordic Council: Negative", "additional"),
    ("1026", "SFR Yugoslavia: Negative", "additional"),
    ("1031", "Russian Army: Negative", "additional"),
    ("1032", "Independence: Positive", "additional"),
    ("1033", "Rights of Nations: Positive", "additional"),
    ("2021", "Transition to Democracy", "additional"),
    ("2022", "Restrictive Citizenship: Positive", "additional"),
    ("2023", "Lax Citizenship: Positive", "additional"),
    ("2031", "Presidential Regime: Positive", "additional"),
    ("2032", "Republic: Positive", "additional"),
    ("2033", "Checks and Balances: Positive", "additional"),
    ("2041", "Monarchy: Positive", "additional"),
    ("3011", "Republican Powers: Positive", "additional"),
    ("3051", "Public Situation: Negative", "additional"),
    ("3052", "Communist: Positive", "additional"),
    ("3053", "Communist: Negative", "additional"),
    ("3054", "Rehabilitation and Compensation (system-specific)", "additional"),
    ("3055", "Political Coalitions: Positive", "additional"),
    ("4011", "Privatisation: Positive", "additional"),
    ("4012", "Control of Economy: Negative", "additional"),
    ("4013", "Property Restitution: Positive", "additional"),
    ("4014", "Privatisation Vouchers: Positive", "additional"),
    ("4121", "Social Ownership: Positive", "additional"),
    ("4122", "Mixed Economy: Positive", "additional"),
    ("4123", "Publicly Owned Industry: Positive", "additional"),
    ("4124", "Socialist Property: Positive", "additional"),
    ("4131", "Property Restitution: Negative", "additional"),
    ("4132", "Privatisation: Negative", "additional"),
    ("5021", "Private-Public Mix in Culture", "additional"),
    ("5031", "Private-Public Mix in Social Justice", "additional"),
    ("5041", "Private-Public Mix in Welfare", "additional"),
    ("5061", "Private-Public Mix in Education", "additional"),
    ("6011", "The Karabakh Issue: Positive", "additional"),
    ("6012", "Rebuilding the USSR: Positive", "additional"),
    ("6013", "National Security: Positive", "additional"),
    ("6014", "Cyprus Issue", "additional"),
    ("6061", "General Crisis", "additional"),
    ("6071", "Cultural Autonomy: Positive", "additional"),
    ("6072", "Multiculturalism pro-Roma: Positive", "additional"),
    ("6081", "Multiculturalism anti-Roma: Negative", "additional"),
    ("7051", "Minorities Inland: Positive", "additional"),
    ("7052", "Minorities Abroad: Positive", "additional"),
    ("7061", "War Participants: Positive", "additional"),
    ("7062", "Refugees: Positive", "additional"),
)


@dataclass(frozen=True)
class Category:
    code: str
    name: str
    kind: str  # residual | major | sub | additional


REGISTRY: Mapping[str, Category] = {
    code: Category(code, name, kind) for code, name, kind in _CATEGORY_TABLE
}

MAJOR_CODES: frozenset[str] = frozenset(
    c.code for c in REGISTRY.values() if c.kind == "major"
)


def is_registered(code: str) -> bool:
    return code in REGISTRY


def major_code(code: str) -> str:
    """Roll a category code up to its 3-digit major (identity for "0").

    Dotted subcategories drop the suffix; 4-digit country-specific codes
    drop the last digit.
    """
    if code == "0":
        return "0"
    if "." in code:
        return code.split(".", 1)[0]
    if len(code) == 4:
        return code[:3]
    return code


# --------------------------------------------------------------------------
# The left-right scale
# --------------------------------------------------------------------------


class RileClass(Enum):
    LEFT = "left"
    RIGHT = "right"
    OTHER = "other"


# Display names of the categories that load on each pole, resolved to
# registry codes.  Resolution notes:
#   - Freedom (201.1) and Human Rights (201.2) both roll up to major 201.
#   - "Free Enterprise" is 401 (Free Market Economy), "Economic Incentives"
#     is 402 (Incentives: Positive), "Social Services Limitation" is 505
#     (Welfare State Limitation), "Social Harmony" is 606 (Civic Mindedness:
#     Positive).
#   - "Decolonisation, Anti-Imperialism" is the single code 103 and
#     "Regulate Capitalism, Market" the single code 403 (Market Regulation).
RIGHT_EMPHASIS: Mapping[str, str] = {
    "Military: Positive": "104",
    "Freedom": "201.1",
    "Human Rights": "201.2",
    "Constitutionalism: Positive": "203",
    "Political Authority": "305",
    "Free Enterprise": "401",
    "Economic Incentives": "402",
    "Protectionism: Negative": "407",
    "Economic Orthodoxy": "414",
    "Social Services Limitation": "505",
    "National Way of Life: Positive": "601",
    "Traditional Morality: Positive": "603",
    "Law and Order": "605",
    "Social Harmony": "606",
}

LEFT_EMPHASIS: Mapping[str, str] = {
    "Decolonisation, Anti-Imperialism": "103",
    "Military: Negative": "105",
    "Peace": "106",
    "Internationalism: Positive": "107",
    "Democracy": "202",
    "Regulate Capitalism, Market": "403",
    "Economic Planning": "404",
    "Protectionism: Positive": "406",
    "Controlled Economy": "412",
    "Nationalisation": "413",
    "Social Services: Expansion": "504",
    "Education: Expansion": "506",
    "Labour Groups: Positive": "701",
}


@dataclass(frozen=True)
class Scale:
    """A left/right scale defined by two disjoint sets of major codes."""

    name: str
    right: frozenset[str]
    left: frozenset[str]

    def __post_init__(self) -> None:
        overlap = self.right & self.left
        if overlap:
            raise ValueError(f"scale {self.name!r}: codes on both poles: {sorted(overlap)}")
        unknown = (self.right | self.left) - MAJOR_CODES
        if unknown:
            raise ValueError(f"scale {self.name!r}: unknown major codes: {sorted(unknown)}")

    def classify(self, code: str) -> RileClass:
        major = major_code(code)
        if major in self.right:
            return RileClass.RIGHT
        if major in self.left:
            return RileClass.LEFT
        return RileClass.OTHER


RILE = Scale(
    name="rile",
    right=frozenset(major_code(c) for c in RIGHT_EMPHASIS.values()),
    left=frozenset(major_code(c) for c in LEFT_EMPHASIS.values()),
)


def rile_class(code: str, scale: Scale = RILE) -> RileClass:
    """Class of a category code under the scale, computed on its major."""
    return scale.classify(code)


_CLASS_NAMES = {c.value: c for c in RileClass}


def label_class(label: str, scale: Scale = RILE) -> RileClass:
    """Class of a predicted label: either a class name or a category code."""
    cls = _CLASS_NAMES.get(label.lower())
    if cls is not None:
        return cls
    if not is_registered(label):
        raise DataError(f"label {label!r} is neither a class name nor a registered category code")
    return scale.classify(label)


# --------------------------------------------------------------------------
# Scoring
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RileTally:
    r_count: int
    l_count: int
    o_count: int

    @property
    def total(self) -> int:
        return self.r_count + self.l_count + self.o_count


def tally_classes(classes: Iterable[RileClass]) -> RileTally:
    counts = Counter(classes)
    return RileTally(
        r_count=counts.get(RileClass.RIGHT, 0),
        l_count=counts.get(RileClass.LEFT, 0),
        o_count=counts.get(RileClass.OTHER, 0),
    )


def rile_score(tally: RileTally) -> float:
    """(R - L) / (R + L + O) over class counts; counts and percentages agree."""
    total = tally.total
    if total == 0:
        raise DataError("empty tally: cannot score a manifesto with no statements")
    return (tally.r_count - tally.l_count) / total


def manifesto_rile(manifesto, labels: Mapping[str, str] | None = None,
                   scale: Scale = RILE) -> float:
    """Scale score of a manifesto from gold codes or a statement-id -> label map.

    `labels` may also be any object exposing a `.labels` mapping (e.g. a
    prediction set).  Labels can be class names ("left"/"right"/"other") or
    category codes.  A missing prediction for any statement is an error.
    """
    if labels is None:
        classes = [scale.classify(s.code) for s in manifesto.statements]
    else:
        mapping = getattr(labels, "labels", labels)
        missing = [s.id for s in manifesto.statements if s.id not in mapping]
        if missing:
            raise DataError(
                f"manifesto {manifesto.id!r}: missing predictions for "
                f"{len(missing)} statements (first: {missing[:5]})"
            )
        classes = [label_class(mapping[s.id], scale) for s in manifesto.statements]
    return rile_score(tally_classes(classes))


# --------------------------------------------------------------------------
# Stance bins
# --------------------------------------------------------------------------


class StanceBin(Enum):
    HARD_LEFT = "hard_left"
    CENTRE_LEFT = "centre_left"
    CENTRIST = "centrist"
    CENTRE_RIGHT = "centre_right"
    HARD_RIGHT = "hard_right"

    @property
    def position(self) -> int:
        return _BIN_ORDER.index(self)

    @property
    def centre_distance(self) -> int:
        return abs(self.position - 2)


_BIN_ORDER = (
    StanceBin.HARD_LEFT,
    StanceBin.CENTRE_LEFT,
    StanceBin.CENTRIST,
    StanceBin.CENTRE_RIGHT,
    StanceBin.HARD_RIGHT,
)

# Interior boundaries; each bin is [lower, upper) except the last, which
# includes +1.
BIN_BOUNDARIES = (-0.6, -0.2, 0.2, 0.6)


def stance_bin(score: float) -> StanceBin:
    """Five-way stance bin of a score in [-1, 1]."""
    if not -1.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [-1, 1]")
    for bound, bin_ in zip(BIN_BOUNDARIES, _BIN_ORDER):
        if score < bound:
            return bin_
    return StanceBin.HARD_RIGHT


_BIN_NAMES = {b.value: b for b in StanceBin}


def parse_stance(label: str) -> StanceBin:
    try:
        return _BIN_NAMES[label.lower()]
    except KeyError:
        raise DataError(f"unknown stance label {label!r}") from None


# --------------------------------------------------------------------------
# Registry / scale serialization
# --------------------------------------------------------------------------


def scale_to_dict(scale: Scale = RILE, include_categories: bool = True) -> dict:
    out: dict = {
        "name": scale.name,
        "right": sorted(scale.right),
        "left": sorted(scale.left),
    }
    if include_categories:
        out["categories"] = [
            {"code": c.code, "name": c.name, "kind": c.kind}
            for c in REGISTRY.values()
        ]
    return out


def dump_registry(scale: Scale = RILE) -> str:
    return json.dumps(scale_to_dict(scale), indent=2, ensure_ascii=False)


def load_scale(path: str | Path) -> Scale:
    """Load a custom scale from JSON with keys name/right/left.

    Entries may be any registered codes; they are rolled up to majors.
    Extra keys (e.g. a categories listing) are ignored, so a registry dump
    is itself a loadable scale file.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        name = raw["name"]
        right = raw["right"]
        left = raw["left"]
    except (TypeError, KeyError) as exc:
        raise DataError(f"{path}: scale file must define name/right/left") from exc
    for code in list(right) + list(left):
        if not is_registered(str(code)):
            raise DataError(f"{path}: unknown category code {code!r} in scale definition")
    return Scale(
        name=str(name),
        right=frozenset(major_code(str(c)) for c in right),
        left=frozenset(major_code(str(c)) for c in left),
    )
