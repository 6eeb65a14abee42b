"""The seven sustainability smells: identities, attribute vectors, categories.

Each smell is characterized by four boolean attributes describing when its
remediation applies:

* runtime dependency -- judging the smell needs live workload data
* resource context   -- judging it needs knowledge of the deployed resources
* code dependency    -- judging it needs the application code on top
* inherent badness   -- bad regardless of context

Two smells count as similar (score 1) exactly when all four attributes
match; otherwise the score is 0. The resulting 7x7 binary similarity matrix
drives the category clustering.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

CATALOG_VERSION = "1.0"


class SmellId(enum.IntEnum):
    SS1 = 1
    SS2 = 2
    SS3 = 3
    SS4 = 4
    SS5 = 5
    SS6 = 6
    SS7 = 7

    def __str__(self) -> str:  # pragma: no cover - trivial
        return self.name


@dataclass(frozen=True)
class AttributeVector:
    runtime_dependency: bool
    resource_context: bool
    code_dependency: bool
    inherent_badness: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (
            self.runtime_dependency,
            self.resource_context,
            self.code_dependency,
            self.inherent_badness,
        )


@dataclass(frozen=True)
class SmellDescriptor:
    id: SmellId | str
    name: str
    category: int  # 1 = General, 2 = Demand, 3 = Application
    attributes: AttributeVector
    summary: str
    remediation: str


@dataclass(frozen=True)
class SimilarityMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        for row in self.entries:
            if len(row) != n:
                raise ValueError("similarity matrix must be square")
        for i in range(n):
            if self.entries[i][i] != 1:
                raise ValueError("similarity matrix diagonal must be 1")
            for j in range(n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("similarity matrix must be symmetric")

    def __getitem__(self, pos: tuple[int, int]) -> int:
        return self.entries[pos[0]][pos[1]]


_CATALOG: tuple[SmellDescriptor, ...] = (
    SmellDescriptor(
        SmellId.SS1,
        "Over-Provisioning Resources",
        2,
        AttributeVector(True, True, False, False),
        "Compute resources are sized far beyond what the workload needs, "
        "wasting allocated capacity.",
        "Review utilization regularly and right-size instances to the "
        "workload's actual demand.",
    ),
    SmellDescriptor(
        SmellId.SS2,
        "Lack of Auto-Scaling",
        2,
        AttributeVector(True, True, False, False),
        "Instance counts are fixed at deploy time, so capacity cannot "
        "follow workload fluctuations.",
        "Configure auto-scaling policies so capacity tracks demand instead "
        "of a fixed instance count.",
    ),
    SmellDescriptor(
        SmellId.SS3,
        "Ignoring Resource Lifecycles",
        1,
        AttributeVector(False, False, False, True),
        "Stateful resources carry no lifecycle rules, so changes destroy "
        "and recreate them wastefully.",
        "Declare lifecycle rules such as create_before_destroy or "
        "prevent_destroy on resources that are costly to recreate.",
    ),
    SmellDescriptor(
        SmellId.SS4,
        "Excessive Logging",
        1,
        AttributeVector(False, False, False, True),
        "Logs are retained far longer than needed, inflating storage and "
        "processing overhead.",
        "Set retention policies that keep only the log data the workload "
        "actually requires.",
    ),
    SmellDescriptor(
        SmellId.SS5,
        "Unoptimized Data Transfers",
        3,
        AttributeVector(False, False, True, False),
        "Resources that exchange data sit in different regions, paying "
        "cost and energy for every transfer.",
        "Co-locate resources that communicate frequently within a single "
        "region.",
    ),
    SmellDescriptor(
        SmellId.SS6,
        "State Management",
        1,
        AttributeVector(False, False, False, True),
        "Terraform state lives on local disk instead of a shared remote "
        "backend.",
        "Store state in a remote backend so runs stay consistent and "
        "centrally managed.",
    ),
    SmellDescriptor(
        SmellId.SS7,
        "Monolithic Infrastructure",
        1,
        AttributeVector(False, False, False, True),
        "A single file manages a large number of resources, hurting "
        "modularity and reuse.",
        "Split large configurations into smaller modules with focused "
        "responsibilities.",
    ),
)


def catalog() -> list[SmellDescriptor]:
    """The built-in smell catalog, ordered SS1..SS7."""
    return list(_CATALOG)


def descriptor(smell: SmellId) -> SmellDescriptor:
    return _CATALOG[int(smell) - 1]


def similarity(a: AttributeVector, b: AttributeVector) -> int:
    """1 when all four attributes match, else 0."""
    return 1 if a.as_tuple() == b.as_tuple() else 0


def similarity_matrix(descriptors: list[SmellDescriptor]) -> SimilarityMatrix:
    return SimilarityMatrix(
        tuple(
            tuple(similarity(a.attributes, b.attributes) for b in descriptors)
            for a in descriptors
        )
    )


# ---------------------------------------------------------------------------
# External catalog files
# ---------------------------------------------------------------------------


class CatalogError(ValueError):
    """Raised when an external catalog file is malformed."""


def load_catalog(path: str | Path) -> list[SmellDescriptor]:
    """Load a catalog from JSON.

    The document is a list of objects with fields ``id``, ``name``,
    ``attributes`` (four booleans), ``summary``, and ``remediation``.
    Categories are not stored; they are derived by grouping equal attribute
    vectors, anchored to the built-in numbering where the canonical ids are
    present.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list) or not raw:
        raise CatalogError("catalog must be a non-empty JSON list")
    parsed: list[dict] = []
    seen_ids: set[str] = set()
    for idx, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise CatalogError(f"catalog entry {idx} is not an object")
        missing = {"id", "name", "attributes", "summary", "remediation"} - set(entry)
        if missing:
            raise CatalogError(
                f"catalog entry {idx} missing field(s): {', '.join(sorted(missing))}"
            )
        unknown = set(entry) - {"id", "name", "attributes", "summary", "remediation"}
        if unknown:
            raise CatalogError(
                f"catalog entry {idx} has unknown field(s): {', '.join(sorted(unknown))}"
            )
        attrs = entry["attributes"]
        if not (
            isinstance(attrs, list)
            and len(attrs) == 4
            and all(isinstance(v, bool) for v in attrs)
        ):
            raise CatalogError(
                f"catalog entry {entry['id']!r}: attributes must be 4 booleans"
            )
        if entry["id"] in seen_ids:
            raise CatalogError(f"duplicate smell id {entry['id']!r}")
        seen_ids.add(entry["id"])
        parsed.append(entry)

    vectors = [AttributeVector(*e["attributes"]) for e in parsed]
    ids = [_coerce_id(e["id"]) for e in parsed]
    categories = assign_categories(ids, vectors)
    return [
        SmellDescriptor(
            ids[i],
            parsed[i]["name"],
            categories[i],
            vectors[i],
            parsed[i]["summary"],
            parsed[i]["remediation"],
        )
        for i in range(len(parsed))
    ]


def dump_catalog(descriptors: list[SmellDescriptor]) -> str:
    """Serialize descriptors to the documented catalog JSON schema."""
    return json.dumps(
        [
            {
                "id": str(d.id),
                "name": d.name,
                "attributes": list(d.attributes.as_tuple()),
                "summary": d.summary,
                "remediation": d.remediation,
            }
            for d in descriptors
        ],
        indent=2,
    )


def _coerce_id(raw: str) -> SmellId | str:
    try:
        return SmellId[raw]
    except KeyError:
        return raw


def assign_categories(
    ids: list[SmellId | str], vectors: list[AttributeVector]
) -> list[int]:
    """Category per smell: equal vectors share a category.

    Groups are numbered with the canonical anchors (the group holding SS3 is
    1, SS1 is 2, SS5 is 3; leftovers follow by first appearance), then
    compressed so labels run contiguously from 1.
    """
    groups: dict[tuple[bool, ...], list[int]] = {}
    for i, vec in enumerate(vectors):
        groups.setdefault(vec.as_tuple(), []).append(i)

    provisional: dict[tuple[bool, ...], int] = {}
    next_extra = 4
    for key, members in sorted(groups.items(), key=lambda kv: kv[1][0]):
        names = {str(ids[i]) for i in members}
        if "SS3" in names:
            provisional[key] = 1
        elif "SS1" in names:
            provisional[key] = 2
        elif "SS5" in names:
            provisional[key] = 3
        else:
            provisional[key] = next_extra
            next_extra += 1

    relabel = {old: new for new, old in enumerate(sorted(set(provisional.values())), 1)}
    return [relabel[provisional[vec.as_tuple()]] for vec in vectors]
