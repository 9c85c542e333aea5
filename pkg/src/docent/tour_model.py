"""Domain types for exhibits, actions, and compiled tour plans, plus plan and
world file I/O, validation, and the pre-run sanity-check/repair pass.

Plan and world files are JSON with a fixed field order so that
``save(load(p))`` is byte-identical for canonically formatted files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    PlanParseError,
    PlanValidationError,
    UnrepairableExhibitError,
    WorldFileError,
)

ACTION_KINDS = ("PlayAudio", "BlinkEye", "TrackVisitor", "LookAtExhibit", "PointLaser")
SENTENCE_TYPES = ("arrival", "narration", "departure")

# Canonical serialization order for the action set of an element.
_KIND_ORDER = {k: i for i, k in enumerate(("PlayAudio", "TrackVisitor", "LookAtExhibit", "PointLaser", "BlinkEye"))}


@dataclass(frozen=True)
class LabelBox:
    """Wall-plane rectangle of an exhibit's descriptive label (u along the
    wall, v up; meters)."""

    u: float
    v: float
    width: float
    height: float


@dataclass(frozen=True)
class Exhibit:
    id: str
    center: tuple[float, float, float]
    width: float
    height: float
    normal: tuple[float, float, float]
    nav_point: tuple[float, float, float]  # x, y, heading
    label_box: LabelBox | None = None

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class ActionSpec:
    kind: str
    params: tuple[tuple[str, object], ...] = ()

    def param(self, name: str, default=None):
        for k, v in self.params:
            if k == name:
                return v
        return default

    @property
    def exhibit_id(self) -> str | None:
        return self.param("exhibit_id")


def play_audio(text: str, duration_s: float) -> ActionSpec:
    return ActionSpec("PlayAudio", (("text", text), ("duration_s", float(duration_s))))


def blink_eye() -> ActionSpec:
    return ActionSpec("BlinkEye")


def track_visitor() -> ActionSpec:
    return ActionSpec("TrackVisitor")


def look_at_exhibit(exhibit_id: str, relocalize: bool = False) -> ActionSpec:
    return ActionSpec("LookAtExhibit", (("exhibit_id", exhibit_id), ("relocalize", bool(relocalize))))


def point_laser(exhibit_id: str, revolutions: int = 3) -> ActionSpec:
    return ActionSpec("PointLaser", (("exhibit_id", exhibit_id), ("revolutions", int(revolutions))))


@dataclass(frozen=True)
class SentenceElement:
    index: int
    text: str
    sentence_type: str
    nav_point_id: str
    exhibit_id: str | None
    actions: tuple[ActionSpec, ...]

    def actions_of(self, kind: str) -> tuple[ActionSpec, ...]:
        return tuple(a for a in self.actions if a.kind == kind)

    def has(self, kind: str) -> bool:
        return any(a.kind == kind for a in self.actions)


@dataclass(frozen=True)
class TourPlan:
    tour_id: str
    exhibits_ref: str
    elements: tuple[SentenceElement, ...]


# ---------------------------------------------------------------------------
# Validation


def validate_plan(plan: TourPlan) -> list[str]:
    """Collect every invariant violation; empty list means the plan is valid."""
    offenses: list[str] = []
    last_index = None
    for el in plan.elements:
        where = f"element {el.index}"
        if last_index is not None and el.index <= last_index:
            offenses.append(f"{where}: indices must be strictly increasing")
        last_index = el.index
        if el.sentence_type not in SENTENCE_TYPES:
            offenses.append(f"{where}: unknown sentence_type {el.sentence_type!r}")
        if not el.nav_point_id:
            offenses.append(f"{where}: missing nav_point")
        audio = el.actions_of("PlayAudio")
        if len(audio) != 1:
            offenses.append(f"{where}: needs exactly one PlayAudio, found {len(audio)}")
        if el.has("TrackVisitor") and el.has("LookAtExhibit"):
            offenses.append(f"{where}: head contention (TrackVisitor with LookAtExhibit)")
        if el.has("PointLaser") and not el.exhibit_id:
            offenses.append(f"{where}: PointLaser requires the element to name an exhibit")
        for a in el.actions:
            offenses.extend(f"{where}: {msg}" for msg in _action_offenses(a))
    return offenses


def _action_offenses(a: ActionSpec) -> list[str]:
    out: list[str] = []
    if a.kind not in ACTION_KINDS:
        out.append(f"unknown action kind {a.kind!r}")
        return out
    if a.kind == "PlayAudio":
        dur = a.param("duration_s")
        if not isinstance(dur, (int, float)) or dur <= 0:
            out.append("PlayAudio duration_s must be > 0")
        if a.param("text") is None:
            out.append("PlayAudio missing text")
    elif a.kind in ("LookAtExhibit", "PointLaser"):
        if not a.exhibit_id:
            out.append(f"{a.kind} missing exhibit_id")
        if a.kind == "PointLaser":
            k = a.param("revolutions")
            if not isinstance(k, int) or k < 1:
                out.append("PointLaser revolutions must be an integer >= 1")
    return out


def check_plan(plan: TourPlan) -> TourPlan:
    offenses = validate_plan(plan)
    if offenses:
        raise PlanValidationError(offenses)
    return plan


def resolve_against_world(plan: TourPlan, exhibits: dict[str, Exhibit]) -> list[str]:
    """References (exhibit ids, nav point ids) that do not resolve."""
    offenses = []
    for el in plan.elements:
        if el.nav_point_id not in exhibits:
            offenses.append(f"element {el.index}: unknown nav_point {el.nav_point_id!r}")
        ids = {el.exhibit_id} if el.exhibit_id else set()
        ids.update(a.exhibit_id for a in el.actions if a.exhibit_id)
        for ex in sorted(i for i in ids if i):
            if ex not in exhibits:
                offenses.append(f"element {el.index}: unknown exhibit {ex!r}")
    return offenses


# ---------------------------------------------------------------------------
# Plan file I/O


def _action_to_dict(a: ActionSpec) -> dict:
    return {"kind": a.kind, "params": {k: v for k, v in a.params}}


def _action_from_dict(data: dict, where: str) -> ActionSpec:
    try:
        kind = data["kind"]
        params = data.get("params", {})
    except (TypeError, KeyError) as exc:
        raise PlanParseError(f"{where}: malformed action entry: {exc}") from exc
    if not isinstance(params, dict):
        raise PlanParseError(f"{where}: action params must be an object")
    if kind == "PlayAudio":
        return play_audio(params.get("text", ""), float(params.get("duration_s", 0.0)))
    if kind == "LookAtExhibit":
        return look_at_exhibit(params.get("exhibit_id", ""), bool(params.get("relocalize", False)))
    if kind == "PointLaser":
        return point_laser(params.get("exhibit_id", ""), int(params.get("revolutions", 0)))
    return ActionSpec(kind, tuple(sorted(params.items())))


def sorted_actions(actions) -> tuple[ActionSpec, ...]:
    return tuple(sorted(actions, key=lambda a: (_KIND_ORDER.get(a.kind, 99), a.exhibit_id or "", a.params)))


def plan_to_dict(plan: TourPlan) -> dict:
    return {
        "tour_id": plan.tour_id,
        "exhibits_ref": plan.exhibits_ref,
        "elements": [
            {
                "index": el.index,
                "text": el.text,
                "sentence_type": el.sentence_type,
                "nav_point": el.nav_point_id,
                "exhibit": el.exhibit_id,
                "actions": [_action_to_dict(a) for a in sorted_actions(el.actions)],
            }
            for el in plan.elements
        ],
    }


def plan_from_dict(data: dict) -> TourPlan:
    if not isinstance(data, dict):
        raise PlanParseError("plan document must be a JSON object")
    for key in ("tour_id", "elements"):
        if key not in data:
            raise PlanParseError(f"plan document missing field {key!r}")
    elements = []
    for i, entry in enumerate(data["elements"]):
        where = f"element entry {i}"
        if not isinstance(entry, dict):
            raise PlanParseError(f"{where}: must be an object")
        missing = [k for k in ("index", "text", "sentence_type", "nav_point", "actions") if k not in entry]
        if missing:
            raise PlanParseError(f"{where}: missing fields {missing}")
        actions = tuple(_action_from_dict(a, where) for a in entry["actions"])
        elements.append(
            SentenceElement(
                index=int(entry["index"]),
                text=str(entry["text"]),
                sentence_type=str(entry["sentence_type"]),
                nav_point_id=str(entry["nav_point"]),
                exhibit_id=entry.get("exhibit"),
                actions=actions,
            )
        )
    return TourPlan(
        tour_id=str(data["tour_id"]),
        exhibits_ref=str(data.get("exhibits_ref", "")),
        elements=tuple(elements),
    )


def dumps_plan(plan: TourPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2, ensure_ascii=False) + "\n"


def save_plan(plan: TourPlan, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_plan(plan))


def load_plan(path) -> TourPlan:
    """Parse and validate a plan file; all invariant violations are reported
    together, each with its element index."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PlanParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    plan = plan_from_dict(data)
    return check_plan(plan)


# ---------------------------------------------------------------------------
# World file I/O


def exhibit_to_dict(ex: Exhibit) -> dict:
    label = None
    if ex.label_box is not None:
        label = {
            "u": ex.label_box.u,
            "v": ex.label_box.v,
            "width": ex.label_box.width,
            "height": ex.label_box.height,
        }
    return {
        "id": ex.id,
        "center": list(ex.center),
        "width": ex.width,
        "height": ex.height,
        "normal": list(ex.normal),
        "nav_point": {"x": ex.nav_point[0], "y": ex.nav_point[1], "heading": ex.nav_point[2]},
        "label_box": label,
    }


def exhibit_from_dict(data: dict) -> Exhibit:
    try:
        label = data.get("label_box")
        label_box = None
        if label is not None:
            label_box = LabelBox(
                u=float(label["u"]),
                v=float(label["v"]),
                width=float(label["width"]),
                height=float(label["height"]),
            )
        nav = data["nav_point"]
        return Exhibit(
            id=str(data["id"]),
            center=tuple(float(x) for x in data["center"]),
            width=float(data["width"]),
            height=float(data["height"]),
            normal=tuple(float(x) for x in data["normal"]),
            nav_point=(float(nav["x"]), float(nav["y"]), float(nav["heading"])),
            label_box=label_box,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WorldFileError(f"malformed exhibit entry: {exc}") from exc


def validate_exhibits(exhibits: list[Exhibit]) -> list[str]:
    offenses = []
    seen = set()
    for ex in exhibits:
        if ex.id in seen:
            offenses.append(f"exhibit {ex.id!r}: duplicate id")
        seen.add(ex.id)
        if ex.width <= 0 or ex.height <= 0:
            offenses.append(f"exhibit {ex.id!r}: width and height must be > 0")
        norm = float(np.linalg.norm(np.asarray(ex.normal)))
        if abs(norm - 1.0) > 1e-9:
            offenses.append(f"exhibit {ex.id!r}: normal must be unit length")
    return offenses


def load_world_exhibits(path) -> dict[str, Exhibit]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise WorldFileError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if "exhibits" not in data:
        raise WorldFileError(f"{path}: missing 'exhibits' field")
    exhibits = [exhibit_from_dict(e) for e in data["exhibits"]]
    offenses = validate_exhibits(exhibits)
    if offenses:
        raise WorldFileError(f"{path}: " + "; ".join(offenses))
    return {ex.id: ex for ex in exhibits}


def save_world_exhibits(exhibits: list[Exhibit], path) -> None:
    doc = {"exhibits": [exhibit_to_dict(e) for e in exhibits]}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Sanity check / repair


@dataclass(frozen=True)
class RepairReport:
    insertions: tuple[tuple[int, str], ...] = ()
    parameter_issues: tuple[str, ...] = ()

    @property
    def changed(self) -> bool:
        return bool(self.insertions)


def sanity_check_repair(
    plan: TourPlan,
    known_coords: set[str],
    preannotated: set[str],
) -> tuple[TourPlan, RepairReport]:
    """Ensure deictic pointing can run even when live coordinates are missing.

    For every element whose PointLaser names an exhibit absent from
    ``known_coords`` (the registry of live-localized exhibits), a
    relocalizing LookAtExhibit is ensured in that element so the head turns
    to the pre-annotated coordinate and grounds the exhibit before pointing.
    Exhibits absent from ``preannotated`` as well cannot be repaired.
    Repair only ever adds LookAtExhibit actions; it is idempotent.
    """
    insertions: list[tuple[int, str]] = []
    issues: list[str] = []
    new_elements = []
    for el in plan.elements:
        for a in el.actions:
            issues.extend(f"element {el.index}: {m}" for m in _action_offenses(a))
        missing = [
            a.exhibit_id
            for a in el.actions_of("PointLaser")
            if a.exhibit_id and a.exhibit_id not in known_coords
        ]
        added = el.actions
        for ex_id in missing:
            if ex_id not in preannotated:
                raise UnrepairableExhibitError(
                    f"element {el.index}: exhibit {ex_id!r} has no pre-annotated coordinate"
                )
            already = any(
                a.kind == "LookAtExhibit" and a.exhibit_id == ex_id and a.param("relocalize")
                for a in added
            )
            if not already:
                added = added + (look_at_exhibit(ex_id, relocalize=True),)
                insertions.append((el.index, ex_id))
        if added is not el.actions:
            new_elements.append(replace(el, actions=sorted_actions(added)))
        else:
            new_elements.append(el)
    repaired = replace(plan, elements=tuple(new_elements))
    return repaired, RepairReport(insertions=tuple(insertions), parameter_issues=tuple(issues))
