"""Compile an annotated tour script plus a world file into a tour plan.

Scripts are plain UTF-8 text. ``@stop <nav_point_id>`` lines separate the
per-stop passages and inline ``[exhibit_id]`` tags mark exhibit mentions.
The deterministic rule backend is the tested reference; the external-model
backend builds a prompt and validates whatever the model returns against the
same plan schema and action-pattern lint.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .config import CompilerConfig
from .errors import BackendError, PatternLintError, ScriptError, UnresolvedReferenceError
from .tour_model import (
    ActionSpec,
    Exhibit,
    SentenceElement,
    TourPlan,
    check_plan,
    look_at_exhibit,
    plan_from_dict,
    play_audio,
    point_laser,
    sorted_actions,
    track_visitor,
)

TAG_RE = re.compile(r"\[([A-Za-z0-9_]+)\]")
_STOP_RE = re.compile(r"^@stop\s+(\S+)\s*$")


@dataclass(frozen=True)
class RawScript:
    tour_id: str
    body: str


@dataclass(frozen=True)
class Passage:
    nav_point_id: str
    text: str


def parse_script(text: str, tour_id: str) -> RawScript:
    if not text.strip():
        raise ScriptError("script body is empty")
    return RawScript(tour_id=tour_id, body=text)


def split_passages(script: RawScript) -> list[Passage]:
    passages: list[Passage] = []
    current_id: str | None = None
    buf: list[str] = []
    for line in script.body.splitlines():
        m = _STOP_RE.match(line.strip())
        if m:
            if current_id is not None:
                passages.append(Passage(current_id, " ".join(buf)))
            current_id = m.group(1)
            buf = []
        else:
            if line.strip() and current_id is None:
                raise ScriptError("script text appears before the first @stop marker")
            buf.append(line.strip())
    if current_id is None:
        raise ScriptError("script has no @stop markers")
    passages.append(Passage(current_id, " ".join(buf)))
    return passages


def segment(body: str) -> list[str]:
    """Split a passage into whitespace-normalized sentences.

    Sentences end at runs of terminal punctuation (. ! ?); a trailing
    fragment without terminal punctuation is kept as its own sentence.
    Inline [tags] are preserved. The word sequence of the output equals the
    word sequence of the input.
    """
    normalized = " ".join(body.split())
    if not normalized:
        raise ScriptError("cannot segment an empty body")
    parts = re.split(r"(?<=[.!?])\s+", normalized)
    return [p.strip() for p in parts if p.strip()]


def detag(text: str) -> str:
    """Spoken form of a sentence: tags become their display names."""
    return TAG_RE.sub(lambda m: m.group(1).replace("_", " "), text)


def display_name(identifier: str) -> str:
    return identifier.replace("_", " ")


def tags_in(text: str) -> list[str]:
    return TAG_RE.findall(text)


def audio_for(text: str, cfg: CompilerConfig) -> ActionSpec:
    spoken = detag(text)
    words = max(len(spoken.split()), 1)
    duration = words / cfg.speaking_rate_wps + cfg.sentence_pause_s
    return play_audio(spoken, duration)


def assign_actions(
    sentence: str,
    sentence_type: str,
    first_mention: str | None,
    cfg: CompilerConfig,
) -> tuple[ActionSpec, ...]:
    """Action set for one sentence.

    Arrival/departure sentences and untagged narration keep the visitor
    engaged with TrackVisitor; the first sentence that mentions an exhibit
    gets the deictic pair (LookAtExhibit + PointLaser) aimed at it.
    ``first_mention`` is the exhibit id when this sentence is the passage's
    first mention of it, else None.
    """
    audio = audio_for(sentence, cfg)
    if sentence_type in ("arrival", "departure"):
        return sorted_actions((audio, track_visitor()))
    if first_mention is not None:
        return sorted_actions(
            (
                audio,
                look_at_exhibit(first_mention),
                point_laser(first_mention, cfg.laser_revolutions),
            )
        )
    return sorted_actions((audio, track_visitor()))


def synthesize_arrival(stop_id: str, cfg: CompilerConfig) -> str:
    return cfg.arrival_template.format(stop=display_name(stop_id))


def synthesize_departure(stop_id: str, cfg: CompilerConfig) -> str:
    return cfg.departure_template.format(stop=display_name(stop_id))


class RuleBackend:
    """Deterministic compiler: a pure function of (script, world, config)."""

    def __init__(self, cfg: CompilerConfig | None = None):
        self.cfg = cfg or CompilerConfig()

    def compile(self, script: RawScript, exhibits: dict[str, Exhibit], exhibits_ref: str = "world.json") -> TourPlan:
        cfg = self.cfg
        passages = split_passages(script)
        for p in passages:
            if p.nav_point_id not in exhibits:
                raise UnresolvedReferenceError(f"unknown nav point {p.nav_point_id!r} in @stop marker")
        elements: list[SentenceElement] = []
        index = 0

        def add(text: str, sentence_type: str, nav: str, exhibit: str | None, actions) -> None:
            nonlocal index
            elements.append(
                SentenceElement(
                    index=index,
                    text=text,
                    sentence_type=sentence_type,
                    nav_point_id=nav,
                    exhibit_id=exhibit,
                    actions=actions,
                )
            )
            index += 1

        for i, passage in enumerate(passages):
            stop = passage.nav_point_id
            arrival = synthesize_arrival(stop, cfg)
            add(arrival, "arrival", stop, None, assign_actions(arrival, "arrival", None, cfg))
            mentioned: set[str] = set()
            current: str | None = None
            for sentence in segment(passage.text):
                tags = tags_in(sentence)
                for tag in tags:
                    if tag not in exhibits:
                        raise UnresolvedReferenceError(f"unknown exhibit tag [{tag}]")
                first = None
                if tags:
                    current = tags[0]
                    if current not in mentioned:
                        mentioned.add(current)
                        first = current
                add(
                    sentence,
                    "narration",
                    stop,
                    current,
                    assign_actions(sentence, "narration", first, cfg),
                )
            if i < len(passages) - 1:
                departure = synthesize_departure(stop, cfg)
                add(departure, "departure", stop, None, assign_actions(departure, "departure", None, cfg))

        plan = TourPlan(tour_id=script.tour_id, exhibits_ref=exhibits_ref, elements=tuple(elements))
        return check_plan(plan)


# ---------------------------------------------------------------------------
# Action-pattern lint


@dataclass(frozen=True)
class LintFinding:
    code: str
    element: int
    message: str

    def __str__(self) -> str:
        return f"element {self.element}: [{self.code}] {self.message}"


def pattern_lint(plan: TourPlan) -> list[LintFinding]:
    """Flag departures from the expected co-speech choreography.

    1. arrival/departure elements must keep TrackVisitor running;
    2. LookAtExhibit may only appear in the first two sentences of an
       exhibit's passage (relocalizing repairs are exempt);
    3. narration must engage via TrackVisitor or LookAtExhibit.
    """
    findings: list[LintFinding] = []
    run_exhibit: str | None = None
    run_pos = 0
    for el in plan.elements:
        if el.sentence_type in ("arrival", "departure"):
            run_exhibit, run_pos = None, 0
            if not el.has("TrackVisitor"):
                findings.append(
                    LintFinding("missing-track", el.index, f"{el.sentence_type} sentence lacks TrackVisitor")
                )
            continue
        if el.exhibit_id != run_exhibit:
            run_exhibit, run_pos = el.exhibit_id, 0
        run_pos += 1
        deliberate_look = any(
            a.kind == "LookAtExhibit" and not a.param("relocalize") for a in el.actions
        )
        if deliberate_look and run_pos > 2:
            findings.append(
                LintFinding(
                    "late-look",
                    el.index,
                    f"LookAtExhibit on sentence {run_pos} of the {run_exhibit!r} passage",
                )
            )
        if not el.has("TrackVisitor") and not el.has("LookAtExhibit"):
            findings.append(
                LintFinding("no-engagement", el.index, "narration has neither TrackVisitor nor LookAtExhibit")
            )
    return findings


# ---------------------------------------------------------------------------
# External model backend (prompt construction + output gating only)

ACTION_CATALOG = {
    "PlayAudio": "Speak the given narration text aloud. Parameters: text, duration_s.",
    "BlinkEye": "Blink the animated eyes spontaneously. No parameters.",
    "TrackVisitor": "Turn the head continuously toward the visitor's face. No parameters.",
    "LookAtExhibit": "Turn the head toward the named exhibit. Parameters: exhibit_id.",
    "PointLaser": "Circle the laser spot on the named exhibit. Parameters: exhibit_id, revolutions.",
}


def build_prompt(script: RawScript, exhibits: dict[str, Exhibit]) -> str:
    lines = [
        "You plan a guided tour for a mobile robot.",
        "Split the raw script into short sentences, keep every word, and attach",
        "a concurrent action set and a navigation point to each sentence.",
        "Return the plan as JSON with fields tour_id, exhibits_ref, elements[].",
        "",
        "Available actions:",
    ]
    for kind, desc in ACTION_CATALOG.items():
        lines.append(f"- {kind}: {desc}")
    lines.append("")
    lines.append("Exhibit locations (id: nav point x, y, heading):")
    for ex in exhibits.values():
        nav = ex.nav_point
        lines.append(f"- {ex.id}: {nav[0]:.2f}, {nav[1]:.2f}, {nav[2]:.2f}")
    lines.append("")
    lines.append("Raw script:")
    lines.append(script.body.strip())
    return "\n".join(lines)


class ExternalModelBackend:
    """Prompt builder plus schema/pattern gate around an external model.

    ``transport`` maps a prompt string to the model's raw JSON reply; the
    network call itself lives outside this package. Output that fails plan
    validation or the pattern lint is rejected.
    """

    def __init__(self, transport=None, cfg: CompilerConfig | None = None):
        self.transport = transport
        self.cfg = cfg or CompilerConfig()

    def compile(self, script: RawScript, exhibits: dict[str, Exhibit], exhibits_ref: str = "world.json") -> TourPlan:
        if self.transport is None:
            raise BackendError("no transport configured for the external model backend")
        prompt = build_prompt(script, exhibits)
        reply = self.transport(prompt)
        try:
            data = json.loads(reply)
        except json.JSONDecodeError as exc:
            raise BackendError(f"model reply is not valid JSON: {exc}") from exc
        plan = check_plan(plan_from_dict(data))
        findings = pattern_lint(plan)
        if findings:
            raise PatternLintError([str(f) for f in findings])
        return plan


def get_backend(name: str, cfg: CompilerConfig | None = None, transport=None):
    if name == "rules":
        return RuleBackend(cfg)
    if name == "external":
        return ExternalModelBackend(transport=transport, cfg=cfg)
    raise BackendError(f"unknown backend {name!r}")
