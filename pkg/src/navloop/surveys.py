"""Data-driven questionnaires administered at session and block boundaries.

Definitions are plain data so new surveys can be added from a file without
touching the engine. The two built-in forms are a 27-item sickness symptom
checklist (rated 0 none to 3 severe, total range 0 to 81) and a 6-item task
load survey on a 7-point scale (total range 6 to 42).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

ADMINISTER_PRE_SESSION = "PreSession"
ADMINISTER_POST_BLOCK = "PostBlock"
ADMINISTER_POST_SESSION = "PostSession"

ADMINISTER_TAGS = (
    ADMINISTER_PRE_SESSION,
    ADMINISTER_POST_BLOCK,
    ADMINISTER_POST_SESSION,
)


@dataclass(frozen=True)
class SurveyItem:
    prompt: str
    scale_min: int = 0
    scale_max: int = 3
    labels: tuple[str, ...] = ()
    free_text: bool = False

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"prompt": self.prompt}
        if self.free_text:
            out["free_text"] = True
        else:
            out["scale_min"] = self.scale_min
            out["scale_max"] = self.scale_max
            if self.labels:
                out["labels"] = list(self.labels)
        return out


@dataclass(frozen=True)
class SurveyDefinition:
    id: str
    title: str
    items: tuple[SurveyItem, ...]
    administer_at: str = ADMINISTER_POST_BLOCK

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError(f"survey '{self.id}' has no items")
        if self.administer_at not in ADMINISTER_TAGS:
            raise ValueError(f"survey '{self.id}': unknown administer_at {self.administer_at!r}")
        for item in self.items:
            if not item.free_text and item.scale_min >= item.scale_max:
                raise ValueError(f"survey '{self.id}': scale min must be below max")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "administer_at": self.administer_at,
            "items": [item.to_dict() for item in self.items],
        }


@dataclass(frozen=True)
class SurveyResponse:
    survey_id: str
    participant_id: str
    boundary: str                     # one of the administer tags
    block_index: int | None           # set for PostBlock boundaries
    answers: tuple[Any, ...]          # ints for scaled items, str for free text
    timestamp: float = 0.0            # session clock seconds

    def to_dict(self) -> dict[str, Any]:
        return {
            "survey_id": self.survey_id,
            "participant_id": self.participant_id,
            "boundary": self.boundary,
            "block_index": self.block_index,
            "answers": list(self.answers),
            "timestamp": self.timestamp,
        }


def survey_item_from_dict(data: dict[str, Any]) -> SurveyItem:
    if data.get("free_text"):
        return SurveyItem(prompt=str(data["prompt"]), free_text=True)
    return SurveyItem(
        prompt=str(data["prompt"]),
        scale_min=int(data.get("scale_min", 0)),
        scale_max=int(data.get("scale_max", 3)),
        labels=tuple(str(s) for s in data.get("labels", ())),
    )


def survey_definition_from_dict(data: dict[str, Any]) -> SurveyDefinition:
    return SurveyDefinition(
        id=str(data["id"]),
        title=str(data["title"]),
        items=tuple(survey_item_from_dict(item) for item in data["items"]),
        administer_at=str(data.get("administer_at", ADMINISTER_POST_BLOCK)),
    )


def survey_response_from_dict(data: dict[str, Any]) -> SurveyResponse:
    answers = tuple(a if isinstance(a, str) else int(a) for a in data["answers"])
    block = data.get("block_index")
    return SurveyResponse(
        survey_id=str(data["survey_id"]),
        participant_id=str(data["participant_id"]),
        boundary=str(data["boundary"]),
        block_index=None if block is None else int(block),
        answers=answers,
        timestamp=float(data.get("timestamp", 0.0)),
    )


def validate_answers(definition: SurveyDefinition, answers: tuple[Any, ...] | list[Any]) -> None:
    """Raise ValueError unless the answers conform to the definition."""
    if len(answers) != len(definition.items):
        raise ValueError(
            f"survey '{definition.id}' expects {len(definition.items)} answers, "
            f"got {len(answers)}"
        )
    for i, (item, answer) in enumerate(zip(definition.items, answers)):
        if item.free_text:
            if not isinstance(answer, str):
                raise ValueError(f"item {i} of '{definition.id}' expects text")
            continue
        if isinstance(answer, bool) or not isinstance(answer, int):
            raise ValueError(f"item {i} of '{definition.id}' expects an integer")
        if not item.scale_min <= answer <= item.scale_max:
            raise ValueError(
                f"item {i} of '{definition.id}' must be in "
                f"[{item.scale_min}, {item.scale_max}], got {answer}"
            )


def total_score(definition: SurveyDefinition, answers: tuple[Any, ...] | list[Any]) -> int:
    """Sum of raw scores over the scaled items; free text does not count."""
    validate_answers(definition, answers)
    return sum(
        answer
        for item, answer in zip(definition.items, answers)
        if not item.free_text
    )


def minimal_answers(definition: SurveyDefinition) -> tuple[Any, ...]:
    """The all-minimum response, used by unattended agent runs."""
    return tuple(
        "" if item.free_text else item.scale_min for item in definition.items
    )


_SICKNESS_SYMPTOMS = (
    "General discomfort",
    "Fatigue",
    "Boredom",
    "Drowsiness",
    "Headache",
    "Eyestrain",
    "Difficulty focusing",
    "Salivation increase/decrease",
    "Sweating",
    "Nausea",
    "Difficulty concentrating",
    "Mental depression",
    "Fullness of the head",
    "Blurred vision",
    "Dizziness with eyes open/closed",
    "Vertigo",
    "Visual flashbacks",
    "Faintness",
    "Breathing awareness",
    "Stomach awareness",
    "Loss of appetite",
    "Increase of appetite",
    "Desire to move bowels",
    "Confusion",
    "Burping",
    "Vomiting",
)

_SEVERITY_LABELS = ("None", "Slight", "Moderate", "Severe")

_TASK_LOAD_PROMPTS = (
    "How mentally demanding was the task?",
    "How physically demanding was the task?",
    "How hurried or rushed was the pace of the task?",
    "How hard did you have to work to accomplish your level of performance?",
    "How successful were you in accomplishing what you were asked to do?",
    "How insecure, discouraged, irritated, stressed, and annoyed were you?",
)


def builtin_surveys() -> list[SurveyDefinition]:
    """The sickness checklist and the task load survey.

    The checklist has 26 named symptoms plus an open "Others" row; the row
    is scored on the same 0 to 3 scale as the rest so the total keeps its
    0 to 81 range over all 27 items.
    """
    sickness_items = tuple(
        SurveyItem(prompt=symptom, scale_min=0, scale_max=3, labels=_SEVERITY_LABELS)
        for symptom in _SICKNESS_SYMPTOMS
    ) + (
        SurveyItem(prompt="Others", scale_min=0, scale_max=3, labels=_SEVERITY_LABELS),
    )
    ssq = SurveyDefinition(
        id="ssq",
        title="Simulator sickness symptom checklist",
        items=sickness_items,
        administer_at=ADMINISTER_POST_SESSION,
    )
    tlx = SurveyDefinition(
        id="nasa-tlx",
        title="Task load survey",
        items=tuple(
            SurveyItem(prompt=prompt, scale_min=1, scale_max=7) for prompt in _TASK_LOAD_PROMPTS
        ),
        administer_at=ADMINISTER_POST_BLOCK,
    )
    return [ssq, tlx]


def builtin_survey_map() -> dict[str, SurveyDefinition]:
    return {defn.id: defn for defn in builtin_surveys()}
