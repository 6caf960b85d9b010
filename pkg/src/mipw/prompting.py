"""Chat-prompt construction for word-level metaphoricity annotation.

The instruction text and the two worked examples live in an editable text
asset so researchers can swap in their own wording without touching code;
the default asset ships with the package.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

SYSTEM_MESSAGE = "You are a helpful assistant. You have extensive linguistic knowledge."

_SECTIONS = (
    "INSTRUCTION",
    "EXAMPLE_INPUT_1",
    "EXAMPLE_OUTPUT_1",
    "EXAMPLE_INPUT_2",
    "EXAMPLE_OUTPUT_2",
)


class EmptySentenceError(ValueError):
    """The sentence to annotate is empty after trimming."""


class TemplateFormatError(ValueError):
    """A template asset is missing required sections or violates constraints."""


class Role(Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    content: str

    def __post_init__(self) -> None:
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass(frozen=True)
class PromptTemplate:
    instruction: str
    examples: tuple[tuple[str, str], ...]
    version: str

    def __post_init__(self) -> None:
        if len(self.examples) != 2:
            raise TemplateFormatError("template must carry exactly two examples")
        if "words" not in self.instruction:
            raise TemplateFormatError('instruction must speak of "words"')
        if "lexical unit" in self.instruction.lower():
            raise TemplateFormatError('instruction must not mention "lexical units"')


@dataclass(frozen=True)
class PromptInstance:
    messages: tuple[ChatMessage, ...]
    sentence_id: str
    template_digest: str


def parse_template(text: str) -> PromptTemplate:
    """Parse the sectioned template asset format."""
    version = None
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        if line.startswith("VERSION:"):
            version = line[len("VERSION:"):].strip()
            continue
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1]
            sections[current] = []
            continue
        if current is not None:
            sections[current].append(line)
    if version is None:
        raise TemplateFormatError("template asset lacks a VERSION line")
    missing = [s for s in _SECTIONS if s not in sections]
    if missing:
        raise TemplateFormatError(f"template asset missing sections: {missing}")
    get = lambda name: "\n".join(sections[name]).strip()
    return PromptTemplate(
        instruction=get("INSTRUCTION"),
        examples=(
            (get("EXAMPLE_INPUT_1"), get("EXAMPLE_OUTPUT_1")),
            (get("EXAMPLE_INPUT_2"), get("EXAMPLE_OUTPUT_2")),
        ),
        version=version,
    )


def load_template(path: str | Path) -> PromptTemplate:
    return parse_template(Path(path).read_text(encoding="utf-8"))


def default_template() -> PromptTemplate:
    text = resources.files("mipw").joinpath("prompts/default_template.txt").read_text("utf-8")
    return parse_template(text)


def template_digest(template: PromptTemplate) -> str:
    """Stable content hash over instruction, examples, and version."""
    h = hashlib.sha256()
    for part in (
        template.version,
        template.instruction,
        *[s for pair in template.examples for s in pair],
    ):
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def render_user_content(template: PromptTemplate, sentence: str) -> str:
    parts = [template.instruction, ""]
    for i, (example_in, example_out) in enumerate(template.examples, 1):
        parts += [f'Example {i}:', f'"{example_in}"', example_out, ""]
    parts.append(f'"{sentence}"')
    return "\n".join(parts)


def build_messages(
    template: PromptTemplate, sentence: str, sentence_id: str = ""
) -> PromptInstance:
    """System message plus one user message ending with the quoted sentence."""
    sentence = sentence.strip()
    if not sentence:
        raise EmptySentenceError("cannot build a prompt for an empty sentence")
    return PromptInstance(
        messages=(
            ChatMessage(Role.SYSTEM, SYSTEM_MESSAGE),
            ChatMessage(Role.USER, render_user_content(template, sentence)),
        ),
        sentence_id=sentence_id,
        template_digest=template_digest(template),
    )
