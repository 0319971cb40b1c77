"""Repository: a directory of XML documents plus cross-document validation.

Layout on disk:

    <root>/competences/*.xml   one <competence> per file
    <root>/banks/*.xml         one <itemBank> per file
    <root>/learners/*.xml      one <learner> per file

Single-document invariants are enforced at parse time; this module
checks what only the whole collection can know: identifier uniqueness,
reference resolution, prerequisite cycles, and whether each competence
has enough linked questions to build its test.  Validation never
raises on parseable input, it reports.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .model import CompetenceDefinition, ItemDefinition, LearnerProfile
from .xml_io import parse_competence, parse_item_bank, parse_profile, serialize_profile

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: str
    code: str
    message: str
    subjects: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def add(self, severity: str, code: str, message: str, *subjects: str) -> None:
        self.findings.append(Finding(severity, code, message, tuple(subjects)))

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == WARNING]

    def is_empty(self) -> bool:
        return not self.findings

    def has_errors(self) -> bool:
        return bool(self.errors)

    def render(self) -> str:
        if self.is_empty():
            return "repository valid: no findings\n"
        lines = []
        for f in self.findings:
            lines.append(f"{f.severity.upper()} [{f.code}] {f.message}")
        return "\n".join(lines) + "\n"


def _prerequisite_cycles(competences: dict[str, CompetenceDefinition]) -> list[list[str]]:
    """All elementary cycles in the prerequisite graph (self-loops included)."""
    cycles = []
    visiting: dict[str, int] = {}
    done: set[str] = set()

    def visit(node: str, stack: list[str]) -> None:
        if node in done or node not in competences:
            return
        if node in visiting:
            cycles.append(stack[visiting[node]:] + [node])
            return
        visiting[node] = len(stack)
        stack.append(node)
        for dep in competences[node].prerequisites:
            visit(dep, stack)
        stack.pop()
        del visiting[node]
        done.add(node)

    for comp_id in sorted(competences):
        visit(comp_id, [])
    return cycles


def validate_repository(
    competences: dict[str, CompetenceDefinition],
    items: list[ItemDefinition],
    profiles: dict[str, LearnerProfile],
) -> ValidationReport:
    """Cross-document validation; returns findings instead of raising."""
    report = ValidationReport()

    item_ids: set[str] = set()
    for item in items:
        if item.id in item_ids:
            report.add(ERROR, "duplicate-id", f"duplicate item identifier {item.id}", item.id)
        item_ids.add(item.id)

    for comp in competences.values():
        for ref in comp.prerequisites:
            if ref not in competences:
                report.add(
                    ERROR,
                    "unresolved-reference",
                    f"competence {comp.id}: prerequisite {ref!r} does not resolve",
                    comp.id,
                    ref,
                )

    for cycle in _prerequisite_cycles(competences):
        report.add(
            ERROR,
            "prerequisite-cycle",
            "prerequisite cycle: " + " -> ".join(cycle),
            *cycle[:-1],
        )

    items_per_competence: dict[str, int] = {}
    items_per_element: dict[tuple[str, str], int] = {}
    for item in items:
        if item.competence_ref not in competences:
            report.add(
                ERROR,
                "unresolved-reference",
                f"item {item.id}: competence {item.competence_ref!r} does not resolve",
                item.id,
                item.competence_ref,
            )
            continue
        comp = competences[item.competence_ref]
        if item.element_ref not in comp.element_ids():
            report.add(
                ERROR,
                "unresolved-reference",
                f"item {item.id}: element {item.element_ref!r} not in competence {comp.id}",
                item.id,
                item.element_ref,
            )
            continue
        items_per_competence[comp.id] = items_per_competence.get(comp.id, 0) + 1
        key = (comp.id, item.element_ref)
        items_per_element[key] = items_per_element.get(key, 0) + 1

    for comp in competences.values():
        linked = items_per_competence.get(comp.id, 0)
        if linked < comp.required_questions:
            report.add(
                ERROR,
                "insufficient-items",
                f"competence {comp.id}: {linked} linked items, needs {comp.required_questions}",
                comp.id,
            )
        for element in comp.elements:
            if items_per_element.get((comp.id, element.id), 0) == 0:
                report.add(
                    WARNING,
                    "element-without-items",
                    f"competence {comp.id}: element {element.id} has no linked items",
                    comp.id,
                    element.id,
                )

    for profile in profiles.values():
        for record in profile.records:
            if record.competence_ref not in competences:
                report.add(
                    ERROR,
                    "unresolved-reference",
                    f"learner {profile.id}: record references unknown competence "
                    f"{record.competence_ref!r}",
                    profile.id,
                    record.competence_ref,
                )

    return report


@dataclass
class Repository:
    """In-memory collection backed by an XML directory."""

    root: Path | None = None
    competences: dict[str, CompetenceDefinition] = field(default_factory=dict)
    items: list[ItemDefinition] = field(default_factory=list)
    profiles: dict[str, LearnerProfile] = field(default_factory=dict)

    @classmethod
    def load(cls, root: str | os.PathLike) -> "Repository":
        """Read every document under a repository directory.

        Raises FileNotFoundError when the directory is missing and the
        xml_io errors when a document is malformed or invalid; use
        validate() afterwards for cross-document findings.
        """
        root = Path(root)
        if not root.is_dir():
            raise FileNotFoundError(f"repository directory not found: {root}")
        repo = cls(root=root)
        for path in sorted((root / "competences").glob("*.xml")):
            comp = parse_competence(path.read_text(encoding="utf-8"))
            if comp.id in repo.competences:
                raise ValueError(f"{path}: duplicate competence identifier {comp.id}")
            repo.competences[comp.id] = comp
        for path in sorted((root / "banks").glob("*.xml")):
            repo.items.extend(parse_item_bank(path.read_text(encoding="utf-8")))
        for path in sorted((root / "learners").glob("*.xml")):
            profile = parse_profile(path.read_text(encoding="utf-8"))
            if profile.id in repo.profiles:
                raise ValueError(f"{path}: duplicate learner identifier {profile.id}")
            repo.profiles[profile.id] = profile
        return repo

    def validate(self) -> ValidationReport:
        return validate_repository(self.competences, self.items, self.profiles)

    def items_for(self, competence_id: str) -> list[ItemDefinition]:
        return [item for item in self.items if item.competence_ref == competence_id]

    def item_by_id(self, item_id: str) -> ItemDefinition | None:
        for item in self.items:
            if item.id == item_id:
                return item
        return None

    def save_profile(self, profile: LearnerProfile) -> Path:
        """Write one learner file atomically (write-then-replace)."""
        if self.root is None:
            raise ValueError("repository has no backing directory")
        directory = self.root / "learners"
        directory.mkdir(parents=True, exist_ok=True)
        target = directory / f"{profile.id}.xml"
        fd, tmp_name = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(serialize_profile(profile))
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        return target
