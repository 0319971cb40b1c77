"""XML interchange for item banks, competence definitions and learner profiles.

Three small UTF-8 formats with lower-camel element names:

* item bank     -- <itemBank competenceRef="..."> holding <item> entries
                   with body, choices, the correct choice id, 2PL scale
                   attributes a/b and an importance weight;
* competence    -- <competence identifier="..."> with title, description,
                   prerequisite refs, <delivery questions=".." choices="..">
                   and <element> entries carrying knowledge items and a
                   <performance> descriptor;
* profile       -- <learner identifier="..."> with <identification> and
                   one <competencyRecord> per completed placement.

parse(serialize(x)) == x for every valid value: reals are written with
repr (17 significant digits) and timestamps as RFC 3339.  Malformed
documents raise XmlParseError with line information; well-formed
documents that break an invariant raise XmlValidationError naming the
offending identifier and field.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from datetime import datetime

from .kernel import EstimationStatus, ItemParameters
from .model import (
    AbilityVerb,
    Autonomy,
    Choice,
    CompetenceDefinition,
    CompetencyElement,
    CompetencyRecord,
    ElementKind,
    ItemDefinition,
    KnowledgeItem,
    KnowledgeKind,
    LearnerProfile,
    Performance,
    PerformanceContext,
    PerformanceScope,
)


class XmlParseError(ValueError):
    """The document is not well-formed XML."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class XmlValidationError(ValueError):
    """The document is well-formed but violates a model invariant."""


def _parse_root(text: str, expected_tag: str) -> ET.Element:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        line = e.position[0] if e.position else None
        raise XmlParseError(f"malformed XML: {e}", line=line) from e
    if root.tag != expected_tag:
        raise XmlValidationError(f"expected root <{expected_tag}>, got <{root.tag}>")
    return root


def _attr(elem: ET.Element, name: str, context: str) -> str:
    value = elem.get(name)
    if value is None:
        raise XmlValidationError(f"{context}: missing attribute {name!r}")
    return value


def _float_attr(elem: ET.Element, name: str, context: str) -> float:
    raw = _attr(elem, name, context)
    try:
        return float(raw)
    except ValueError:
        raise XmlValidationError(f"{context}: attribute {name!r} is not a number: {raw!r}")


def _int_attr(elem: ET.Element, name: str, context: str) -> int:
    raw = _attr(elem, name, context)
    try:
        return int(raw)
    except ValueError:
        raise XmlValidationError(f"{context}: attribute {name!r} is not an integer: {raw!r}")


def _enum_attr(elem: ET.Element, name: str, enum_cls, context: str):
    raw = _attr(elem, name, context)
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise XmlValidationError(f"{context}: {name}={raw!r} not one of: {allowed}")


def _child_text(elem: ET.Element, tag: str, context: str, required: bool = True) -> str:
    child = elem.find(tag)
    if child is None:
        if required:
            raise XmlValidationError(f"{context}: missing <{tag}>")
        return ""
    return child.text or ""


def _fmt(value: float) -> str:
    return repr(float(value))


def _indent(root: ET.Element) -> str:
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=False)


# ---------------------------------------------------------------------------
# item bank
# ---------------------------------------------------------------------------


def parse_item_bank(text: str) -> list[ItemDefinition]:
    """Parse an <itemBank> document into validated item definitions.

    Document order is preserved.  An empty <itemBank/> yields [].
    """
    root = _parse_root(text, "itemBank")
    item_elems = root.findall("item")
    if not item_elems:
        return []
    competence_ref = _attr(root, "competenceRef", "itemBank")
    items = []
    for elem in item_elems:
        item_id = _attr(elem, "identifier", "item")
        context = f"item {item_id}"
        choices = tuple(
            Choice(id=_attr(c, "identifier", f"{context} choice"), text=c.text or "")
            for c in elem.findall("choice")
        )
        try:
            items.append(
                ItemDefinition(
                    id=item_id,
                    body=_child_text(elem, "body", context),
                    choices=choices,
                    correct_choice=_child_text(elem, "correct", context),
                    scale=ItemParameters(
                        a=_float_attr(elem, "a", context), b=_float_attr(elem, "b", context)
                    ),
                    importance=_float_attr(elem, "importance", context),
                    element_ref=_attr(elem, "elementRef", context),
                    competence_ref=competence_ref,
                )
            )
        except ValueError as e:
            raise XmlValidationError(f"{context}: {e}") from e
    return items


def serialize_item_bank(items: list[ItemDefinition], competence_ref: str | None = None) -> str:
    """Serialize items to an <itemBank> document.

    All items must reference one competence; pass competence_ref
    explicitly only when serializing an empty bank.
    """
    refs = {item.competence_ref for item in items}
    if len(refs) > 1:
        raise ValueError(f"items reference multiple competences: {sorted(refs)}")
    if refs:
        inferred = refs.pop()
        if competence_ref is not None and competence_ref != inferred:
            raise ValueError(f"competence_ref {competence_ref!r} does not match items ({inferred!r})")
        competence_ref = inferred
    root = ET.Element("itemBank")
    if competence_ref is not None:
        root.set("competenceRef", competence_ref)
    for item in items:
        elem = ET.SubElement(
            root,
            "item",
            identifier=item.id,
            a=_fmt(item.scale.a),
            b=_fmt(item.scale.b),
            importance=_fmt(item.importance),
            elementRef=item.element_ref,
        )
        ET.SubElement(elem, "body").text = item.body
        for choice in item.choices:
            ET.SubElement(elem, "choice", identifier=choice.id).text = choice.text
        ET.SubElement(elem, "correct").text = item.correct_choice
    return _indent(root)


# ---------------------------------------------------------------------------
# competence
# ---------------------------------------------------------------------------


def parse_competence(text: str) -> CompetenceDefinition:
    """Parse a <competence> document."""
    root = _parse_root(text, "competence")
    comp_id = _attr(root, "identifier", "competence")
    context = f"competence {comp_id}"
    delivery = root.find("delivery")
    if delivery is None:
        raise XmlValidationError(f"{context}: missing <delivery>")
    elements = []
    for elem in root.findall("element"):
        element_id = _attr(elem, "identifier", f"{context} element")
        e_context = f"{context} element {element_id}"
        knowledge = tuple(
            KnowledgeItem(label=k.text or "", kind=_enum_attr(k, "kind", KnowledgeKind, e_context))
            for k in elem.findall("knowledge")
        )
        perf = elem.find("performance")
        if perf is None:
            raise XmlValidationError(f"{e_context}: missing <performance>")
        try:
            elements.append(
                CompetencyElement(
                    id=element_id,
                    ability=_enum_attr(elem, "ability", AbilityVerb, e_context),
                    kind=_enum_attr(elem, "kind", ElementKind, e_context),
                    knowledge_items=knowledge,
                    performance=Performance(
                        context=_enum_attr(perf, "context", PerformanceContext, e_context),
                        complexity=_int_attr(perf, "complexity", e_context),
                        autonomy=_enum_attr(perf, "autonomy", Autonomy, e_context),
                        scope=_enum_attr(perf, "scope", PerformanceScope, e_context),
                        frequency=_int_attr(perf, "frequency", e_context),
                    ),
                )
            )
        except XmlValidationError:
            raise
        except ValueError as e:
            raise XmlValidationError(f"{e_context}: {e}") from e
    try:
        return CompetenceDefinition(
            id=comp_id,
            title=_child_text(root, "title", context),
            description=_child_text(root, "description", context, required=False),
            prerequisites=tuple(
                _attr(p, "ref", f"{context} prerequisite") for p in root.findall("prerequisite")
            ),
            elements=tuple(elements),
            required_questions=_int_attr(delivery, "questions", context),
            choices_per_question=_int_attr(delivery, "choices", context),
        )
    except XmlValidationError:
        raise
    except ValueError as e:
        raise XmlValidationError(f"{context}: {e}") from e


def serialize_competence(competence: CompetenceDefinition) -> str:
    root = ET.Element("competence", identifier=competence.id)
    ET.SubElement(root, "title").text = competence.title
    ET.SubElement(root, "description").text = competence.description
    for ref in competence.prerequisites:
        ET.SubElement(root, "prerequisite", ref=ref)
    ET.SubElement(
        root,
        "delivery",
        questions=str(competence.required_questions),
        choices=str(competence.choices_per_question),
    )
    for element in competence.elements:
        elem = ET.SubElement(
            root,
            "element",
            identifier=element.id,
            ability=element.ability.value,
            kind=element.kind.value,
        )
        for item in element.knowledge_items:
            ET.SubElement(elem, "knowledge", kind=item.kind.value).text = item.label
        perf = element.performance
        ET.SubElement(
            elem,
            "performance",
            context=perf.context.value,
            complexity=str(perf.complexity),
            autonomy=perf.autonomy.value,
            scope=perf.scope.value,
            frequency=str(perf.frequency),
        )
    return _indent(root)


# ---------------------------------------------------------------------------
# learner profile
# ---------------------------------------------------------------------------


def _parse_timestamp(raw: str, context: str) -> datetime:
    try:
        stamp = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        raise XmlValidationError(f"{context}: timestamp {raw!r} is not RFC 3339")
    if stamp.tzinfo is None:
        raise XmlValidationError(f"{context}: timestamp {raw!r} lacks a UTC offset")
    return stamp


def parse_profile(text: str) -> LearnerProfile:
    """Parse a <learner> profile document."""
    root = _parse_root(text, "learner")
    learner_id = _attr(root, "identifier", "learner")
    context = f"learner {learner_id}"
    identification = root.find("identification")
    name = affiliation = ""
    if identification is not None:
        name = _child_text(identification, "name", context, required=False)
        affiliation = _child_text(identification, "affiliation", context, required=False)
    records = []
    for elem in root.findall("competencyRecord"):
        r_context = f"{context} competencyRecord"
        try:
            records.append(
                CompetencyRecord(
                    competence_ref=_attr(elem, "competenceRef", r_context),
                    theta=_float_attr(elem, "theta", r_context),
                    standard_error=_float_attr(elem, "stderr", r_context),
                    status=_enum_attr(elem, "status", EstimationStatus, r_context),
                    items=_int_attr(elem, "items", r_context),
                    timestamp=_parse_timestamp(_attr(elem, "timestamp", r_context), r_context),
                )
            )
        except XmlValidationError:
            raise
        except ValueError as e:
            raise XmlValidationError(f"{r_context}: {e}") from e
    try:
        return LearnerProfile(id=learner_id, name=name, affiliation=affiliation, records=records)
    except ValueError as e:
        raise XmlValidationError(f"{context}: {e}") from e


def serialize_profile(profile: LearnerProfile) -> str:
    root = ET.Element("learner", identifier=profile.id)
    identification = ET.SubElement(root, "identification")
    ET.SubElement(identification, "name").text = profile.name
    ET.SubElement(identification, "affiliation").text = profile.affiliation
    for record in profile.records:
        ET.SubElement(
            root,
            "competencyRecord",
            competenceRef=record.competence_ref,
            theta=_fmt(record.theta),
            stderr=_fmt(record.standard_error),
            status=record.status.value,
            items=str(record.items),
            timestamp=record.timestamp.isoformat(),
        )
    return _indent(root)
