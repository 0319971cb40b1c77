"""Competence, item-bank, and learner XML
=========================================

Loads the packaged SQL repository, shows what the three document kinds
carry, round-trips them, and demonstrates what cross-document
validation catches.
"""

import tempfile
from pathlib import Path

from irtplace import (
    parse_competence,
    serialize_competence,
    serialize_profile,
    validate_repository,
)
from irtplace.fixtures import copy_sql_repo
from irtplace.repository import Repository

###############################################################################
# Load the packaged repository
# ----------------------------
# A repository is a directory: competences/, banks/, learners/.

workdir = Path(tempfile.mkdtemp(prefix="irtplace-demo-"))
repo = Repository.load(copy_sql_repo(workdir / "repo"))

print("competences:", ", ".join(sorted(repo.competences)))
print("items:", len(repo.items), " learners:", ", ".join(sorted(repo.profiles)))

sql = repo.competences["sql"]
print(f"\n'{sql.title}' needs {sql.required_questions} questions of "
      f"{sql.choices_per_question} choices each")
print("prerequisites:", ", ".join(sql.prerequisites))
for element in sql.elements:
    kinds = ", ".join(k.kind.value for k in element.knowledge_items)
    print(f"  element {element.id}: {element.ability.value} {element.kind.value} [{kinds}]")

###############################################################################
# Serialization round-trips
# -------------------------
# parse(serialize(x)) == x for every valid value; reals keep 17
# significant digits and timestamps are RFC 3339.

assert parse_competence(serialize_competence(sql)) == sql
print("\ncompetence round-trip: ok")
print("\nlearner profile document:")
print(serialize_profile(repo.profiles["learner-001"]))

###############################################################################
# Cross-document validation
# -------------------------
# The clean fixture produces an empty report.  Break it two ways and
# the findings name the offenders: a prerequisite cycle and a
# competence that cannot fill its test.

print("clean repository findings:", repo.validate().findings or "none")

ra = repo.competences["relational-algebra"]
looped = type(ra)(**{**ra.__dict__, "prerequisites": ("sql",)})
report = validate_repository(
    {**repo.competences, looped.id: looped}, repo.items, repo.profiles
)
print("\nafter adding relational-algebra -> sql prerequisite:")
print(report.render(), end="")

greedy = type(sql)(**{**sql.__dict__, "required_questions": 99})
report = validate_repository(
    {**repo.competences, "sql": greedy}, repo.items, repo.profiles
)
print("\nafter demanding 99 questions:")
print(report.render(), end="")
