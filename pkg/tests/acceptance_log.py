"""Shared store for acceptance outcomes, printed by the terminal summary hook."""

CRITERIA = {}
DESCENT = {"runs": 0, "violations": []}


def record(number, name, passed, detail=""):
    CRITERIA[number] = (name, passed, detail)
