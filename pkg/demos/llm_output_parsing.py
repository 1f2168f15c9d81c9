#!/usr/bin/env python3
"""Robust extraction of bracketed string lists from messy model output."""

from nuggeteval.errors import LengthMismatchError, NoListFoundError
from nuggeteval.gateway.parsing import (
    parse_label_list,
    parse_string_list,
    serialize_string_list,
)

# The happy path: exactly what the prompt asks for.
print(parse_string_list('["nugget one", "nugget two"]'))

# Models love to add prose; everything around the first well-formed list
# of double-quoted strings is ignored.
chatty = 'Sure! Here is the updated list:\n["kept fact", "new fact"]\nLet me know!'
print(parse_string_list(chatty))

# Escapes round-trip: serialize -> parse is the identity.
tricky = ['he said "hi"', "a\\b", "brackets [1] inside"]
wire = serialize_string_list(tricky)
print(wire)
assert parse_string_list(wire) == tricky

# An empty list is a valid answer (a topic can have no update).
print(parse_string_list("Updated Nugget List: []"))

# Label lists add a count-and-vocabulary contract on top. Case, spacing,
# and hyphens are normalized before checking.
labels = parse_label_list(
    '["Partial Support", "SUPPORT", "not-support"]',
    expected_len=3,
    allowed={"support", "partial_support", "not_support"},
)
print(labels)

# Wrong count or unknown labels raise typed errors the pipeline uses to
# decide between re-prompting and failing the unit.
try:
    parse_label_list('["vital"]', expected_len=2, allowed={"vital", "okay"})
except LengthMismatchError as exc:
    print("rejected:", exc)

try:
    parse_string_list("no list in this response at all")
except NoListFoundError as exc:
    print("rejected:", type(exc).__name__)
