"""Shared helpers for the test suite."""
from __future__ import annotations

import random

from syncheck import (
    Deadlock,
    Illegal,
    MessageOccurrence,
    Mode,
    Model,
    NoDeadlock,
    Sequence,
    SignatureSpace,
    parse_abstract,
)

PAPER_ABSTRACT = "ab\nbc\nca"

PAPER_DSL = """
process 0 {send tag=1 to 2; send tag=2 to 1;}
process 1 {recv tag=2 from 0; send tag=3 to 2;}
process 2 {recv tag=3 from 1; recv tag=1 from 0;}
"""


def abstract_model(*strings: str) -> Model:
    return parse_abstract("\n".join(strings))


def model_from_tuples(seqs) -> Model:
    """Build an abstract model straight from per-rank character tuples."""
    space = SignatureSpace()
    sequences = [
        Sequence(rank=i, occurrences=[MessageOccurrence(space.intern_character(c)) for c in chars])
        for i, chars in enumerate(seqs)
    ]
    return Model(sequences=sequences, mode=Mode.ABSTRACT, space=space)


def classify(verdict) -> str:
    if isinstance(verdict, NoDeadlock):
        return "ok"
    if isinstance(verdict, Deadlock):
        return "deadlock"
    if isinstance(verdict, Illegal):
        return "illegal"
    raise TypeError(verdict)


def random_legal_abstract(rng: random.Random, max_procs: int = 5, max_events: int = 12) -> Model:
    """Legal-by-construction abstract model: fresh character per rendezvous,
    appended to two random tails, then bounded-window jitter per sequence."""
    procs = rng.randint(2, max_procs)
    seqs = [[] for _ in range(procs)]
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    events = rng.randint(1, max_events)
    for k in range(events):
        a = rng.randrange(procs)
        b = rng.randrange(procs - 1)
        if b >= a:
            b += 1
        ch = alphabet[k]
        seqs[a].append(ch)
        seqs[b].append(ch)
    for lst in seqs:
        for i in range(len(lst)):
            j = rng.randint(i, min(i + 2, len(lst) - 1))
            lst[i], lst[j] = lst[j], lst[i]
    return model_from_tuples(seqs)
