"""Synthetic model generation and the engine-vs-cycle-detector benchmark."""
from __future__ import annotations

import gc
import random
import statistics
import time
from dataclasses import dataclass
from typing import List, Optional

from . import engine as engine_mod
from .model import Envelope, MessageOccurrence, Mode, Model, Role, Sequence
from .oracle import cycle_check
from .signatures import SignatureSpace

PATTERNS = ("pairs", "ring", "random")

CSV_HEADER = "backend,pattern,P,M,n,median_ms,steps"


@dataclass(frozen=True)
class GenSpec:
    pattern: str  # "pairs" | "ring" | "random"
    processes: int
    messages_per_process: int
    seed: int = 0
    shuffle_window: int = 2  # random pattern only

    def __post_init__(self) -> None:
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.messages_per_process < 1:
            raise ValueError("messages_per_process must be >= 1")
        if self.pattern == "ring":
            if self.processes < 3:
                raise ValueError("ring needs at least 3 processes")
        elif self.processes < 2:
            raise ValueError(f"{self.pattern} needs at least 2 processes")
        if self.pattern == "pairs" and self.processes % 2:
            raise ValueError("pairs needs an even process count")


def generate(spec: GenSpec) -> Model:
    """Deterministic model synthesis.

    pairs: P/2 disjoint pairs exchanging M distinct messages in matching
    order (alternating direction); deadlock-free by construction.
    ring: each process waits for its predecessor before sending onward,
    except process 0 which sends both its messages first; the resulting wait
    cycle deadlocks for any P >= 3.
    random: (P*M)//2 rendezvous between random process pairs with fresh
    signatures, tails optionally jittered within a bounded window; legal by
    construction, verdict not known a priori.
    """
    space = SignatureSpace()
    P, M = spec.processes, spec.messages_per_process
    occs: List[List[MessageOccurrence]] = [[] for _ in range(P)]
    tag = 0

    def rendezvous(src: int, dst: int) -> None:
        nonlocal tag
        env = Envelope(tag=tag, source=src, destination=dst)
        tag += 1
        sig = space.signature_for(env)
        occs[src].append(MessageOccurrence(sig, Role.SEND, env))
        occs[dst].append(MessageOccurrence(sig, Role.RECV, env))

    if spec.pattern == "pairs":
        for k in range(P // 2):
            a, b = 2 * k, 2 * k + 1
            for m in range(M):
                if m % 2 == 0:
                    rendezvous(a, b)
                else:
                    rendezvous(b, a)
    elif spec.pattern == "ring":
        # Round messages c_0..c_{P-1}: c_0 goes 0 -> P-1, c_i goes i-1 -> i.
        # Process 0 sends both of its messages first; every other process
        # waits for its predecessor before passing onward, so the heads form
        # a full wait cycle and every round deadlocks at its start.
        for _ in range(M):
            envs = [Envelope(tag=tag, source=0, destination=P - 1)]
            tag += 1
            for i in range(1, P):
                envs.append(Envelope(tag=tag, source=i - 1, destination=i))
                tag += 1
            sigs = [space.signature_for(e) for e in envs]
            occs[0].append(MessageOccurrence(sigs[0], Role.SEND, envs[0]))
            occs[0].append(MessageOccurrence(sigs[1], Role.SEND, envs[1]))
            for i in range(1, P - 1):
                occs[i].append(MessageOccurrence(sigs[i], Role.RECV, envs[i]))
                occs[i].append(MessageOccurrence(sigs[i + 1], Role.SEND, envs[i + 1]))
            occs[P - 1].append(MessageOccurrence(sigs[P - 1], Role.RECV, envs[P - 1]))
            occs[P - 1].append(MessageOccurrence(sigs[0], Role.RECV, envs[0]))
    else:  # random
        rng = random.Random(spec.seed)
        for _ in range((P * M) // 2):
            src = rng.randrange(P)
            dst = rng.randrange(P - 1)
            if dst >= src:
                dst += 1
            rendezvous(src, dst)
        w = spec.shuffle_window
        if w > 0:
            for lst in occs:
                for i in range(len(lst)):
                    j = rng.randint(i, min(i + w, len(lst) - 1))
                    lst[i], lst[j] = lst[j], lst[i]

    sequences = [Sequence(rank=i, occurrences=lst) for i, lst in enumerate(occs)]
    return Model(sequences=sequences, mode=Mode.STRICT, space=space)


@dataclass(frozen=True)
class BenchRow:
    backend: str
    pattern: str
    processes: int
    messages_per_process: int
    n: int
    median_ms: float
    steps: Optional[int]  # engine only

    def csv(self) -> str:
        steps = "" if self.steps is None else str(self.steps)
        return (
            f"{self.backend},{self.pattern},{self.processes},"
            f"{self.messages_per_process},{self.n},{self.median_ms:.3f},{steps}"
        )


def bench_run(spec: GenSpec, repetitions: int = 3, backends=("engine", "cycle")) -> List[BenchRow]:
    """Time engine and cycle-detector checks on one generated model.

    Generation/parsing is excluded; one warm-up run per backend is discarded
    and the median of the remaining repetitions reported.
    """
    model = generate(spec)
    n = model.message_count
    rows = []
    for backend in backends:
        times = []
        steps = None
        for rep in range(repetitions + 1):
            # timed like timeit: cyclic GC off so collection pauses don't
            # land inside the measured region
            gc_was_enabled = gc.isenabled()
            gc.disable()
            try:
                start = time.perf_counter()
                if backend == "engine":
                    verdict, eng = engine_mod.check_with_engine(model)
                    steps = eng.steps
                else:
                    cycle_check(model)
                elapsed = (time.perf_counter() - start) * 1000.0
            finally:
                if gc_was_enabled:
                    gc.enable()
            if rep > 0:  # discard warm-up
                times.append(elapsed)
        rows.append(
            BenchRow(
                backend=backend,
                pattern=spec.pattern,
                processes=spec.processes,
                messages_per_process=spec.messages_per_process,
                n=n,
                median_ms=statistics.median(times),
                steps=steps if backend == "engine" else None,
            )
        )
    return rows
