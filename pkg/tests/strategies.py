"""Hypothesis strategies and a seeded generator for small litmus programs."""

import random

from hypothesis import strategies as st

MODES = ["", "^R", "^A", "^RA"]
VALUES = [1, 2, 3]
UPDATE_MODES = ["", "^R", "^RA"]  # updates have no acquire-only form


def object_op(kind, obj, reg, put, mode, value):
    if put:
        verb = "enq" if kind == "queue" else "push"
        return f"{obj}.{verb}{mode}({value});"
    verb = "deq" if kind == "queue" else "pop"
    return f"{reg} := {obj}.{verb}{mode}();"


def object_program(kind, threads):
    """``threads`` is a list of lists of ``(put, mode, value)``."""
    obj = "q" if kind == "queue" else "s"
    lines = [f"object {obj} : {kind};"]
    n = 0
    for t, ops in enumerate(threads, 1):
        body = []
        for put, mode, value in ops:
            n += 1
            body.append(f"{n}: " + object_op(kind, obj, f"r{n}", put, mode, value))
        lines.append(f"thread {t} {{ {' '.join(body)} }}")
    return "\n".join(lines) + "\n"


_obj_op = st.tuples(st.booleans(), st.sampled_from(MODES), st.sampled_from(VALUES))


@st.composite
def object_programs(draw):
    kind = draw(st.sampled_from(["queue", "stack"]))
    threads = draw(st.lists(st.lists(_obj_op, min_size=1, max_size=3), min_size=2, max_size=2))
    return object_program(kind, threads)


def random_object_programs(n, seed=0):
    """``n`` distinct queue/stack programs with 2 threads of at most 3 operations each."""
    rng = random.Random(seed)
    seen = []
    while len(seen) < n:
        kind = rng.choice(["queue", "stack"])
        threads = [[(rng.random() < 0.5, rng.choice(MODES), rng.choice(VALUES))
                    for _ in range(rng.randint(1, 3))] for _ in range(2)]
        text = object_program(kind, threads)
        if text not in seen:
            seen.append(text)
    return seen


def _mem_op(draw, n):
    x = draw(st.sampled_from(["x", "y"]))
    v = draw(st.sampled_from(VALUES))
    kind = draw(st.sampled_from(["write", "read", "cas", "fai"]))
    if kind == "write":
        return f"{x} :={draw(st.sampled_from(['', '^R']))} {v};"
    if kind == "read":
        return f"a{n} <-{draw(st.sampled_from(['', '^A']))} {x};"
    if kind == "cas":
        return f"a{n} := CAS{draw(st.sampled_from(UPDATE_MODES))}({x}, {v - 1}, {v});"
    return f"a{n} := FAI{draw(st.sampled_from(UPDATE_MODES))}({x});"


@st.composite
def memory_programs(draw):
    lines = ["init { x := 0; y := 0; }"]
    n = 0
    for t in (1, 2):
        body = []
        for _ in range(draw(st.integers(1, 3))):
            n += 1
            body.append(f"{n}: {_mem_op(draw, n)}")
        lines.append(f"thread {t} {{ {' '.join(body)} }}")
    return "\n".join(lines) + "\n"
