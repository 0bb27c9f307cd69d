"""Shared store for the per-criterion verdict lines."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = (bool(ok), detail)
    print(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok
