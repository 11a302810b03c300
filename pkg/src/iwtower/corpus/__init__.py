"""Bundled example links, towers, morphisms and modules."""

from __future__ import annotations

from pathlib import Path

CORPUS_DIR = Path(__file__).resolve().parent


def resolve(name: str, base_dir: Path | None = None) -> Path:
    """Find a file by path (relative to ``base_dir`` first) or by corpus name."""
    p = Path(name)
    candidates = []
    if base_dir is not None and not p.is_absolute():
        candidates.append(Path(base_dir) / p)
    candidates.append(p)
    candidates.append(CORPUS_DIR / p)
    candidates.append(CORPUS_DIR / (name + ".json"))
    for c in candidates:
        if c.is_file():
            return c
    raise FileNotFoundError(f"no such file or corpus entry: {name}")


def entries(kind: str | None = None) -> list[Path]:
    """Corpus files, optionally filtered by their "kind" field."""
    import json

    out = []
    for f in sorted(CORPUS_DIR.glob("*.json")):
        if kind is None or json.loads(f.read_text()).get("kind") == kind:
            out.append(f)
    return out
