"""On-disk character store: canonical text, content-hashed, atomic writes."""
from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from .groupring import GroupRingElem
from .rootsys import RootSystem, Weight

CACHE_ENV = "KRPOLY_CACHE_DIR"


class CacheCorruption(IOError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "krpoly"


def cache_key(ctype: str, lam: Weight) -> str:
    text = f"{ctype}|{','.join(map(str, lam.coords))};{lam.scale}"
    return hashlib.sha256(text.encode()).hexdigest()


def encode(ctype: str, lam: Weight, elem: GroupRingElem) -> str:
    body = elem.dumps()
    digest = hashlib.sha256(body.encode()).hexdigest()
    return f"character {ctype} {','.join(map(str, lam.coords))} sha256 {digest}\n{body}"


def decode(text: str, ctype: str | None = None, lam: Weight | None = None) -> GroupRingElem:
    head, _, body = text.partition("\n")
    parts = head.split()
    if len(parts) != 5 or parts[0] != "character" or parts[3] != "sha256":
        raise CacheCorruption("malformed cache header")
    if ctype is not None and parts[1] != ctype:
        raise CacheCorruption("cache entry belongs to another type")
    if lam is not None and parts[2] != ",".join(map(str, lam.coords)):
        raise CacheCorruption("cache entry belongs to another weight")
    if hashlib.sha256(body.encode()).hexdigest() != parts[4]:
        raise CacheCorruption("content hash mismatch")
    try:
        return GroupRingElem.loads(body)
    except (ValueError, IndexError) as exc:
        raise CacheCorruption(str(exc)) from exc


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class DiskCharacterStore:
    """CharacterStore backed by one file per (type, weight)."""

    def __init__(self, root: str | os.PathLike | None = None, strict: bool = True):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.strict = strict
        self.hits = 0
        self.misses = 0

    def path(self, R: RootSystem, lam: Weight) -> Path:
        return self.root / str(R.ctype) / f"{cache_key(str(R.ctype), lam)}.chr"

    def get(self, R: RootSystem, lam: Weight) -> GroupRingElem | None:
        p = self.path(R, lam)
        if not p.exists():
            self.misses += 1
            return None
        try:
            val = decode(p.read_text(), str(R.ctype), lam)
        except CacheCorruption:
            if self.strict:
                raise
            p.unlink(missing_ok=True)
            self.misses += 1
            return None
        self.hits += 1
        return val

    def put(self, R: RootSystem, lam: Weight, value: GroupRingElem) -> None:
        atomic_write(self.path(R, lam), encode(str(R.ctype), lam, value))


def cache_roundtrip(ctype: str, lam: Weight, elem: GroupRingElem) -> GroupRingElem:
    return decode(encode(ctype, lam, elem), ctype, lam)
