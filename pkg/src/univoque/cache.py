"""On-disk level cache so long enumerations can resume where they stopped."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from platformdirs import user_cache_dir

from .GammaEnumerator import Entry, Level
from .const import CACHE_VERSION, DOMAIN
from .geometry import word_map
from .ratutil import format_rational, format_word, parse_word

_LOGGER = logging.getLogger(__name__)

_FIELDS = ("S", "T", "pruned", "shadow", "blockers")


class CacheLockedError(ValueError):
    """Raised when another run holds the cache lock."""


def map_digest(entries) -> str:
    """Digest of the exact maps of a sequence of entries."""
    h = hashlib.sha256()
    for _, g in entries:
        parts = [format_rational(g.ratio), *map(str, g.orth.axis_map), *map(str, g.orth.signs)]
        parts += [format_rational(b) for b in g.trans]
        h.update((",".join(parts) + ";").encode("utf-8"))
    return h.hexdigest()


def _all_entries(level: Level) -> list[Entry]:
    return [entry for name in _FIELDS for entry in getattr(level, name)]


class LevelCache:
    """JSON-lines file: a header line, then one record per level.

    The header carries the cache version and the config hash; a mismatch
    discards the file.
    """

    def __init__(self, path: Path, config_hash: str, alphabet_size: int = 9) -> None:
        self.path = Path(path)
        self.config_hash = config_hash
        self.alphabet_size = alphabet_size
        self._lock_path = self.path.with_name(self.path.name + ".lock")
        self._locked = False

    @staticmethod
    def default_path(config_hash: str) -> Path:
        return Path(user_cache_dir(DOMAIN)) / f"{config_hash[:16]}.jsonl"

    def __enter__(self) -> LevelCache:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self._lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as err:
            raise CacheLockedError(f"cache {self.path} is locked by another run") from err
        os.close(fd)
        self._locked = True
        return self

    def __exit__(self, *exc) -> None:
        if self._locked:
            self._lock_path.unlink(missing_ok=True)
            self._locked = False

    def _header(self) -> dict:
        return {"version": CACHE_VERSION, "config_hash": self.config_hash}

    def _reset(self, records: list[str] = ()) -> None:
        with self.path.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps(self._header(), sort_keys=True) + "\n")
            for line in records:
                fh.write(line + "\n")

    def _decode(self, enumerator, record: dict) -> Level:
        fields = {}
        for name in _FIELDS:
            fields[name] = tuple(
                (word, word_map(enumerator.ifs, word))
                for word in (parse_word(text, self.alphabet_size) for text in record[name])
            )
        return Level(k=record["k"], **fields)

    def load(self, enumerator, depth: int) -> list[Level]:
        """Levels 1..depth that are already on disk; an invalid file is reset."""
        if not self.path.exists():
            self._reset()
            return []
        lines = self.path.read_text(encoding="utf-8").splitlines()
        try:
            header = json.loads(lines[0]) if lines else None
        except json.JSONDecodeError:
            header = None
        if header != self._header():
            _LOGGER.warning("[load] Cache %s belongs to another config or version; discarding", self.path)
            self._reset()
            return []
        levels: list[Level] = []
        kept: list[str] = []
        for line in lines[1:]:
            try:
                record = json.loads(line)
                level = self._decode(enumerator, record)
            except (json.JSONDecodeError, KeyError, ValueError):
                _LOGGER.warning("[load] Unreadable record in %s; truncating there", self.path)
                self._reset(kept)
                break
            if level.k != len(levels) + 1 or map_digest(_all_entries(level)) != record.get("digest"):
                _LOGGER.warning("[load] Record for level %s in %s does not verify; truncating there", level.k, self.path)
                self._reset(kept)
                break
            levels.append(level)
            kept.append(line)
        return levels[:depth]

    def append(self, level: Level) -> None:
        record = {"k": level.k}
        for name in _FIELDS:
            record[name] = [format_word(word, self.alphabet_size) for word, _ in getattr(level, name)]
        record["digest"] = map_digest(_all_entries(level))
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
