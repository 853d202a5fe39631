"""Bundled example datasets and CSV item I/O.

Items travel as CSV with the exact header ``id,group,utility``: UTF-8,
one item per row, utilities as decimal literals, group labels arbitrary
strings.  Two fixtures ship with the package in ``fairexposure/data/``:

* ``jobseeker.csv`` — six candidates in two groups of three with utilities
  0.82 down to 0.77; small enough to verify every number by hand.
* ``synthetic_news.csv`` — twenty-five articles in groups of 15 and 10 with
  utilities drawn as ``rating/5`` plus Gaussian noise (sigma 0.05) clipped
  to [0, 1], generated from the frozen seed :data:`NEWS_SEED`.

Both files are byte-for-byte reproducible from :func:`jobseeker_items` and
:func:`synthetic_news_items` via :func:`write_items_csv`.
"""

from __future__ import annotations

import csv
import io
from importlib import resources
from os import PathLike
from typing import IO, Iterable, Union

import numpy as np

from .core import Item

__all__ = [
    "CSV_HEADER",
    "NEWS_SEED",
    "jobseeker_items",
    "load_jobseeker",
    "load_synthetic_news",
    "read_items_csv",
    "synthetic_news_items",
    "write_items_csv",
]

CSV_HEADER = ("id", "group", "utility")

#: Seed for the bundled synthetic news fixture.  Frozen so that the shipped
#: CSV, the generator, and every test agree on the same twenty-five items.
NEWS_SEED = 11

Source = Union[str, PathLike, IO[str]]


def read_items_csv(source: Source) -> tuple[Item, ...]:
    """Parse items from ``source`` (a path or an open text stream).

    The first row must be exactly ``id,group,utility``.  Errors carry the
    1-based line number of the offending row.
    """
    if hasattr(source, "read"):
        rows = list(csv.reader(source))  # type: ignore[arg-type]
    else:
        with open(source, "r", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    if not rows:
        raise ValueError("empty input: expected header 'id,group,utility'")
    if [cell.strip() for cell in rows[0]] != list(CSV_HEADER):
        raise ValueError(
            f"line 1: expected header 'id,group,utility', got {','.join(rows[0])!r}"
        )
    items: list[Item] = []
    seen: set[str] = set()
    for offset, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"line {offset}: expected 3 fields, got {len(row)}")
        item_id, group, raw_utility = (cell.strip() for cell in row)
        if not item_id:
            raise ValueError(f"line {offset}: empty item id")
        if item_id in seen:
            raise ValueError(f"line {offset}: duplicate item id {item_id!r}")
        try:
            utility = float(raw_utility)
        except ValueError:
            raise ValueError(
                f"line {offset}: utility must be a decimal literal, got {raw_utility!r}"
            ) from None
        try:
            items.append(Item(id=item_id, group=group, utility=utility))
        except ValueError as exc:
            raise ValueError(f"line {offset}: {exc}") from None
        seen.add(item_id)
    if not items:
        raise ValueError("no item rows after the header")
    return tuple(items)


def write_items_csv(items: Iterable[Item], destination: Source) -> None:
    """Write ``items`` to ``destination`` in the ``id,group,utility`` format.

    Utilities are written with :func:`repr` so they round-trip exactly.
    """

    def _write(handle: IO[str]) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for item in items:
            writer.writerow([item.id, item.group, repr(item.utility)])

    if hasattr(destination, "write"):
        _write(destination)  # type: ignore[arg-type]
    else:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            _write(handle)


def jobseeker_items() -> tuple[Item, ...]:
    """The six-candidate example: groups M/F of three, utilities 0.82..0.77."""
    utilities = (0.82, 0.81, 0.80, 0.79, 0.78, 0.77)
    ids = ("m1", "m2", "m3", "f1", "f2", "f3")
    groups = ("M", "M", "M", "F", "F", "F")
    return tuple(
        Item(id=i, group=g, utility=u) for i, g, u in zip(ids, groups, utilities)
    )


def synthetic_news_items(seed: int = NEWS_SEED) -> tuple[Item, ...]:
    """Twenty-five synthetic articles: 15 in group "A", 10 in group "B".

    Each item draws an integer rating in 1..5, scales it to [0.2, 1.0], adds
    Gaussian noise with standard deviation 0.05, and clips to [0, 1].  With
    the default seed this reproduces the bundled ``synthetic_news.csv``.
    """
    rng = np.random.default_rng(seed)
    ratings = rng.integers(1, 6, size=25)
    noise = rng.normal(0.0, 0.05, size=25)
    utilities = np.clip(ratings / 5.0 + noise, 0.0, 1.0)
    return tuple(
        Item(
            id=f"n{index + 1:02d}",
            group="A" if index < 15 else "B",
            utility=float(utilities[index]),
        )
        for index in range(25)
    )


def _load_bundled(filename: str) -> tuple[Item, ...]:
    text = resources.files("fairexposure").joinpath("data", filename).read_text("utf-8")
    return read_items_csv(io.StringIO(text))


def load_jobseeker() -> tuple[Item, ...]:
    """Read the bundled ``jobseeker.csv`` fixture."""
    return _load_bundled("jobseeker.csv")


def load_synthetic_news() -> tuple[Item, ...]:
    """Read the bundled ``synthetic_news.csv`` fixture."""
    return _load_bundled("synthetic_news.csv")
