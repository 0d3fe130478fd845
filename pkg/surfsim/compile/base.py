#!/usr/bin/env python

"""
Shared pieces of every compiler: the representation map R, the
deduplicating rule emitter with its provenance index, and the
CompiledSimulation record returned by each construction.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, List, Optional, Union

import pandas as pd
from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, UND
from surfsim.base.lattice import LatticeKind
from surfsim.base.system import ModelSystem
from surfsim.utils import ModelError

PROVENANCE_COLUMNS = ["rule", "protocol", "item", "perm", "note"]

# construction name -> state decoder of schema-backed compilers
DECODERS: Dict[str, Callable[[Hashable], Any]] = {}


def register_decoder(name: str):
    """Registers the representation function of a schema construction."""
    def wrapper(func):
        DECODERS[name] = func
        return func
    return wrapper


class RepresentationMap:
    """
    R: simulator state -> simulated state or UND. Explicit constructions
    carry a table; schema constructions name a registered decoder.
    Blank always maps to the target blank.
    """
    def __init__(
        self,
        table: Optional[Dict[Hashable, Hashable]] = None,
        construction: Optional[str] = None,
        blank_in: Hashable = BLANK,
        blank_out: Hashable = BLANK,
        kind: Optional[LatticeKind] = None,
        identity: bool = False,
        ):

        self.table = dict(table or {})
        self.construction = construction
        self.blank_in = blank_in
        self.blank_out = blank_out
        self.kind = kind
        self.identity = identity
        if construction is not None and construction not in DECODERS:
            logger.error(f"unknown construction {construction!r}, options are {sorted(DECODERS)}")
            raise ModelError(f"no decoder registered for {construction!r}")

    def __repr__(self):
        if self.construction:
            return f"<RepresentationMap: @{self.construction}>"
        if self.identity:
            return "<RepresentationMap: identity>"
        return f"<RepresentationMap: {len(self.table)} states>"

    @classmethod
    def identity_map(cls, blank: Hashable = BLANK) -> "RepresentationMap":
        return cls(blank_in=blank, blank_out=blank, identity=True)

    def __call__(self, state: Hashable) -> Hashable:
        if state == self.blank_in:
            return self.blank_out
        if state in self.table:
            return self.table[state]
        # tables read from text are keyed by state names
        text = str(state)
        if text in self.table:
            return self.table[text]
        if self.construction is not None:
            return DECODERS[self.construction](state)
        if self.identity:
            return state
        raise KeyError(f"representation map has no entry for {state!r}")

    def map_config(self, cfg: Configuration) -> Union[Configuration, str]:
        """R*: cell-wise image, or UND if any cell maps to UND."""
        cells = {}
        for coord, state in cfg.items():
            image = self(state)
            if image == UND:
                return UND
            cells[coord] = image
        kind = self.kind if self.kind is not None else cfg.kind
        return Configuration(cells, blank=self.blank_out, kind=kind)

    def to_frame(self) -> pd.DataFrame:
        rows = [(str(k), str(v)) for k, v in self.table.items()]
        return pd.DataFrame(rows, columns=["state", "image"])

    def to_text(self) -> str:
        """Two-column tab separated text: 'state<TAB>image'."""
        lines = [f"#blank\t{self.blank_in}\t{self.blank_out}"]
        if self.construction:
            lines.append(f"*\t@{self.construction}")
        elif self.identity:
            lines.append("*\t@identity")
        lines += [f"{k}\t{v}" for k, v in sorted(self.table.items(), key=lambda i: str(i[0]))]
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path]):
        Path(path).write_text(self.to_text(), encoding="utf-8")
        logger.debug(f"wrote representation map to {path}")

    @classmethod
    def from_text(cls, text: str, kind: Optional[LatticeKind] = None) -> "RepresentationMap":
        table = {}
        construction = None
        identity = False
        blank_in = blank_out = BLANK
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if parts[0] == "#blank":
                blank_in, blank_out = parts[1], parts[2]
                continue
            if len(parts) != 2:
                raise ModelError(f"representation line {lineno} needs two columns")
            if parts[0] == "*":
                name = parts[1].lstrip("@")
                if name == "identity":
                    identity = True
                else:
                    construction = name
                continue
            table[parts[0]] = parts[1]
        return cls(table, construction, blank_in, blank_out, kind, identity)

    @classmethod
    def read(cls, path: Union[str, Path], kind: Optional[LatticeKind] = None):
        return cls.from_text(Path(path).read_text(encoding="utf-8"), kind)


class RuleEmitter:
    """
    Collects generated rules in emission order. A rule emitted twice
    (by another item or permutation) keeps its first index and gains
    one more provenance row.
    """
    def __init__(self, construction: str):
        self.construction = construction
        self.rules: List = []
        self._index: Dict[Hashable, int] = {}
        self._rows: List[tuple] = []

    def __repr__(self):
        return f"<RuleEmitter: {self.construction}, {len(self.rules)} rules>"

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def add(self, rule, protocol: str, item: Union[int, str], perm: str = "", note: str = "") -> int:
        idx = self._index.get(rule)
        if idx is None:
            idx = self._index[rule] = len(self.rules)
            self.rules.append(rule)
        self._rows.append((idx, protocol, item, perm, note))
        return idx

    def provenance(self) -> pd.DataFrame:
        return pd.DataFrame(self._rows, columns=PROVENANCE_COLUMNS)


def schema_provenance(items: Dict[int, str], protocol: str, note: str = "") -> pd.DataFrame:
    """One provenance row per protocol item of a schema-backed target."""
    rows = [(item, protocol, item, "", f"{desc}{'; ' + note if note else ''}")
            for item, desc in sorted(items.items())]
    return pd.DataFrame(rows, columns=PROVENANCE_COLUMNS)


@dataclass
class CompiledSimulation:
    """A target system simulating a source system under R."""
    source: ModelSystem
    target: ModelSystem
    representation: RepresentationMap
    provenance: pd.DataFrame
    construction: str
    notes: List[str] = field(default_factory=list)

    def __repr__(self):
        return (
            f"<CompiledSimulation: {self.construction}, "
            f"{self.source.model} -> {self.target.model}>")

    @property
    def rule_count(self) -> Optional[int]:
        """Number of distinct generated rules, None for schema targets."""
        rules = getattr(self.target, "rules", None)
        if rules is None or getattr(rules, "schema", False):
            return None
        return len(rules)

    def image(self, cfg: Configuration):
        return self.representation.map_config(cfg)

    def write_provenance(self, path: Union[str, Path]):
        self.provenance.to_csv(path, sep="\t", index=False)
        logger.debug(f"wrote {len(self.provenance)} provenance rows to {path}")
