"""
The single-file session format: {"pool": [...], "poset": {...}, "names": {...}, "config": {...}}.
Every field is optional. Names are given as a map from label to name, or as a list that
gets labels n0, n1, ...; a command refers to them as @label.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from urforcing.catalog import Instance
from urforcing.codec import decode_name, decode_poset, decode_pool, load_json_file
from urforcing.exceptions import DecodeError, PreconditionError, UnknownUrelementError
from urforcing.names import NamePool, PName, close_pool, name_kernel, require_valid
from urforcing.poset import Poset
from urforcing.universe import DEFAULT_BUDGET, UrelementPool

logger = logging.getLogger('UrforcingSession')

TRIVIAL_POSET = {'elements': ['1'], 'leq': [], 'top': '1'}

@dataclass
class UrforcingSession:
    poset: Poset
    urelements: Optional[UrelementPool] = None
    names: Dict[str, PName] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    include_checks: bool = True
    budget: int = DEFAULT_BUDGET

    @classmethod
    def empty(cls):
        return cls(decode_poset(TRIVIAL_POSET))

    @classmethod
    def from_json(cls, payload):
        if not isinstance(payload, dict):
            raise DecodeError('A session must be a JSON object')
        unknown = sorted(set(payload) - {'pool', 'poset', 'names', 'config'})
        if unknown:
            raise DecodeError(f"Unknown session fields: {unknown}")
        poset = decode_poset(payload.get('poset', TRIVIAL_POSET))
        urelements = decode_pool(payload['pool']) if 'pool' in payload else None
        raw_names = payload.get('names', {})
        if isinstance(raw_names, list):
            raw_names = {f"n{i}": raw for i, raw in enumerate(raw_names)}
        if not isinstance(raw_names, dict):
            raise DecodeError('Session names must be a map from label to name or a list of names')
        config = payload.get('config', {})
        if not isinstance(config, dict):
            raise DecodeError('Session config must be a JSON object')
        session = cls(poset, urelements, {label: decode_name(raw) for label, raw in raw_names.items()}, config)
        session.check_references()
        return session

    @classmethod
    def load(cls, path: Optional[str]):
        if not path:
            return cls.empty()
        session = cls.from_json(load_json_file(path))
        logger.info(f"Loaded session {path} with {len(session.names)} names over {len(session.poset)} conditions")
        return session

    def check_references(self):
        """Names must be valid over the poset and mention only declared urelements."""
        for label, name in self.names.items():
            require_valid(self.poset, name)
            if self.urelements is not None:
                undeclared = sorted(u.id for u in name_kernel(name) if u not in self.urelements)
                if undeclared:
                    raise UnknownUrelementError(f"Name @{label} mentions undeclared urelements {undeclared}",
                                                label=label, urelements=undeclared)

    def configure(self, include_checks: bool, budget: int):
        self.include_checks = include_checks
        self.budget = budget

    def resolve(self, label: str) -> PName:
        if label not in self.names:
            raise PreconditionError(f"No session name labelled @{label}", label=label)
        return self.names[label]

    def pool(self, *extra: PName) -> NamePool:
        """The session's names closed under subnames, together with any extra names."""
        return close_pool(self.poset, list(self.names.values()) + list(extra), self.include_checks, self.budget)

    def instances(self):
        if not self.names:
            return []
        constants = tuple(self.names[label] for label in sorted(self.names))[:3]
        return [Instance('session', self.pool(), constants)]
