"""
This file contains the full configuration and helps with its management.
"""

import argparse
import json
import logging
from dataclasses import dataclass, fields

from urforcing.exceptions import DecodeError, PreconditionError
from urforcing.universe import DEFAULT_BUDGET

logger = logging.getLogger('UrforcingConfiguration')

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']

@dataclass
class UrforcingConfiguration:

    load_configuration: bool = True
    budget: int = DEFAULT_BUDGET
    depth: int = 2
    max_quantifiers: int = 1
    max_formulas: int = 1500
    samples: int = 500
    seed: int = 1337
    n_jobs: int = 1
    include_pool_checks: bool = True
    pools_per_poset: int = 2
    pretty: bool = False
    progress: bool = False
    log_level: str = 'WARNING'

    def __post_init__(self):
        if self.load_configuration:
            self.load_values()

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        parser.add_argument('--config', help='Path to a json configuration file')
        parser.add_argument('--budget', type=int, help='Upper bound on the size of any enumerated collection')
        parser.add_argument('--depth', type=int, help='Formula generation depth. Atomic formulas only when 0')
        parser.add_argument('--max_quantifiers', type=int, help='Maximum number of nested quantifiers in generated formulas')
        parser.add_argument('--max_formulas', type=int, help='Generated formulas above this count are subsampled with the seed')
        parser.add_argument('--samples', type=int, help='Number of sampled antichain maps in the mixtures suite')
        parser.add_argument('--seed', type=int, help='The desired seed for generating random instances')
        parser.add_argument('--n_jobs', type=int, help='Number of joblib workers used by the forcing-theorem checker')
        parser.add_argument('--include_pool_checks', action=argparse.BooleanOptionalAction, help='Add check-names of every mentioned urelement when closing a name pool')
        parser.add_argument('--pools_per_poset', type=int, help='Number of sampled name pools per catalog poset')
        parser.add_argument('--pretty', action=argparse.BooleanOptionalAction, help='Indent JSON output instead of printing a single canonical line')
        parser.add_argument('--progress', action=argparse.BooleanOptionalAction, help='Show progress bars on stderr during suites')
        parser.add_argument('--log_level', type=str, choices=LOG_LEVELS, help='Logging level of messages written to stderr')

    def load_values(self, argv=None):
        parser = argparse.ArgumentParser(description='Urforcing is a desk-scale laboratory for forcing with urelements.')
        self.add_arguments(parser)
        args, _ = parser.parse_known_args(argv)
        self.apply_arguments(args)

    def apply_arguments(self, args: argparse.Namespace, session_config=None):
        """Defaults, then the --config file, then the session's config section, then explicit flags."""
        config_path = getattr(args, 'config', None)
        if config_path:
            try:
                with open(config_path, encoding='utf-8') as f:
                    config = json.load(f)
            except (OSError, json.JSONDecodeError) as err:
                raise DecodeError(f"Unable to load configuration file {config_path}: {err}", path=config_path)
            self.override_values(config)
        if session_config:
            self.override_values(session_config)
        for arg_name, arg_value in vars(args).items():
            if arg_value is not None and arg_name in self.field_names():
                setattr(self, arg_name, arg_value)
        self.validate()

    @classmethod
    def field_names(cls):
        return {f.name for f in fields(cls) if f.name != 'load_configuration'}

    def override_values(self, config_dict):
        if not isinstance(config_dict, dict):
            raise DecodeError(f"Configuration must be a JSON object, got {type(config_dict).__name__}")
        modified = {}
        for k, v in config_dict.items():
            if k in self.field_names() and getattr(self, k) != v:
                modified[k] = {"prev": getattr(self, k), "curr": v}
                setattr(self, k, v)
        if modified:
            logger.info(f"The following config properties were overridden: {modified}")
        return modified

    def validate(self):
        for name in ('budget', 'max_formulas', 'samples', 'pools_per_poset'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise PreconditionError(f"{name} must be a positive integer, got {value!r}", field=name)
        for name in ('depth', 'max_quantifiers'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise PreconditionError(f"{name} must be a natural number, got {value!r}", field=name)
        if self.n_jobs == 0:
            raise PreconditionError("n_jobs must be nonzero", field='n_jobs')
        if self.log_level not in LOG_LEVELS:
            raise PreconditionError(f"log_level must be one of {LOG_LEVELS}, got {self.log_level!r}", field='log_level')

    def to_json(self):
        return {name: getattr(self, name) for name in sorted(self.field_names())}
