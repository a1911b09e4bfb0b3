"""Configuration and constants for prefasp."""

from pathlib import Path

PACKAGE_DIR = Path(__file__).resolve().parent
ASSETS_DIR = PACKAGE_DIR / "assets"
CORPUS_DIR = PACKAGE_DIR / "corpus"

DEFAULT_ENUMERATION_LIMIT = 9
DEFAULT_PVD_LIMIT = 8
DEFAULT_TIMEOUT = 0
DEFAULT_SEED = 7
DEFAULT_RANDOM_PROGRAMS = 200

RULE_ID_PREFIX = "r"
RULE_ID_WIDTH = 3
CONSTRAINT_ATOM_PREFIX = "bad_"
EMPTY_UNIVERSE_CONSTANT = "u0"

RANDOM_MAX_RULES = 5
RANDOM_MAX_ATOMS = 4
