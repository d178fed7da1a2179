import os


class EngineConfig:
    """Configuration for the string-topology pipeline"""

    # Word-length settings
    MAX_WORD_LENGTH_CAP = 24    # Hard cap for automatic connection extension
    TRUNCATION_MARGIN = 2       # Extra word length for the truncation-exactness check

    # Parallelism (1 = sequential, output is identical either way)
    WORKERS = 4

    # Brute-force oracle
    ORACLE_ARITY_CAP = 12       # Refuse windows needing longer bar words

    # Output
    DEFAULT_FORMAT = "tsv"
    COLOR = os.environ.get("DGLOOPS_COLOR", "").lower() in ("1", "true", "yes")

    def __init__(self, **overrides):
        for key, value in overrides.items():
            attr = key.upper()
            if not hasattr(type(self), attr):
                raise AttributeError(f"Unknown setting: {key}")
            setattr(self, attr, value)
