import math
from typing import Dict, Iterable, List, Optional, Tuple

from core.errors import ParameterError


class Validator:
    """Input validation utilities"""

    @staticmethod
    def validate_exponent(value: float) -> bool:
        """Validate a weight exponent (must exceed -1)"""
        return math.isfinite(value) and value > -1.0

    @staticmethod
    def validate_index(k: int, n: int) -> bool:
        """Validate a basis index 0 <= k <= n"""
        return 0 <= k <= n

    @staticmethod
    def validate_delta(delta: float) -> bool:
        return math.isfinite(delta) and delta > 0.0

    @staticmethod
    def require_exponents(**exponents: float):
        """Raise ParameterError naming every exponent that is <= -1"""
        bad = [f"{name}={value}" for name, value in exponents.items()
               if not Validator.validate_exponent(value)]
        if bad:
            raise ParameterError(f"exponents must be > -1: {', '.join(bad)}")

    @staticmethod
    def require_index(k: int, n: int):
        if not Validator.validate_index(k, n):
            raise ParameterError(f"index needs 0 <= k <= n, got k={k}, n={n}")

    @staticmethod
    def parse_real(text: str) -> Optional[float]:
        """Parse a decimal real; nan and infinities are rejected"""
        try:
            value = float(text.strip())
        except (ValueError, AttributeError):
            return None
        return value if math.isfinite(value) else None

    @staticmethod
    def parse_assignments(items: Iterable[str]) -> Tuple[Dict[str, str], List[str]]:
        """
        Split key=value items whose value is a decimal real.
        The decimal text is kept as typed so that reports can echo it exactly.
        Returns Tuple[valid_mapping, invalid_items].
        Example: ["a=1", "x=0.2", "b", "c=one"] -> ({"a": "1", "x": "0.2"}, ["b", "c=one"])
        """
        valid = {}
        invalid = []
        for item in items:
            key, sep, raw = item.partition('=')
            value = Validator.parse_real(raw) if sep else None
            if not key.strip() or value is None:
                invalid.append(item)
            else:
                valid[key.strip()] = raw.strip()
        return valid, invalid

    @staticmethod
    def parse_config_lines(lines: Iterable[str]) -> Tuple[Dict[str, str], List[str]]:
        """
        Parse plain key=value config lines; blank lines and '#' comments are skipped.
        Returns Tuple[mapping, malformed_lines].
        """
        values = {}
        malformed = []
        for line in lines:
            text = line.strip()
            if not text or text.startswith('#'):
                continue
            key, sep, raw = text.partition('=')
            if not sep or not key.strip():
                malformed.append(line.rstrip('\n'))
                continue
            values[key.strip()] = raw.strip()
        return values, malformed
