import json
import hashlib
import logging

import numpy as np

NORM_KINDS = ("sup", "euclid", "l1")
_NORM_ORDERS = {"sup": np.inf, "euclid": 2, "l1": 1}


class Utils:
    """Utility functions shared across the certification modules"""

    @staticmethod
    def vector_norm(values, kind="sup", axis=-1):
        """
        Codomain norm of vectors stored along one axis

        Args:
            values (array-like): Vectors, coordinates along ``axis``
            kind (str): One of "sup", "euclid", "l1"
            axis (int): Axis holding the coordinates

        Returns:
            numpy.ndarray: Norms with ``axis`` removed
        """
        if kind not in _NORM_ORDERS:
            raise ValueError(f"Unknown norm kind '{kind}', expected one of {NORM_KINDS}")
        values = np.asarray(values, dtype=float)
        if values.shape[axis] == 0:
            return np.zeros(np.delete(values.shape, axis))
        return np.linalg.norm(values, ord=_NORM_ORDERS[kind], axis=axis)

    @staticmethod
    def group_rows(keys):
        """
        Group row indices by identical key rows, groups ordered by first occurrence

        Args:
            keys (numpy.ndarray): 2-D array, one key row per index

        Returns:
            list: Lists of row indices, each sorted ascending
        """
        keys = np.asarray(keys)
        if keys.shape[0] == 0:
            return []
        keys = keys.reshape(keys.shape[0], -1)
        _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        groups = []
        for label in np.argsort(first, kind="stable"):
            groups.append(np.flatnonzero(inverse == label).tolist())
        return groups

    @staticmethod
    def chebyshev_grid(upper, count):
        """Chebyshev-like grid on [0, upper], denser near both ends"""
        k = np.arange(count)
        return upper * (1.0 - np.cos(np.pi * k / max(count - 1, 1))) / 2.0

    @staticmethod
    def eps_grid(scale, depth):
        """Dyadic grid scale * 2^-k for k = 0..depth"""
        return [float(scale) * 2.0 ** (-k) for k in range(depth + 1)]

    @staticmethod
    def _json_default(value):
        if isinstance(value, np.generic):
            return value.item()
        if isinstance(value, np.ndarray):
            return value.tolist()
        if isinstance(value, (set, frozenset)):
            return sorted(value)
        raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")

    @staticmethod
    def canonical_json(document, indent=None):
        """Deterministic JSON text: sorted keys, fixed separators, numpy values as builtins"""
        if indent is None:
            return json.dumps(document, sort_keys=True, separators=(",", ":"), default=Utils._json_default)
        return json.dumps(document, sort_keys=True, indent=indent, default=Utils._json_default)

    @staticmethod
    def content_digest(data):
        """sha256 hex digest of bytes or text"""
        if isinstance(data, str):
            data = data.encode("utf-8")
        return hashlib.sha256(data).hexdigest()

    @staticmethod
    def parse_params(tokens):
        """
        Parse ``key=value`` tokens into a dict, converting numbers where possible

        Args:
            tokens (list): Strings such as ["p=3", "h=0.125"]

        Returns:
            dict: Parsed parameters
        """
        params = {}
        for token in tokens or []:
            if "=" not in token:
                logging.warning(f"Ignoring parameter without '=': {token}")
                continue
            key, raw = token.split("=", 1)
            params[key.strip()] = Utils.parse_number(raw.strip())
        return params

    @staticmethod
    def parse_number(raw):
        """Parse '3', '0.5', '1/8' or a comma list of those; other text is returned unchanged"""
        if "," in raw:
            return [Utils.parse_number(part) for part in raw.split(",") if part]
        try:
            return int(raw)
        except ValueError:
            pass
        try:
            if "/" in raw:
                num, den = raw.split("/", 1)
                return float(num) / float(den)
            return float(raw)
        except ValueError:
            return raw
