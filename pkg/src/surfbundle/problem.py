"""Problem files: JSON documents describing monodromy, lifts and an optional second fibering.

Validation errors carry the line of the nearest enclosing JSON object or array.

    {
      "version": "1",
      "genus_fiber": 2,
      "genus_base": 2,
      "johnson_kernel": true,
      "e_param": 0,
      "monodromy": [
        {"generator": "a1", "matrix": "identity", "tau": [0, 0, 0, 0]},
        ...
      ],
      "second_fibering": {"genus_base2": 2, "P": [[...]], "Q": [[...]], "d": 1}
    }

``matrix`` is a list of rows or the string "identity".  ``tau`` and the
optional ``tau_alt`` (a second lift of the same class) are TriCovectors.
``e_param`` may be null to leave C.C unspecified.
"""

import json
import json.decoder
import json.scanner
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .bundle_ring import BASE_PREFIX
from .errors import NonSymplecticError, ProblemFileError, SurfBundleError
from .fibering import MonodromyData, SecondFiberingData
from .symplectic import SymplecticLattice, check_symplectic


class _LocatingDecoder(json.JSONDecoder):
    """JSON decoder that remembers the starting line of every object and array."""

    def __init__(self):
        super().__init__()
        self.lines = {}
        self._keep = []

        def parse_object(s_and_end, *args):
            s, end = s_and_end
            obj, new_end = json.decoder.JSONObject(s_and_end, *args)
            self._record(obj, s, end)
            return obj, new_end

        def parse_array(s_and_end, scan_once, *args):
            s, end = s_and_end
            arr, new_end = json.decoder.JSONArray(s_and_end, scan_once, *args)
            self._record(arr, s, end)
            return arr, new_end

        self.parse_object = parse_object
        self.parse_array = parse_array
        self.scan_once = json.scanner.py_make_scanner(self)

    def _record(self, obj, s, end):
        self._keep.append(obj)
        self.lines[id(obj)] = s.count("\n", 0, end) + 1


def parse_with_lines(text):
    """Return (document, {id(container): line})."""
    dec = _LocatingDecoder()
    try:
        doc = dec.decode(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    return doc, dec.lines


@dataclass
class Generator:
    label: str
    matrix: np.ndarray
    tau: Optional[np.ndarray] = None
    tau_alt: Optional[np.ndarray] = None
    line: Optional[int] = None


@dataclass
class Problem:
    version: str
    genus_fiber: int
    genus_base: int
    generators: list
    johnson_kernel: bool = False
    e_param: Optional[int] = 0
    second_fibering: Optional[SecondFiberingData] = None
    second_fibering_line: Optional[int] = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def fiber(self):
        return SymplecticLattice(self.genus_fiber, ("x", "y"))

    def check_symplectic(self):
        for gen in self.generators:
            try:
                check_symplectic(self.fiber, gen.matrix, name=f"monodromy of {gen.label}")
            except NonSymplecticError as exc:
                raise ProblemFileError(str(exc), line=gen.line) from exc

    def monodromy(self):
        return MonodromyData.create(
            self.genus_fiber,
            self.genus_base,
            [g.matrix for g in self.generators],
            [g.tau for g in self.generators],
            kernel_declared=self.johnson_kernel,
            e_param=self.e_param,
        )

    def require_taus(self):
        for gen in self.generators:
            if gen.tau is None:
                raise ProblemFileError(f"generator {gen.label} has no tau lift", line=gen.line)

    def require_torelli(self):
        n = 2 * self.genus_fiber
        for gen in self.generators:
            if not np.array_equal(gen.matrix, np.eye(n, dtype=np.int64)):
                raise ProblemFileError(
                    f"monodromy of {gen.label} is not the identity; the bundle ring needs Torelli monodromy",
                    line=gen.line,
                )

    def bundle_data(self):
        self.check_symplectic()
        self.require_torelli()
        self.require_taus()
        return self.monodromy().bundle_data()


def _fail(msg, lines, node):
    raise ProblemFileError(msg, line=lines.get(id(node)))


def _int(value, what, lines, node, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{what} must be an integer, got {value!r}", lines, node)
    return value


def _int_matrix(value, rows, cols, what, lines, parent):
    if value == "identity" and rows == cols:
        return np.eye(rows, dtype=np.int64)
    node = value if isinstance(value, list) else parent
    if not isinstance(value, list) or len(value) != rows:
        _fail(f"{what} must be a list of {rows} rows", lines, node)
    for row in value:
        if not isinstance(row, list) or len(row) != cols:
            _fail(f"{what} rows must have {cols} entries", lines, row if isinstance(row, list) else value)
        for v in row:
            _int(v, f"{what} entry", lines, row)
    return np.array(value, dtype=np.int64).reshape(rows, cols)


def _int_vector(value, n, what, lines, parent):
    node = value if isinstance(value, list) else parent
    if not isinstance(value, list) or len(value) != n:
        got = len(value) if isinstance(value, list) else type(value).__name__
        _fail(f"{what} must be a list of {n} integers, got {got}", lines, node)
    for v in value:
        _int(v, f"{what} entry", lines, value)
    return np.array(value, dtype=np.int64)


_TOP_KEYS = {"version", "genus_fiber", "genus_base", "monodromy", "johnson_kernel", "e_param", "second_fibering"}
_GEN_KEYS = {"generator", "matrix", "tau", "tau_alt"}
_SECOND_KEYS = {"genus_base2", "P", "Q", "d"}


def parse_problem(text):
    doc, lines = parse_with_lines(text)
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must be a JSON object", line=1)
    extra = set(doc) - _TOP_KEYS
    if extra:
        _fail(f"unknown field {sorted(extra)[0]!r}", lines, doc)
    for key in ("version", "genus_fiber", "genus_base", "monodromy"):
        if key not in doc:
            _fail(f"missing required field {key!r}", lines, doc)
    if not isinstance(doc["version"], str):
        _fail("version must be a string", lines, doc)
    g = _int(doc["genus_fiber"], "genus_fiber", lines, doc)
    h = _int(doc["genus_base"], "genus_base", lines, doc)
    for name, val in (("genus_fiber", g), ("genus_base", h)):
        if val < 2:
            _fail(f"{name} must be at least 2, got {val}", lines, doc)
    kernel = doc.get("johnson_kernel", False)
    if not isinstance(kernel, bool):
        _fail("johnson_kernel must be true or false", lines, doc)
    e = _int(doc.get("e_param", 0), "e_param", lines, doc, allow_none=True)

    labels = SymplecticLattice(h, BASE_PREFIX).labels
    mono = doc["monodromy"]
    if not isinstance(mono, list):
        _fail("monodromy must be a list", lines, doc)
    n = 2 * g
    ntri = comb(n, 3)
    by_label = {}
    for entry in mono:
        if not isinstance(entry, dict):
            _fail("monodromy entries must be objects", lines, mono)
        extra = set(entry) - _GEN_KEYS
        if extra:
            _fail(f"unknown field {sorted(extra)[0]!r} in monodromy entry", lines, entry)
        lab = entry.get("generator")
        if lab not in labels:
            _fail(f"generator label {lab!r} is not one of {', '.join(labels)}", lines, entry)
        if lab in by_label:
            _fail(f"generator {lab} appears twice", lines, entry)
        if "matrix" not in entry:
            _fail(f"generator {lab} has no matrix", lines, entry)
        mat = _int_matrix(entry["matrix"], n, n, f"matrix of {lab}", lines, entry)
        tau = entry.get("tau")
        tau = None if tau is None else _int_vector(tau, ntri, f"tau of {lab}", lines, entry)
        alt = entry.get("tau_alt")
        alt = None if alt is None else _int_vector(alt, ntri, f"tau_alt of {lab}", lines, entry)
        by_label[lab] = Generator(lab, mat, tau, alt, lines.get(id(entry)))
    missing = [lab for lab in labels if lab not in by_label]
    if missing:
        _fail(f"no monodromy given for generator {missing[0]}", lines, mono)
    gens = [by_label[lab] for lab in labels]

    second = None
    second_line = None
    if doc.get("second_fibering") is not None:
        sf = doc["second_fibering"]
        if not isinstance(sf, dict):
            _fail("second_fibering must be an object", lines, doc)
        extra = set(sf) - _SECOND_KEYS
        if extra:
            _fail(f"unknown field {sorted(extra)[0]!r} in second_fibering", lines, sf)
        for key in ("genus_base2", "P", "Q"):
            if key not in sf:
                _fail(f"second_fibering is missing {key!r}", lines, sf)
        h2 = _int(sf["genus_base2"], "genus_base2", lines, sf)
        if h2 < 2:
            _fail(f"genus_base2 must be at least 2, got {h2}", lines, sf)
        p = _int_matrix(sf["P"], 2 * h, 2 * h2, "P", lines, sf)
        q = _int_matrix(sf["Q"], n, 2 * h2, "Q", lines, sf)
        d = _int(sf.get("d"), "d", lines, sf, allow_none=True)
        second_line = lines.get(id(sf))
        try:
            second = SecondFiberingData.create(h2, p, q, d)
        except SurfBundleError as exc:
            raise ProblemFileError(str(exc), line=second_line) from None

    return Problem(doc["version"], g, h, gens, kernel, e, second, second_line, doc)


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
