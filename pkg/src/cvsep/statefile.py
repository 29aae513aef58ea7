"""Flat text formats for states, probe parameters, and coefficient tables.

Every file is line-oriented: ``#`` starts a comment, blank lines are
skipped, and each record is a key followed by whitespace-separated
values.  Floats are written with ``repr`` so a written file re-parses to
bit-identical numbers.

State file (covariance rows appear in order, one per line)::

    n 2
    cov 1.0 0.0 0.0 0.0
    cov 0.0 1.0 0.0 0.0
    cov 0.0 0.0 1.0 0.0
    cov 0.0 0.0 0.0 1.0
    mean 0.0 0.0 0.0 0.0          # optional, default zeros
    poly 2 0 0 0 1.5 0.0          # optional: 2n exponents, re, im

Probe file::

    n 2
    s 0.5 -0.25
    theta 0.0 1.2
    x 0.1 0.0 -0.3 0.2

Coefficient file (values in canonical bipartition enumeration order)::

    k 2
    a 0.3333 0.3333 0.3333
"""

import numpy as np

from .errors import StateFileError, ValidationError
from .hierarchy import CoefficientScheme
from .optimize import ProbeParameterization
from .polynomials import MultiPoly, PolyGaussianState
from .symplectic import GaussianEnvelope

__all__ = [
    "load_state",
    "save_state",
    "load_probe",
    "save_probe",
    "load_coefficients",
]


def _records(path):
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            out.append((lineno, parts[0], parts[1:]))
    return out


def _floats(values, lineno, key):
    try:
        return [float(v) for v in values]
    except ValueError:
        raise StateFileError("non-numeric value in '%s' record" % key, lineno)


def _ints(values, lineno, key):
    try:
        return [int(v) for v in values]
    except ValueError:
        raise StateFileError("non-integer value in '%s' record" % key, lineno)


def _parse_n(records, path):
    if not records:
        raise StateFileError("%s is empty" % path, 0)
    lineno, key, values = records[0]
    if key != "n" or len(values) != 1:
        raise StateFileError("first record must be 'n <mode count>'", lineno)
    n = _ints(values, lineno, "n")[0]
    if n < 1:
        raise StateFileError("mode count must be positive", lineno)
    return n


def load_state(path):
    """Parse a state file into a physical PolyGaussianState."""
    records = _records(path)
    n = _parse_n(records, path)
    d = 2 * n
    cov_rows = []
    cov_lines = []
    mean = None
    terms = {}
    for lineno, key, values in records[1:]:
        if key == "cov":
            if len(values) != d:
                raise StateFileError(
                    "covariance row needs %d entries, got %d" % (d, len(values)),
                    lineno,
                )
            cov_rows.append(_floats(values, lineno, "cov"))
            cov_lines.append(lineno)
        elif key == "mean":
            if mean is not None:
                raise StateFileError("duplicate 'mean' record", lineno)
            if len(values) != d:
                raise StateFileError(
                    "mean needs %d entries, got %d" % (d, len(values)), lineno
                )
            mean = _floats(values, lineno, "mean")
        elif key == "poly":
            if len(values) != d + 2:
                raise StateFileError(
                    "poly record needs %d exponents plus re and im" % d, lineno
                )
            expo = tuple(_ints(values[:d], lineno, "poly"))
            if any(e < 0 for e in expo):
                raise StateFileError("poly exponents must be nonnegative", lineno)
            re, im = _floats(values[d:], lineno, "poly")
            terms[expo] = terms.get(expo, 0.0) + complex(re, im)
        elif key == "n":
            raise StateFileError("duplicate 'n' record", lineno)
        else:
            raise StateFileError("unknown record '%s'" % key, lineno)
    if len(cov_rows) != d:
        raise StateFileError(
            "expected %d covariance rows, found %d" % (d, len(cov_rows)),
            cov_lines[-1] if cov_lines else 0,
        )
    poly = MultiPoly(d, terms) if terms else None
    try:
        envelope = GaussianEnvelope(
            np.array(cov_rows), None if mean is None else np.array(mean)
        )
        return PolyGaussianState(envelope, poly)
    except ValidationError as exc:
        raise StateFileError(str(exc), cov_lines[0] if cov_lines else 0)


def save_state(path, state):
    """Write a state file that re-parses to bit-identical matrices."""
    with open(path, "w") as fh:
        fh.write("n %d\n" % state.n)
        for row in np.asarray(state.cov):
            fh.write("cov " + " ".join(repr(float(v)) for v in row) + "\n")
        if np.abs(state.mean).max(initial=0.0) != 0.0:
            fh.write("mean " + " ".join(repr(float(v)) for v in state.mean) + "\n")
        if not (state.poly.is_constant()
                and abs(state.poly.constant_value() - 1.0) == 0.0):
            for expo in sorted(state.poly.terms):
                coeff = complex(state.poly.terms[expo])
                fh.write(
                    "poly %s %s %s\n"
                    % (" ".join(str(e) for e in expo),
                       repr(coeff.real), repr(coeff.imag))
                )


def load_probe(path):
    """Parse a probe file into a ProbeParameterization."""
    records = _records(path)
    n = _parse_n(records, path)
    fields = {}
    sizes = {"s": n, "theta": n, "x": 2 * n}
    for lineno, key, values in records[1:]:
        if key not in sizes:
            raise StateFileError("unknown record '%s'" % key, lineno)
        if key in fields:
            raise StateFileError("duplicate '%s' record" % key, lineno)
        if len(values) != sizes[key]:
            raise StateFileError(
                "'%s' needs %d entries, got %d" % (key, sizes[key], len(values)),
                lineno,
            )
        fields[key] = _floats(values, lineno, key)
    missing = sorted(set(sizes) - set(fields))
    if missing:
        raise StateFileError("missing record(s): %s" % ", ".join(missing), 0)
    try:
        return ProbeParameterization(
            np.array(fields["s"]), np.array(fields["theta"]), np.array(fields["x"])
        )
    except ValidationError as exc:
        raise StateFileError(str(exc), 0)


def save_probe(path, probe):
    with open(path, "w") as fh:
        fh.write("n %d\n" % probe.n)
        for key in ("s", "theta", "x"):
            vals = getattr(probe, key)
            fh.write(key + " " + " ".join(repr(float(v)) for v in vals) + "\n")


def load_coefficients(path, n):
    """Parse a coefficient table for an n-mode state into a scheme."""
    records = _records(path)
    if not records:
        raise StateFileError("%s is empty" % path, 0)
    k = None
    values = None
    for lineno, key, vals in records:
        if key == "k":
            if k is not None:
                raise StateFileError("duplicate 'k' record", lineno)
            if len(vals) != 1:
                raise StateFileError("'k' needs one value", lineno)
            k = _ints(vals, lineno, "k")[0]
        elif key == "a":
            if values is not None:
                raise StateFileError("duplicate 'a' record", lineno)
            values = _floats(vals, lineno, "a")
        else:
            raise StateFileError("unknown record '%s'" % key, lineno)
    if k is None or values is None:
        raise StateFileError("coefficient file needs 'k' and 'a' records", 0)
    try:
        return CoefficientScheme.custom(k, n, values)
    except ValidationError as exc:
        raise StateFileError(str(exc), 0)
