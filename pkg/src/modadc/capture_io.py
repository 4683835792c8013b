"""Capture files: ``#`` header lines followed by a CSV table.

Columns are ``index,t_seconds,y_volts,k_signed,gate``. Floats are written
with ``repr`` (shortest round-trip form), so reading a file back gives the
exact same arrays.
"""

import csv
import dataclasses
import warnings

import numpy as np

from .config import format_value, parse_value
from .sim import AdcConfig, Capture

COLUMNS = ("index", "t_seconds", "y_volts", "k_signed", "gate")
SIGNAL_COLUMNS = ("index", "t_seconds", "g_volts")
MAGIC = "modadc-capture v1"


class CaptureFormatError(ValueError):
    pass


def _fmt(x):
    return repr(float(x))


def write_capture(path, cap: Capture):
    lines = [f"# {MAGIC}", f"# fs_hz={_fmt(cap.fs_hz)}", f"# lambda_volts={_fmt(cap.lambda_volts)}"]
    if cap.adc is not None:
        for f in dataclasses.fields(cap.adc):
            lines.append(f"# adc.{f.name}={format_value(getattr(cap.adc, f.name))}")
    for key in sorted(cap.meta):
        lines.append(f"# meta.{key}={cap.meta[key]}")
    lines.append(",".join(COLUMNS))
    fs = cap.fs_hz
    for i in range(len(cap)):
        lines.append(f"{i},{_fmt(i / fs)},{_fmt(cap.y[i])},{int(cap.k[i])},{int(cap.gate[i])}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_table(path, expected):
    """Header dict and raw rows (with line numbers) of a ``#``-headed CSV."""
    header, rows, columns = {}, [], None
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                key, sep, value = text[1:].strip().partition("=")
                if sep:
                    header[key.strip()] = value.strip()
                continue
            fields = next(csv.reader([text]))
            if columns is None:
                columns = [c.strip() for c in fields]
                if tuple(columns) != expected:
                    missing = [c for c in expected if c not in columns]
                    detail = f"missing column(s) {missing}" if missing else f"unexpected columns {columns}"
                    raise CaptureFormatError(f"{path}:{lineno}: {detail}; expected {','.join(expected)}")
                continue
            if len(fields) != len(expected):
                raise CaptureFormatError(f"{path}:{lineno}: expected {len(expected)} fields, got {len(fields)}")
            rows.append((lineno, fields))
    if columns is None:
        raise CaptureFormatError(f"{path}: no column header line")
    return header, rows


def _header_float(header, key, path):
    if key not in header:
        raise CaptureFormatError(f"{path}: header lacks {key}")
    try:
        return float(header[key])
    except ValueError:
        raise CaptureFormatError(f"{path}: bad {key} value {header[key]!r}") from None


def _check_index_and_time(path, idx, t, fs, row_lines):
    if len(idx) and np.any(np.diff(idx) <= 0):
        bad = int(np.argmax(np.diff(idx) <= 0)) + 1
        raise CaptureFormatError(f"{path}:{row_lines[bad]}: index is not increasing")
    if len(t) > 1:
        expected = idx / fs
        if not np.allclose(t, expected, rtol=1e-9, atol=1e-12):
            spacing = float(np.median(np.diff(t) / np.diff(idx)))
            warnings.warn(
                f"{path}: t_seconds spacing {spacing:.9g} s disagrees with header fs_hz={fs:.9g}",
                stacklevel=3,
            )


def read_capture(path) -> Capture:
    header, rows = _read_table(path, COLUMNS)
    fs = _header_float(header, "fs_hz", path)
    lam = _header_float(header, "lambda_volts", path)
    idx, t, y, k, gate = [], [], [], [], []
    for lineno, fields in rows:
        try:
            idx.append(int(fields[0]))
            t.append(float(fields[1]))
            y.append(float(fields[2]))
            k.append(int(fields[3]))
            g = int(fields[4])
        except ValueError as exc:
            raise CaptureFormatError(f"{path}:{lineno}: {exc}") from None
        if g not in (0, 1):
            raise CaptureFormatError(f"{path}:{lineno}: gate must be 0 or 1, got {g}")
        gate.append(g)
    _check_index_and_time(path, np.array(idx), np.array(t), fs, [ln for ln, _ in rows])

    adc = None
    adc_keys = {k[4:]: v for k, v in header.items() if k.startswith("adc.")}
    if adc_keys:
        hints = {f.name: f for f in dataclasses.fields(AdcConfig)}
        kwargs = {}
        for name, text in adc_keys.items():
            if name not in hints:
                raise CaptureFormatError(f"{path}: unknown header key adc.{name}")
            default = hints[name].default
            kwargs[name] = parse_value(text, type(default), default)
        adc = AdcConfig(**kwargs)
    meta = {k[5:]: v for k, v in header.items() if k.startswith("meta.")}
    return Capture(y=np.array(y), k=np.array(k), gate=np.array(gate), fs_hz=fs, lambda_volts=lam, adc=adc, meta=meta)


def write_signal(path, g, fs_hz, fine_grid_factor=1):
    """Sampled input waveform; rows run at ``fs_hz * fine_grid_factor``."""
    rate = fs_hz * fine_grid_factor
    lines = [f"# fs_hz={_fmt(fs_hz)}", f"# fine_grid_factor={int(fine_grid_factor)}", ",".join(SIGNAL_COLUMNS)]
    lines += [f"{i},{_fmt(i / rate)},{_fmt(v)}" for i, v in enumerate(np.asarray(g, dtype=float))]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_signal(path):
    """Returns ``(g, fs_hz, fine_grid_factor)``."""
    header, rows = _read_table(path, SIGNAL_COLUMNS)
    fs = _header_float(header, "fs_hz", path)
    m = int(header.get("fine_grid_factor", "1"))
    idx, t, g = [], [], []
    for lineno, fields in rows:
        try:
            idx.append(int(fields[0]))
            t.append(float(fields[1]))
            g.append(float(fields[2]))
        except ValueError as exc:
            raise CaptureFormatError(f"{path}:{lineno}: {exc}") from None
    _check_index_and_time(path, np.array(idx), np.array(t), fs * m, [ln for ln, _ in rows])
    return np.array(g), fs, m
