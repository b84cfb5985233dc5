"""Angular-velocity profiles for the command-line harness.

Every profile maps an array of times (s) to an ``(n, 3)`` array of body
rates (rad/s) and also accepts a scalar time.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TUMBLE_TERMS = 5


class ProfileError(ValueError):
    pass


def _vec3(text: str, what: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise ProfileError(f"{what}: expected 3 comma-separated numbers, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ProfileError(f"{what}: not a number in {text!r}") from None


class RateProfile:
    kind = "abstract"

    def rates(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w = self.rates(np.atleast_1d(t))
        return w[0] if t.ndim == 0 else w


@dataclass
class ConstantProfile(RateProfile):
    omega: np.ndarray
    kind = "constant"

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float).reshape(3)

    def rates(self, t):
        return np.broadcast_to(self.omega, (t.size, 3)).copy()


@dataclass
class SinusoidProfile(RateProfile):
    """``omega(t) = amplitude * sin(2 pi frequency t + phase)`` per axis."""

    amplitude: np.ndarray
    frequency: float
    phase: float = 0.0
    kind = "sinusoid"

    def __post_init__(self):
        self.amplitude = np.asarray(self.amplitude, dtype=float).reshape(3)

    def rates(self, t):
        s = np.sin(2.0 * np.pi * self.frequency * t + self.phase)
        return s[:, None] * self.amplitude


@dataclass
class TumbleProfile(RateProfile):
    """Seeded sum of random-phase sinusoids per axis, band-limited.

    Frequencies are drawn from ``[bandwidth / 10, bandwidth]`` Hz and the
    amplitudes are scaled so the RMS of ``|omega|`` is ``rms``.
    """

    seed: int
    bandwidth: float
    rms: float
    kind = "tumble"
    freqs: np.ndarray = field(init=False, repr=False)
    phases: np.ndarray = field(init=False, repr=False)
    amps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.bandwidth <= 0 or self.rms < 0:
            raise ProfileError("tumble needs bandwidth > 0 and rms >= 0")
        rng = np.random.default_rng(self.seed)
        shape = (TUMBLE_TERMS, 3)
        self.freqs = rng.uniform(0.1 * self.bandwidth, self.bandwidth, shape)
        self.phases = rng.uniform(0.0, 2.0 * np.pi, shape)
        raw = rng.uniform(0.5, 1.5, shape)
        # mean square of a sinusoid is a^2 / 2; split rms^2 evenly over axes
        axis_ms = 0.5 * np.sum(raw**2, axis=0)
        self.amps = raw * np.sqrt(self.rms**2 / 3.0 / axis_ms)

    def rates(self, t):
        out = np.zeros((t.size, 3))
        for k in range(TUMBLE_TERMS):
            arg = 2.0 * np.pi * self.freqs[k] * t[:, None] + self.phases[k]
            out += self.amps[k] * np.sin(arg)
        return out


@dataclass
class CsvProfile(RateProfile):
    """Zero-order hold over samples, clamped to the end samples outside range."""

    times: np.ndarray
    samples: np.ndarray
    path: str = ""
    kind = "csv"

    def rates(self, t):
        idx = np.searchsorted(self.times, t, side="right") - 1
        idx = np.clip(idx, 0, self.times.size - 1)
        return self.samples[idx]


def load_rate_csv(path) -> CsvProfile:
    """Read ``t,wx,wy,wz`` rows with strictly increasing ``t``.

    A first line that is not numeric is taken as a header. Blank lines are
    skipped.
    """
    path = Path(path)
    times, samples = [], []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ProfileError(f"{path}:{lineno}: expected 4 fields t,wx,wy,wz, got {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                if lineno == 1:
                    continue
                raise ProfileError(f"{path}:{lineno}: non-numeric field in {row}") from None
            if not all(np.isfinite(vals)):
                raise ProfileError(f"{path}:{lineno}: non-finite value")
            if times and vals[0] <= times[-1]:
                raise ProfileError(f"{path}:{lineno}: time {vals[0]} does not increase")
            times.append(vals[0])
            samples.append(vals[1:])
    if not times:
        raise ProfileError(f"{path}: no rate samples")
    return CsvProfile(np.array(times), np.array(samples), str(path))


def parse_profile(text: str, default_seed: int = 0) -> RateProfile:
    """Parse ``constant:x,y,z``, ``sinusoid:ax,ay,az:f:phase``,
    ``tumble:seed:bw:rms`` (empty seed uses ``default_seed``) or ``csv:PATH``."""
    kind, _, rest = text.partition(":")
    if kind == "constant":
        return ConstantProfile(_vec3(rest, "constant profile"))
    if kind == "sinusoid":
        parts = rest.split(":")
        if len(parts) != 3:
            raise ProfileError("sinusoid profile is sinusoid:ax,ay,az:freq_hz:phase_rad")
        try:
            return SinusoidProfile(_vec3(parts[0], "sinusoid amplitude"),
                                   float(parts[1]), float(parts[2]))
        except ValueError:
            raise ProfileError(f"bad sinusoid frequency or phase in {text!r}") from None
    if kind == "tumble":
        parts = rest.split(":")
        if len(parts) != 3:
            raise ProfileError("tumble profile is tumble:seed:bandwidth_hz:rms_rad_s")
        try:
            seed = int(parts[0]) if parts[0] else default_seed
            return TumbleProfile(seed, float(parts[1]), float(parts[2]))
        except ValueError:
            raise ProfileError(f"bad tumble parameters in {text!r}") from None
    if kind == "csv":
        if not rest:
            raise ProfileError("csv profile needs a path: csv:PATH")
        try:
            return load_rate_csv(rest)
        except OSError as exc:
            raise ProfileError(f"cannot read rate file: {exc}") from None
    raise ProfileError(f"unknown profile kind {kind!r}")
