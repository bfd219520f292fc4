"""Space-vector geometry, the four studied sequences and pole-voltage synthesis.

Vector ids follow the usual hexagon numbering: V1..V6 counter-clockwise from
the phase-a axis, V0 = (000) and V7 = (111). A sequence is written once for
sector 1 in terms of *roles* (0/7 for the zero vectors, 1 for the active
vector that opens the sector, 2 for the one that closes it); every other
sector is the same pattern rotated by a multiple of 60 degrees.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._csv import write_table
from .errors import DomainError
from .waveforms import PiecewiseConstant

SQRT3_2 = math.sqrt(3.0) / 2.0

#: DC-link voltage reproducing the analytic torque-ripple table with P = 4.
#: Obtained by ``ripple_analysis.calibrate_vdc()`` (relative least squares
#: over every published cell); recomputed and checked in the test-suite.
DEFAULT_VDC = 563.0


class VectorConvention(enum.Enum):
    """Length assigned to an active space vector."""

    FULL_VDC = "full-vdc"  # |V1..V6| = v_dc
    PHYSICAL_TWO_THIRDS = "physical-2/3"  # |V1..V6| = 2/3 v_dc (amplitude-invariant Clarke)


@dataclass(frozen=True)
class DriveConfig:
    """Inverter and open-loop V/f settings."""

    v_dc: float = DEFAULT_VDC
    f_base: float = 50.0
    convention: VectorConvention = VectorConvention.FULL_VDC

    def __post_init__(self):
        if not self.v_dc > 0:
            raise DomainError("v_dc", self.v_dc, "> 0")
        if not self.f_base > 0:
            raise DomainError("f_base", self.f_base, "> 0")

    def f1(self, m):
        """Fundamental frequency under the constant-V/f law."""
        return self.f_base * m

    @property
    def vector_length(self):
        if self.convention is VectorConvention.FULL_VDC:
            return self.v_dc
        return 2.0 * self.v_dc / 3.0

    def v_ref(self, m):
        """Reference space-vector magnitude; m = 1 touches the hexagon's inscribed circle."""
        return SQRT3_2 * m * self.vector_length


class DwellTimes(NamedTuple):
    t1: float
    t2: float
    t0: float
    ts: float


class PlanEntry(NamedTuple):
    sector: int
    alpha: float  # degrees within the sector
    ts: float


# A slot is (role, dwell name, weight); weight is a number or "k" / "1-k".
Slot = tuple


@dataclass(frozen=True)
class SequenceSpec:
    name: str
    samples_per_sector: int
    sample_angles: tuple
    templates: tuple = field(repr=False)
    uses_k: bool = False

    def template(self, sample_index):
        return self.templates[sample_index % len(self.templates)]

    @property
    def label(self):
        return self.name.lower()


SEQUENCES = {
    "CSV": SequenceSpec(
        "CSV",
        3,
        (10.0, 30.0, 50.0),
        (
            ((0, "t0", 0.5), (1, "t1", 1.0), (2, "t2", 1.0), (7, "t0", 0.5)),
            ((7, "t0", 0.5), (2, "t2", 1.0), (1, "t1", 1.0), (0, "t0", 0.5)),
            ((0, "t0", 0.5), (1, "t1", 1.0), (2, "t2", 1.0), (7, "t0", 0.5)),
        ),
    ),
    "ABC1": SequenceSpec(
        "ABC1",
        2,
        (15.0, 45.0),
        (
            ((0, "t0", 1.0), (1, "t1", 0.5), (2, "t2", 1.0), (1, "t1", 0.5)),
            ((1, "t1", 0.5), (2, "t2", 1.0), (1, "t1", 0.5), (0, "t0", 1.0)),
        ),
    ),
    "ABC2": SequenceSpec(
        "ABC2",
        2,
        (15.0, 45.0),
        (
            ((7, "t0", 1.0), (2, "t2", 0.5), (1, "t1", 1.0), (2, "t2", 0.5)),
            ((2, "t2", 0.5), (1, "t1", 1.0), (2, "t2", 0.5), (7, "t0", 1.0)),
        ),
    ),
    "SVHE": SequenceSpec(
        "SVHE",
        2,
        (15.0, 45.0),
        (
            ((0, "t0", 1.0), (1, "t1", "k"), (2, "t2", 1.0), (1, "t1", "1-k")),
            ((7, "t0", 1.0), (2, "t2", "1-k"), (1, "t1", 1.0), (2, "t2", "k")),
        ),
        uses_k=True,
    ),
}


def get_sequence(name):
    """Look up a sequence by name, case-insensitively (``"abc-i"`` works too)."""
    key = str(name).upper().replace("-", "").replace("_", "")
    key = {"ABCI": "ABC1", "ABCII": "ABC2"}.get(key, key)
    try:
        return SEQUENCES[key]
    except KeyError:
        raise DomainError("sequence", name, f"one of {sorted(SEQUENCES)}") from None


def _check_m(m):
    if not (0.0 < m <= 1.0):
        raise DomainError("m", m, "0 < m <= 1")


def _check_k(k):
    if not (0.0 < k < 1.0):
        raise DomainError("k", k, "0 < k < 1")


def dwell_times(m, alpha, ts):
    """Active and zero-vector dwell times for a reference at ``alpha`` degrees.

    With ``V_ref = (sqrt(3)/2) m |V|`` the volt-second solution reduces to
    ``t1 = m sin(60 - alpha) ts`` and ``t2 = m sin(alpha) ts``.
    """
    _check_m(m)
    if not (0.0 <= alpha <= 60.0):
        raise DomainError("alpha", alpha, "0 <= alpha <= 60 degrees")
    if not ts > 0:
        raise DomainError("ts", ts, "> 0")
    a = math.radians(alpha)
    t1 = m * math.sin(math.pi / 3 - a) * ts
    t2 = m * math.sin(a) * ts
    # sin(60 - a) + sin(a) = cos(30 - a); exact zero at m = 1, alpha = 30
    t0 = ts * (1.0 - m * math.cos(math.pi / 6 - a))
    return DwellTimes(t1, t2, t0, ts)


def sample_plan(seq, m, config=DriveConfig()):
    """Time-ordered samples over one fundamental period."""
    _check_m(m)
    n = seq.samples_per_sector
    ts = 1.0 / (6.0 * config.f1(m) * n)
    return [PlanEntry(s, alpha, ts) for s in range(1, 7) for alpha in seq.sample_angles]


def _weight(w, k):
    if w == "k":
        return k
    if w == "1-k":
        return 1.0 - k
    return w


def subcycle_playlist(seq, dwell, k=0.5, sample_index=0):
    """(role id, duration) pairs for one subcycle.

    ``sample_index`` is the 0-based position of the sample inside its sector.
    ``k`` is validated only for sequences that use it.
    """
    if seq.uses_k:
        _check_k(k)
    times = {"t0": dwell.t0, "t1": dwell.t1, "t2": dwell.t2}
    return [(role, times[name] * _weight(w, k)) for role, name, w in seq.template(sample_index)]


_SWITCH_STATES = {
    0: (0, 0, 0),
    1: (1, 0, 0),
    2: (1, 1, 0),
    3: (0, 1, 0),
    4: (0, 1, 1),
    5: (0, 0, 1),
    6: (1, 0, 1),
    7: (1, 1, 1),
}


def vector_switch_state(vector_id):
    """Leg states ``(sa, sb, sc)``; 1 means the upper switch conducts."""
    try:
        return _SWITCH_STATES[int(vector_id)]
    except (KeyError, ValueError, TypeError):
        raise DomainError("vector_id", vector_id, "an integer in 0..7") from None


def sector_vector(role, sector):
    """Map a sector-1 role onto the actual vector id used in ``sector``.

    A 60 degree rotation turns (000) into (111), so zero vectors swap in even
    sectors; this keeps every in-subcycle transition a single-leg switching.
    """
    if role in (0, 7):
        return role if sector % 2 == 1 else 7 - role
    return (role - 1 + sector - 1) % 6 + 1


def vector_alpha_beta(vector_id, config=DriveConfig()):
    """Space vector as a complex number under ``config.convention``."""
    vector_switch_state(vector_id)
    if vector_id in (0, 7):
        return 0j
    return config.vector_length * np.exp(1j * math.pi / 3 * (vector_id - 1))


@dataclass(frozen=True)
class ThreePhaseWaveform:
    """Pole voltages (referred to the DC midpoint) over one fundamental period.

    All phases share one breakpoint grid: ``starts[i]`` opens the interval in
    which space vector ``vector_ids[i]`` is applied.
    """

    starts: np.ndarray
    levels: np.ndarray  # shape (N, 3), volts
    vector_ids: np.ndarray
    period: float
    v_dc: float
    m: float = float("nan")
    k: float = float("nan")
    sequence: str = ""

    def phase(self, i):
        """Pole voltage of phase ``i`` (0 = a) as a :class:`PiecewiseConstant`."""
        return PiecewiseConstant(self.starts, self.levels[:, i], self.period)

    def line_voltage(self, i, j):
        return PiecewiseConstant(self.starts, self.levels[:, i] - self.levels[:, j], self.period)

    def phase_voltages(self):
        """Star-point voltages of an isolated-neutral load (common mode removed)."""
        cm = self.levels.mean(axis=1, keepdims=True)
        return PiecewiseConstant(self.starts, self.levels - cm, self.period)

    @property
    def durations(self):
        return np.append(self.starts[1:], self.period) - self.starts

    def to_csv(self, path, comment=None):
        rows = [(t, *lv) for t, lv in zip(self.starts, self.levels)]
        write_table(path, ("t_s", "va_V", "vb_V", "vc_V"), rows, comment=comment)


def pole_voltage_waveform(seq, m, k=0.5, config=DriveConfig()):
    """Concatenate every subcycle of one fundamental period into pole voltages."""
    plan = sample_plan(seq, m, config)
    n = seq.samples_per_sector
    ids, durs = [], []
    for i, (sector, alpha, ts) in enumerate(plan):
        dwell = dwell_times(m, alpha, ts)
        for role, d in subcycle_playlist(seq, dwell, k, i % n):
            if d > 0:
                ids.append(sector_vector(role, sector))
                durs.append(d)
    ids = np.array(ids, dtype=int)
    states = np.array([_SWITCH_STATES[v] for v in ids], dtype=float)
    starts = np.concatenate(([0.0], np.cumsum(durs)[:-1]))
    period = 1.0 / config.f1(m)
    return ThreePhaseWaveform(
        starts=starts,
        levels=(states - 0.5) * config.v_dc,
        vector_ids=ids,
        period=period,
        v_dc=config.v_dc,
        m=m,
        k=k if seq.uses_k else float("nan"),
        sequence=seq.name,
    )


def switching_count(w):
    """Level transitions per phase over one period, wrap-around included only if it switches."""
    lv = w.levels
    changes = lv != np.roll(lv, 1, axis=0)
    counts = tuple(int(c) for c in changes.sum(axis=0))
    return counts, sum(counts)
