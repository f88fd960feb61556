"""Time-dependent Lindblad models: schedules, validation, per-time snapshots.

A model bundles a Hamiltonian schedule H(t) with a list of damping channels
(L_n(t), alpha_n(t)). Rates alpha_n must stay nonnegative and H must stay
Hermitian at every evaluated time; ``LindbladModel.validate`` reports
violations, ``LindbladModel.snapshot`` refuses them.

Schedule kinds are deliberately few: constant, sinusoidal (scalars only),
tabulated with linear interpolation and no extrapolation, and a scalar
schedule scaling a fixed operator. Anything fancier belongs in user code
producing tables.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import numbers

import numpy as np

from . import linalg
from .errors import ConfigError, ModelValidationError, ScheduleDomainError

# Hermiticity tolerance for H(t), relative to its maxabs (floor 1e-14).
HAMILTONIAN_HERMITICITY_RTOL = 1e-10

# Slack for tabulated-domain checks: integrator endpoints land on the table
# edges up to roundoff, which must not count as extrapolation.
_DOMAIN_RTOL = 1e-12


class Schedule:
    """Scalar- or operator-valued function of time. Use the factory functions."""

    name = "schedule"

    def __call__(self, t: float):
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False

    @property
    def is_operator_valued(self) -> bool:
        raise NotImplementedError


class _Constant(Schedule):
    def __init__(self, value, name="constant"):
        if isinstance(value, numbers.Real):
            self.value = float(value)
            if not math.isfinite(self.value):
                raise ValueError(f"{name}: constant value must be finite")
        else:
            self.value = linalg.as_operator(value)
            if not np.all(np.isfinite(self.value)):
                raise ValueError(f"{name}: constant operator has non-finite entries")
        self.name = name

    def __call__(self, t):
        return self.value

    @property
    def is_constant(self):
        return True

    @property
    def is_operator_valued(self):
        return isinstance(self.value, np.ndarray)


class _Sinusoidal(Schedule):
    """offset + amplitude * sin(omega * t + phase); scalar-valued only."""

    def __init__(self, offset, amplitude, omega, phase=0.0, name="sinusoidal"):
        params = (float(offset), float(amplitude), float(omega), float(phase))
        if not all(math.isfinite(p) for p in params):
            raise ValueError(f"{name}: sinusoidal parameters must be finite")
        self.offset, self.amplitude, self.omega, self.phase = params
        self.name = name

    def __call__(self, t):
        return self.offset + self.amplitude * math.sin(self.omega * t + self.phase)

    @property
    def is_operator_valued(self):
        return False


class _Tabulated(Schedule):
    """Linear interpolation between strictly increasing knots; no extrapolation."""

    def __init__(self, times, values, name="tabulated"):
        self.times = np.asarray(times, dtype=float)
        if self.times.ndim != 1 or self.times.size < 2:
            raise ValueError(f"{name}: need at least two knots")
        if not np.all(np.isfinite(self.times)) or np.any(np.diff(self.times) <= 0):
            raise ValueError(f"{name}: knot times must be finite and strictly increasing")
        if len(values) != self.times.size:
            raise ValueError(f"{name}: {len(values)} values for {self.times.size} knots")
        first = values[0]
        if isinstance(first, numbers.Real):
            self.values = np.asarray(values, dtype=float)
            if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
                raise ValueError(f"{name}: scalar table must be finite numbers")
            self._ops = None
        else:
            ops = [linalg.as_operator(v) for v in values]
            if any(o.shape != ops[0].shape for o in ops):
                raise ValueError(f"{name}: tabulated operators differ in dimension")
            self._ops = np.stack(ops)
            self.values = None
        self.name = name

    def _clamp(self, t):
        t0, t1 = float(self.times[0]), float(self.times[-1])
        slack = _DOMAIN_RTOL * max(1.0, abs(t0), abs(t1))
        if t < t0 - slack or t > t1 + slack:
            raise ScheduleDomainError(
                f"{self.name}: t={t!r} outside tabulated range [{t0}, {t1}]"
            )
        return min(max(t, t0), t1)

    def __call__(self, t):
        t = self._clamp(float(t))
        if self._ops is None:
            return float(np.interp(t, self.times, self.values))
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        k = min(max(k, 0), self.times.size - 2)
        w = (t - self.times[k]) / (self.times[k + 1] - self.times[k])
        return (1.0 - w) * self._ops[k] + w * self._ops[k + 1]

    @property
    def is_operator_valued(self):
        return self._ops is not None


class _ScaledOperator(Schedule):
    """Scalar schedule times a fixed operator (the only time-dependent operator
    form besides tables; entrywise-independent time dependence is not a thing
    here)."""

    def __init__(self, scalar: Schedule, operator, name="scaled"):
        if not isinstance(scalar, Schedule) or scalar.is_operator_valued:
            raise ValueError(f"{name}: scaling schedule must be scalar-valued")
        self.scalar = scalar
        self.operator = linalg.as_operator(operator)
        self.name = name

    def __call__(self, t):
        return float(self.scalar(t)) * self.operator

    @property
    def is_constant(self):
        return self.scalar.is_constant

    @property
    def is_operator_valued(self):
        return True


def constant(value, name="constant") -> Schedule:
    return _Constant(value, name=name)


def sinusoidal(offset, amplitude, omega, phase=0.0, name="sinusoidal") -> Schedule:
    return _Sinusoidal(offset, amplitude, omega, phase, name=name)


def tabulated(times, values, name="tabulated") -> Schedule:
    return _Tabulated(times, values, name=name)


def scaled(scalar_schedule, operator, name="scaled") -> Schedule:
    return _ScaledOperator(scalar_schedule, operator, name=name)


def _as_schedule(value, *, name):
    if isinstance(value, Schedule):
        return value
    return _Constant(value, name=name)


@dataclass(frozen=True)
class ChannelSnapshot:
    l: np.ndarray
    l_dag: np.ndarray
    l_dag_l: np.ndarray
    alpha: float


@dataclass(frozen=True)
class ModelSnapshot:
    """Model evaluated at one time, with the products every generator
    application needs cached."""

    t: float
    h: np.ndarray
    channels: tuple[ChannelSnapshot, ...]

    @property
    def dim(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class ValidationIssue:
    t: float
    kind: str  # "hamiltonian-not-hermitian" | "negative-rate"
    magnitude: float
    channel: int | None = None


class Channel:
    def __init__(self, op, alpha):
        self.op = _as_schedule(op, name="channel op")
        self.alpha = _as_schedule(alpha, name="channel alpha")
        if not self.op.is_operator_valued:
            raise ValueError("channel op schedule must be operator-valued")
        if self.alpha.is_operator_valued:
            raise ValueError("channel alpha schedule must be scalar-valued")


class LindbladModel:
    """Immutable bundle (H(t), {(L_n(t), alpha_n(t))}) on a fixed dimension.

    Instances are not mutated after construction; ``snapshot`` may be called
    concurrently.
    """

    def __init__(self, dim: int, hamiltonian, channels=()):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        self.hamiltonian = _as_schedule(hamiltonian, name="hamiltonian")
        if not self.hamiltonian.is_operator_valued:
            raise ValueError("hamiltonian schedule must be operator-valued")
        built = []
        for ch in channels:
            if isinstance(ch, Channel):
                built.append(ch)
            else:
                op, alpha = ch
                built.append(Channel(op, alpha))
        self.channels = tuple(built)
        self._check_constant_dims()
        self._const_snapshot: ModelSnapshot | None = None

    def _check_constant_dims(self):
        for label, sched in self._operator_schedules():
            for op in _schedule_operator_values(sched):
                if op.shape != (self.dim, self.dim):
                    raise ValueError(
                        f"{label}: operator dimension {op.shape[0]} != model dim {self.dim}"
                    )

    def _operator_schedules(self):
        yield "hamiltonian", self.hamiltonian
        for i, ch in enumerate(self.channels):
            yield f"channels[{i}].op", ch.op

    @property
    def is_constant(self) -> bool:
        scheds = [self.hamiltonian]
        for ch in self.channels:
            scheds += [ch.op, ch.alpha]
        return all(s.is_constant for s in scheds)

    def snapshot(self, t: float) -> ModelSnapshot:
        """Evaluate all schedules at ``t`` and cache the channel products.

        Deterministic for equal ``t``; for fully constant models the same
        snapshot object is reused (only the timestamp differs).
        """
        t = float(t)
        if self._const_snapshot is not None:
            base = self._const_snapshot
            if base.t == t:
                return base
            return ModelSnapshot(t=t, h=base.h, channels=base.channels)

        h = self._eval("hamiltonian", self.hamiltonian, t)
        h = linalg.as_operator(h)
        if h.shape != (self.dim, self.dim):
            raise ModelValidationError(
                f"hamiltonian: dimension {h.shape[0]} != model dim {self.dim} at t={t}"
            )
        defect = linalg.hermiticity_defect(h)
        tol = max(HAMILTONIAN_HERMITICITY_RTOL * linalg.maxabs(h), linalg.TOLERANCE_FLOOR)
        if defect > tol:
            raise ModelValidationError(
                f"hamiltonian not Hermitian at t={t}: defect {defect:.3e}"
            )
        chans = []
        for i, ch in enumerate(self.channels):
            l = linalg.as_operator(self._eval(f"channels[{i}].op", ch.op, t))
            if l.shape != (self.dim, self.dim):
                raise ModelValidationError(
                    f"channels[{i}].op: dimension {l.shape[0]} != model dim {self.dim} at t={t}"
                )
            alpha = float(self._eval(f"channels[{i}].alpha", ch.alpha, t))
            if alpha < 0.0:
                raise ModelValidationError(
                    f"channels[{i}].alpha is negative at t={t}: {alpha}"
                )
            l_dag = linalg.dagger(l)
            chans.append(ChannelSnapshot(l=l, l_dag=l_dag, l_dag_l=l_dag @ l, alpha=alpha))
        snap = ModelSnapshot(t=t, h=h, channels=tuple(chans))
        if self.is_constant:
            self._const_snapshot = snap
        return snap

    @staticmethod
    def _eval(label, sched, t):
        try:
            return sched(t)
        except ScheduleDomainError as e:
            raise ScheduleDomainError(f"{label}: {e}") from None

    def validate(self, sample_times) -> list[ValidationIssue]:
        """Check H(t) Hermiticity and rate nonnegativity at the given times.

        Returns the list of violations; an empty list means the model is
        valid at every sampled time. Nothing is raised (errors surface where
        the model is actually used).
        """
        issues = []
        for t in sample_times:
            t = float(t)
            h = linalg.as_operator(self._eval("hamiltonian", self.hamiltonian, t))
            defect = linalg.hermiticity_defect(h)
            tol = max(HAMILTONIAN_HERMITICITY_RTOL * linalg.maxabs(h), linalg.TOLERANCE_FLOOR)
            if defect > tol:
                issues.append(ValidationIssue(t=t, kind="hamiltonian-not-hermitian",
                                              magnitude=defect))
            for i, ch in enumerate(self.channels):
                alpha = float(self._eval(f"channels[{i}].alpha", ch.alpha, t))
                if alpha < 0.0:
                    issues.append(ValidationIssue(t=t, kind="negative-rate",
                                                  magnitude=alpha, channel=i))
        return issues


def _schedule_operator_values(sched):
    """Operator values of a schedule that are known without picking a time."""
    if isinstance(sched, _Constant) and sched.is_operator_valued:
        yield sched.value
    elif isinstance(sched, _Tabulated) and sched.is_operator_valued:
        yield from sched._ops
    elif isinstance(sched, _ScaledOperator):
        yield sched.operator


# ---------------------------------------------------------------------------
# JSON config parsing
#
#   { "dim": n, "hamiltonian": <schedule>, "channels": [ {"op": <schedule>,
#     "alpha": <schedule>} ] }
#
# Schedule objects carry a "kind" of constant | sinusoidal | tabulated
# (plus "scaled" for scalar-times-fixed-operator); matrices use the
# row-major [re, im] literal format from linalg.
# ---------------------------------------------------------------------------


def _literal_or_scalar(value, field):
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, (list, tuple)):
        try:
            return linalg.parse_matrix_literal(value)
        except ValueError as e:
            raise ConfigError(field, str(e)) from None
    raise ConfigError(field, "must be a number or a matrix literal")


def schedule_from_config(obj, field) -> Schedule:
    if not isinstance(obj, dict):
        raise ConfigError(field, "must be a schedule object")
    kind = obj.get("kind")
    try:
        if kind == "constant":
            if "value" not in obj:
                raise ConfigError(f"{field}.value", "is required")
            return constant(_literal_or_scalar(obj["value"], f"{field}.value"), name=field)
        if kind == "sinusoidal":
            for key in ("offset", "amplitude", "omega"):
                if not isinstance(obj.get(key), numbers.Real):
                    raise ConfigError(f"{field}.{key}", "must be a number")
            return sinusoidal(obj["offset"], obj["amplitude"], obj["omega"],
                              obj.get("phase", 0.0), name=field)
        if kind == "tabulated":
            times = obj.get("times")
            values = obj.get("values")
            if not isinstance(times, list) or not isinstance(values, list):
                raise ConfigError(f"{field}.times", "and .values must be lists")
            parsed = [_literal_or_scalar(v, f"{field}.values[{i}]") for i, v in enumerate(values)]
            return tabulated(times, parsed, name=field)
        if kind == "scaled":
            scalar = schedule_from_config(obj.get("scalar"), f"{field}.scalar")
            if "matrix" not in obj:
                raise ConfigError(f"{field}.matrix", "is required")
            op = _literal_or_scalar(obj["matrix"], f"{field}.matrix")
            if not isinstance(op, np.ndarray):
                raise ConfigError(f"{field}.matrix", "must be a matrix literal")
            return scaled(scalar, op, name=field)
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(field, str(e)) from None
    raise ConfigError(f"{field}.kind", "must be constant, sinusoidal, tabulated, or scaled")


def model_from_config(cfg, field="model") -> LindbladModel:
    if not isinstance(cfg, dict):
        raise ConfigError(field, "must be an object")
    dim = cfg.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ConfigError(f"{field}.dim", "must be a positive integer")
    ham = schedule_from_config(cfg.get("hamiltonian"), f"{field}.hamiltonian")
    channels = []
    raw_channels = cfg.get("channels", [])
    if not isinstance(raw_channels, list):
        raise ConfigError(f"{field}.channels", "must be a list")
    for i, ch in enumerate(raw_channels):
        if not isinstance(ch, dict):
            raise ConfigError(f"{field}.channels[{i}]", "must be an object")
        op = schedule_from_config(ch.get("op"), f"{field}.channels[{i}].op")
        alpha = schedule_from_config(ch.get("alpha"), f"{field}.channels[{i}].alpha")
        channels.append((op, alpha))
    try:
        return LindbladModel(dim, ham, channels)
    except ValueError as e:
        raise ConfigError(field, str(e)) from None
