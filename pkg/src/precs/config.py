"""JSON run configuration for the command-line front end."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bosonic import FockSpace, coherent_vector, make_grid
from .errors import ConfigError
from .models import DEFAULT_G_LADDER, JaynesCummingsModel, PureDephasingModel
from .operators import DEFAULT_TOLERANCES, Tolerances
from .parametric import JointState

MODELS = ("pure-dephasing", "jaynes-cummings")

_NAMED_QUBITS = {
    "+": (1.0, 0.0),
    "-": (0.0, 1.0),
    "x": (1 / math.sqrt(2), 1 / math.sqrt(2)),
}


def parse_complex(value, what="value") -> complex:
    """A number or a ``[re, im]`` pair."""
    if isinstance(value, bool):
        raise ConfigError(f"{what}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{what}: expected a number or [re, im], got {value!r}")


def parse_qubit(value, what="qubit"):
    if isinstance(value, str):
        if value not in _NAMED_QUBITS:
            raise ConfigError(f"{what}: unknown state {value!r}; use one of {sorted(_NAMED_QUBITS)}")
        ket = np.array(_NAMED_QUBITS[value], dtype=complex)
    elif isinstance(value, list) and len(value) == 2:
        ket = np.array([parse_complex(v, what) for v in value])
    else:
        raise ConfigError(f"{what}: expected a name or two amplitudes, got {value!r}")
    norm = np.linalg.norm(ket)
    if norm == 0:
        raise ConfigError(f"{what}: zero vector")
    return ket / norm


def parse_matrix(value, what="matrix"):
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(r, list) and len(r) == 2 for r in value)):
        raise ConfigError(f"{what}: expected a 2x2 nested list")
    return np.array([[parse_complex(x, what) for x in row] for row in value])


def _positive(x, name, strict=True):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number") from None
    if not math.isfinite(x) or (x <= 0 if strict else x < 0):
        raise ConfigError(f"{name} must be {'positive' if strict else 'non-negative'}, got {x}")
    return x


def _integer(x, name, minimum):
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {x!r}")
    return x


@dataclass
class RunConfig:
    model: str = "pure-dephasing"
    omega: float = 1.0
    g: float = 0.2
    n_max: int = 40
    R: float = 6.0
    h: float = 0.05
    dt: float = 1e-3
    t_end: float = 2 * math.pi
    samples: int = 101
    order_check: bool = False
    qubit: np.ndarray = field(default_factory=lambda: np.array(_NAMED_QUBITS["x"], dtype=complex))
    alpha0: complex = 0j
    fock: int | None = None
    field_h: float = 0.0
    T_tilde: float = 0.0
    H_tilde_eff: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=complex))
    branches: list = field(default_factory=list)
    g_list: tuple = DEFAULT_G_LADDER
    curve_samples: int = 4000
    threshold: float = 0.01
    tolerances: Tolerances = DEFAULT_TOLERANCES
    output: str = "out"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"model", "omega", "g", "n_max", "grid", "integrator", "initial_state", "h_eff", "jc",
                 "branches", "g_list", "gamma_curve", "tolerances", "output"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        c = cls()
        c.model = d.get("model", c.model)
        if c.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {c.model!r}")
        c.omega = _positive(d.get("omega", c.omega), "omega")
        c.g = _positive(d.get("g", c.g), "g", strict=False)
        c.n_max = _integer(d.get("n_max", c.n_max), "n_max", 2)

        grid = d.get("grid", {})
        c.R = _positive(grid.get("R", c.R), "grid.R")
        c.h = _positive(grid.get("h", c.h), "grid.h")
        if not c.h < c.R:
            raise ConfigError("grid.h must be smaller than grid.R")

        integ = d.get("integrator", {})
        c.dt = _positive(integ.get("dt", c.dt), "integrator.dt")
        c.t_end = _positive(integ.get("t_end", c.t_end), "integrator.t_end")
        c.samples = _integer(integ.get("samples", c.samples), "integrator.samples", 2)
        c.order_check = bool(integ.get("order_check", False))

        init = d.get("initial_state", {})
        if "qubit" in init:
            c.qubit = parse_qubit(init["qubit"], "initial_state.qubit")
        if "alpha0" in init and "fock" in init:
            raise ConfigError("initial_state: give either alpha0 or fock, not both")
        if "alpha0" in init:
            c.alpha0 = parse_complex(init["alpha0"], "initial_state.alpha0")
        if "fock" in init:
            c.fock = _integer(init["fock"], "initial_state.fock", 0)
            if c.fock >= c.n_max:
                raise ConfigError("initial_state.fock must be below n_max")

        c.field_h = float(d.get("h_eff", 0.0))
        jc = d.get("jc", {})
        c.T_tilde = _positive(jc.get("T_tilde", c.T_tilde), "jc.T_tilde", strict=False)
        if "H_tilde_eff" in jc:
            c.H_tilde_eff = parse_matrix(jc["H_tilde_eff"], "jc.H_tilde_eff")
            if np.max(np.abs(c.H_tilde_eff - c.H_tilde_eff.conj().T)) > 1e-12:
                raise ConfigError("jc.H_tilde_eff must be Hermitian")

        for i, b in enumerate(d.get("branches", [])):
            if not isinstance(b, dict) or "weight" not in b or "qubit" not in b:
                raise ConfigError(f"branches[{i}] needs 'weight' and 'qubit'")
            c.branches.append((_positive(b["weight"], f"branches[{i}].weight", strict=False),
                               parse_qubit(b["qubit"], f"branches[{i}].qubit")))
        if c.branches and abs(sum(w for w, _ in c.branches) - 1.0) > 1e-12:
            raise ConfigError("branch weights must sum to 1")

        if "g_list" in d:
            gl = d["g_list"]
            if not isinstance(gl, list) or not gl:
                raise ConfigError("g_list must be a non-empty list")
            c.g_list = tuple(_positive(x, "g_list entry", strict=False) for x in gl)
        gc = d.get("gamma_curve", {})
        c.curve_samples = _integer(gc.get("samples", c.curve_samples), "gamma_curve.samples", 2)
        c.threshold = _positive(gc.get("threshold", c.threshold), "gamma_curve.threshold")

        if not isinstance(d.get("tolerances", {}), dict):
            raise ConfigError("tolerances must be an object")
        c.tolerances = DEFAULT_TOLERANCES.updated(d.get("tolerances"))
        c.output = str(d.get("output", c.output))
        return c

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path}: {exc}") from None
        return cls.from_dict(data)

    # -- derived objects --

    def model_obj(self):
        if self.model == "pure-dephasing":
            return PureDephasingModel(self.omega, self.g)
        return JaynesCummingsModel(self.omega, self.g, self.T_tilde, self.H_tilde_eff)

    def grid(self):
        return make_grid(self.R, self.h)

    def initial_state(self) -> JointState:
        fs = FockSpace(self.n_max)
        env = fs.basis(self.fock) if self.fock is not None else coherent_vector(fs, self.alpha0, self.tolerances)
        return JointState.product(self.qubit, env).normalized()

    def times(self):
        return np.linspace(0.0, self.t_end, self.samples)
