"""Development, readout training, and teacher-forced prediction.

One run works through four stages: build a random oscillator network,
drive it with the task input while the coupling weights adapt (the
development stage, replacing the usual washout), collect phase states and
fit a linear readout by ridge regression, then step through the test span
with the true input while the coupling stays frozen, predicting one step
ahead from each new state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import network as netmod
from .network import (
    DEFAULT_SETTINGS,
    OscillatorNetwork,
    SpectralRadiusSettings,
    init_network,
    phase_step,
    coupling_step,
)


@dataclass
class TaskData:
    """Paired input and target sequences of equal length."""

    inputs: np.ndarray
    targets: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if self.inputs.shape != self.targets.shape or self.inputs.ndim != 1:
            raise ValueError("inputs and targets must be 1-d and equally long")
        if not (np.isfinite(self.inputs).all() and np.isfinite(self.targets).all()):
            raise ValueError("task data must be finite")

    def __len__(self) -> int:
        return self.inputs.shape[0]


@dataclass
class ReservoirConfig:
    """All hyperparameters of one run.

    The defaults reproduce the NARMA10 benchmark setting: a 100-node
    reservoir at 5% density, adaptation rate 0.1, unit timestep, coupling
    strength 4.0, and a 100/900/500 split between development, training,
    and test lengths. The character parameter defaults to the locking
    (Hebbian-like) side -pi/2, and frequencies are drawn at scale 0.03;
    both are what lets the dt = 1 Euler dynamics phase-lock and compute.
    """

    n: int = 100
    density: float = 0.05
    spectral_target: float = 0.3
    lam: float = 4.0
    beta: float = -np.pi / 2
    epsilon: float = 0.1
    dt: float = 1.0
    frequency_scale: float = 0.03
    len_adev: int = 100
    len_train: int = 900
    len_test: int = 500
    ridge_alpha: float = 1e-3
    adaptive: bool = True
    use_bias: bool = True
    use_trig_features: bool = True
    center_phases: bool = True
    extra_train_after_dev: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.spectral_target <= 0:
            raise ValueError("spectral_target must be positive")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.frequency_scale <= 0:
            raise ValueError("frequency_scale must be positive")
        if min(self.len_adev, self.len_train, self.len_test) < 0:
            raise ValueError("sequence lengths must be nonnegative")
        if self.len_adev >= self.len_train:
            raise ValueError("len_adev must be smaller than len_train")
        if self.ridge_alpha < 0:
            raise ValueError("ridge_alpha must be nonnegative")

    def build_network(self) -> OscillatorNetwork:
        return init_network(
            self.n,
            self.density,
            self.seed,
            global_coupling=self.lam,
            character_parameter=self.beta,
            adaptation_rate=self.epsilon,
            timestep=self.dt,
            spectral_target=self.spectral_target,
            frequency_scale=self.frequency_scale,
        )


@dataclass
class StateTrace:
    """Collected reservoir states, one row per collection step, aligned
    with their target values. ``dev_phases`` is the phase snapshot taken
    when the development stage ended (used for synchrony measurements)."""

    states: np.ndarray
    targets: np.ndarray
    dev_phases: np.ndarray

    def __post_init__(self):
        if self.states.shape[0] != self.targets.shape[0]:
            raise ValueError("trace rows must match target count")

    @property
    def rows(self) -> int:
        return self.states.shape[0]


@dataclass
class Readout:
    """Trained output weights plus the feature contract they expect."""

    weights: np.ndarray
    use_bias: bool = False
    use_trig_features: bool = False
    center_phases: bool = False
    train_residual: float = 0.0

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]


@dataclass
class PipelineResult:
    """Everything produced by one full run."""

    test_mse: float
    network: OscillatorNetwork
    readout: Readout
    predictions: np.ndarray
    train_mse: float
    trace: StateTrace

    @property
    def dev_phases(self) -> np.ndarray:
        return self.trace.dev_phases


def build_features(
    states: np.ndarray,
    use_bias: bool = False,
    use_trig: bool = False,
    center: bool = False,
) -> np.ndarray:
    """Map raw phase rows to readout features.

    Raw phases by default; with ``use_trig`` each phase column is replaced
    by its sine and cosine; ``use_bias`` appends a constant-one column.
    ``center`` (trig contract only) subtracts each row's mean phase angle
    first. The dynamics are invariant under a common phase shift, so the
    mean phase integrates the input without fading; centering removes that
    non-stationary mode from the features.
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    if use_trig:
        if center:
            mean_angle = np.angle(np.exp(1j * states).mean(axis=1, keepdims=True))
            states = states - mean_angle
        parts = [np.sin(states), np.cos(states)]
    else:
        parts = [states]
    if use_bias:
        parts.append(np.ones((states.shape[0], 1)))
    return np.hstack(parts)


def develop_and_collect(
    cfg: ReservoirConfig,
    data: TaskData,
    net: OscillatorNetwork | None = None,
    settings: SpectralRadiusSettings = DEFAULT_SETTINGS,
) -> tuple[OscillatorNetwork, StateTrace]:
    """Run the development-plus-collection loop over the training span.

    Steps i = 1..len_train feed input u(i); while i is inside the
    development span (and the run is adaptive) the coupling adapts and is
    rescaled to the target radius, afterwards the phases are collected
    together with their targets. With ``extra_train_after_dev`` the loop
    instead runs len_adev development steps followed by len_train
    collection steps.

    Returns the developed network and the collected trace.
    """
    if net is None:
        net = cfg.build_network()
    if cfg.extra_train_after_dev:
        total = cfg.len_adev + cfg.len_train
        dev_upto = cfg.len_adev
    else:
        total = cfg.len_train
        dev_upto = cfg.len_adev - 1
    if len(data) < total:
        raise ValueError(
            f"training span needs {total} samples, task data provides {len(data)}"
        )
    n_rows = total - max(dev_upto, 0)
    states = np.empty((n_rows, net.n))
    targets = np.empty(n_rows)
    dev_phases = net.phases.copy()
    warm = None
    row = 0
    for i in range(1, total + 1):
        phase_step(net, data.inputs[i - 1])
        if cfg.adaptive and i <= dev_upto:
            coupling_step(net)
            warm = netmod._rescale_warm(net, cfg.spectral_target, settings, warm)
        if i > dev_upto:
            states[row] = net.phases
            targets[row] = data.targets[i - 1]
            row += 1
        if i == dev_upto:
            dev_phases = net.phases.copy()
    return net, StateTrace(states=states, targets=targets, dev_phases=dev_phases)


def train_readout(
    trace: StateTrace | np.ndarray,
    targets: np.ndarray,
    alpha: float,
    use_bias: bool = False,
    use_trig_features: bool = False,
    center_phases: bool = False,
) -> Readout:
    """Fit readout weights by ridge regression on collected states.

    Solves (X'X + alpha*I) w = X'y through a symmetric positive-definite
    factorization. ``trace`` may be a StateTrace or a plain state matrix.

    Raises
    ------
    ValueError
        If the normal equations are singular (alpha = 0 on rank-deficient
        states); use a positive alpha in that case.
    """
    states = trace.states if isinstance(trace, StateTrace) else np.asarray(trace)
    y = np.asarray(targets, dtype=float)
    X = build_features(states, use_bias, use_trig_features, center_phases)
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("trace rows and targets must match and be nonempty")
    gram = X.T @ X
    rhs = X.T @ y
    lhs = gram + alpha * np.eye(X.shape[1])
    try:
        w = scipy.linalg.solve(lhs, rhs, assume_a="pos")
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise ValueError(
            "singular normal equations; set ridge alpha > 0"
        ) from exc
    # Residual through the normal-equations identity, so tests can check
    # it against the directly computed squared error.
    residual = float(y @ y - 2.0 * w @ rhs + w @ gram @ w)
    return Readout(
        weights=w,
        use_bias=use_bias,
        use_trig_features=use_trig_features,
        center_phases=center_phases,
        train_residual=max(residual, 0.0),
    )


def predict(
    net: OscillatorNetwork,
    readout: Readout,
    cfg: ReservoirConfig,
    data: TaskData,
) -> np.ndarray:
    """Teacher-forced one-step-ahead prediction over the test span.

    Each step drives the frozen network with the true input and emits the
    readout applied to the new phases. The coupling never adapts here.
    """
    if (
        readout.use_bias != cfg.use_bias
        or readout.use_trig_features != cfg.use_trig_features
        or readout.center_phases != cfg.center_phases
    ):
        raise ValueError("readout feature contract does not match config")
    if len(data) < cfg.len_test:
        raise ValueError(
            f"test span needs {cfg.len_test} samples, task data provides {len(data)}"
        )
    predictions = np.empty(cfg.len_test)
    for i in range(cfg.len_test):
        phase_step(net, data.inputs[i])
        feats = build_features(
            net.phases,
            readout.use_bias,
            readout.use_trig_features,
            readout.center_phases,
        )
        predictions[i] = float(feats[0] @ readout.weights)
    return predictions


def run_pipeline(cfg: ReservoirConfig, data: TaskData) -> PipelineResult:
    """Full run: develop, train the readout, and evaluate on the test span.

    Deterministic given ``cfg.seed`` and the task data.
    """
    train_span = (
        cfg.len_adev + cfg.len_train if cfg.extra_train_after_dev else cfg.len_train
    )
    if len(data) < train_span + cfg.len_test:
        raise ValueError(
            f"run needs {train_span + cfg.len_test} samples, "
            f"task data provides {len(data)}"
        )
    train_data = TaskData(
        inputs=data.inputs[:train_span], targets=data.targets[:train_span]
    )
    test_data = TaskData(
        inputs=data.inputs[train_span : train_span + cfg.len_test],
        targets=data.targets[train_span : train_span + cfg.len_test],
    )
    net, trace = develop_and_collect(cfg, train_data)
    readout = train_readout(
        trace,
        trace.targets,
        cfg.ridge_alpha,
        use_bias=cfg.use_bias,
        use_trig_features=cfg.use_trig_features,
        center_phases=cfg.center_phases,
    )
    feats = build_features(
        trace.states, cfg.use_bias, cfg.use_trig_features, cfg.center_phases
    )
    train_mse = float(np.mean((feats @ readout.weights - trace.targets) ** 2))
    predictions = predict(net, readout, cfg, test_data)
    test_mse = float(np.mean((predictions - test_data.targets) ** 2))
    return PipelineResult(
        test_mse=test_mse,
        network=net,
        readout=readout,
        predictions=predictions,
        train_mse=train_mse,
        trace=trace,
    )
