"""Fully-connected autoencoder trained with a divergence-regularized loss.

The network is deliberately small and explicit: tanh hidden layers, linear
layers at both bottlenecks, manual backpropagation, no autograd framework.
Training runs in two phases. Up to ``rtd_start_epoch`` each mini-batch
minimizes the plain reconstruction loss 0.5 * ||X - X_rec||^2; afterwards the
batch loss gains ``rtd_weight`` times the divergence between the input batch
and its latent image, whose subgradient with respect to the latent points is
backpropagated through the encoder.

Everything is seeded. The same config and seed give a bit-identical history,
and a run whose divergence term never activates (weight zero, or start epoch
past the end) is indistinguishable from a pure autoencoder run.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .errors import SingularityError, ValidationError
from .geometry import PointCloud
from .grad import rtd_subgradient

log = logging.getLogger(__name__)

RTD_VARIANTS = ("min", "min+max")
OPTIMIZERS = ("sgd", "adam")

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


def _as_stack(weights, biases, side: str):
    if len(weights) != len(biases):
        raise ValidationError(f"{side} has {len(weights)} weights but {len(biases)} biases")
    if not weights:
        raise ValidationError(f"{side} needs at least one layer")
    ws, bs = [], []
    for i, (w, b) in enumerate(zip(weights, biases)):
        w = np.asarray(w, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
            raise ValidationError(f"{side} layer {i} shapes {w.shape} / {b.shape} do not fit")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ValidationError(f"{side} layer {i} has non-finite entries")
        if ws and ws[-1].shape[1] != w.shape[0]:
            raise ValidationError(
                f"{side} layer {i} expects {w.shape[0]} inputs, previous layer emits {ws[-1].shape[1]}"
            )
        ws.append(w)
        bs.append(b)
    return tuple(ws), tuple(bs)


@dataclass(frozen=True)
class MlpParams:
    """Weights of a mirrored encoder/decoder pair.

    Weight matrices are (fan_in, fan_out); a stack of k matrices means k-1
    tanh hidden layers followed by one linear output layer. The decoder's
    widths must mirror the encoder's exactly.
    """

    encoder_weights: tuple
    encoder_biases: tuple
    decoder_weights: tuple
    decoder_biases: tuple
    activation: str = "tanh"

    def __post_init__(self):
        if self.activation != "tanh":
            raise ValidationError(f"unsupported activation {self.activation!r}")
        enc_w, enc_b = _as_stack(self.encoder_weights, self.encoder_biases, "encoder")
        dec_w, dec_b = _as_stack(self.decoder_weights, self.decoder_biases, "decoder")
        enc_widths = [enc_w[0].shape[0]] + [w.shape[1] for w in enc_w]
        dec_widths = [dec_w[0].shape[0]] + [w.shape[1] for w in dec_w]
        if dec_widths != enc_widths[::-1]:
            raise ValidationError(
                f"decoder widths {dec_widths} do not mirror encoder widths {enc_widths}"
            )
        object.__setattr__(self, "encoder_weights", enc_w)
        object.__setattr__(self, "encoder_biases", enc_b)
        object.__setattr__(self, "decoder_weights", dec_w)
        object.__setattr__(self, "decoder_biases", dec_b)

    @property
    def input_dim(self) -> int:
        return self.encoder_weights[0].shape[0]

    @property
    def latent_dim(self) -> int:
        return self.encoder_weights[-1].shape[1]


@dataclass(frozen=True)
class TrainConfig:
    """Architecture and loop settings for one training run."""

    batch_size: int = 80
    learning_rate: float = 1e-3
    epochs_total: int = 100
    rtd_start_epoch: int = 20
    rtd_weight: float = 1.0
    seed: int = 0
    rtd_variant: str = "min"
    hidden_dim: int = 16
    n_layers: int = 3
    latent_dim: int = 2
    optimizer: str = "sgd"

    def __post_init__(self):
        if self.batch_size < 4:
            raise ValidationError(f"batch_size must be >= 4, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs_total < 0:
            raise ValidationError(f"epochs_total must be >= 0, got {self.epochs_total}")
        if not 0 <= self.rtd_start_epoch <= self.epochs_total:
            raise ValidationError(
                f"rtd_start_epoch must lie in [0, {self.epochs_total}], got {self.rtd_start_epoch}"
            )
        if self.rtd_weight < 0:
            raise ValidationError(f"rtd_weight must be >= 0, got {self.rtd_weight}")
        if self.rtd_variant not in RTD_VARIANTS:
            raise ValidationError(f"unknown rtd_variant {self.rtd_variant!r}")
        if self.hidden_dim < 1 or self.latent_dim < 1:
            raise ValidationError("hidden_dim and latent_dim must be >= 1")
        if self.n_layers < 0:
            raise ValidationError(f"n_layers must be >= 0, got {self.n_layers}")
        if self.optimizer not in OPTIMIZERS:
            raise ValidationError(f"unknown optimizer {self.optimizer!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TrainConfig":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class EpochStats:
    """Per-epoch scalars: losses are per-point, divergence is per-batch mean."""

    epoch: int
    reconstruction: float
    divergence: float
    skipped_batches: int = 0


def init_params(
    input_dim: int,
    hidden_dim: int,
    n_layers: int,
    latent_dim: int,
    rng: np.random.Generator,
) -> MlpParams:
    """Seeded uniform init, each layer scaled by 1/sqrt(fan_in)."""

    def stack(widths):
        ws, bs = [], []
        for fan_in, fan_out in zip(widths, widths[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            ws.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            bs.append(rng.uniform(-bound, bound, size=fan_out))
        return ws, bs

    enc_widths = [input_dim] + [hidden_dim] * n_layers + [latent_dim]
    enc_w, enc_b = stack(enc_widths)
    dec_w, dec_b = stack(enc_widths[::-1])
    return MlpParams(tuple(enc_w), tuple(enc_b), tuple(dec_w), tuple(dec_b))


def _run_stack(weights, biases, x):
    """Forward through tanh hidden layers and a linear last layer.

    Returns the list of layer inputs (the activations each weight matrix
    consumed) and the output; the inputs are what backprop needs.
    """
    inputs = []
    a = x
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        inputs.append(a)
        a = a @ w + b
        if i != last:
            a = np.tanh(a)
    return inputs, a


def _backward_stack(weights, inputs, delta):
    """Given d(loss)/d(output), produce per-layer grads and d(loss)/d(input).

    ``inputs`` are the stored layer inputs from _run_stack. Hidden layers
    apply the tanh derivative through the layer's own output, which equals
    tanh(pre-activation) and is exactly the next layer's stored input.
    """
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        if i != len(weights) - 1:
            post = inputs[i + 1]
            delta = delta * (1.0 - post * post)
        grads_w[i] = inputs[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        delta = delta @ weights[i].T
    return grads_w, grads_b, delta


def forward(params: MlpParams, batch: PointCloud) -> tuple[PointCloud, PointCloud]:
    """Encode and decode a batch, returning (latent, reconstruction)."""
    if batch.dim != params.input_dim:
        raise ValidationError(
            f"batch has {batch.dim} columns, the encoder expects {params.input_dim}"
        )
    _, latent = _run_stack(params.encoder_weights, params.encoder_biases, batch.points)
    _, recon = _run_stack(params.decoder_weights, params.decoder_biases, latent)
    return PointCloud(latent), PointCloud(recon)


def _divergence_pullback(x: PointCloud, z: PointCloud, variant: str):
    """Divergence value and its subgradient with respect to the latent cloud."""
    if variant == "min":
        value, fld = rtd_subgradient(x, z, variant="min")
        return value, fld.d_x_tilde
    v_min, f_min = rtd_subgradient(x, z, variant="min")
    v_max, f_max = rtd_subgradient(x, z, variant="max")
    return v_min + v_max, f_min.d_x_tilde + f_max.d_x_tilde


def batch_loss(params: MlpParams, batch: PointCloud, rtd_weight: float, variant: str = "min") -> float:
    """The exact scalar the training step descends, for one batch."""
    latent, recon = forward(params, batch)
    loss = 0.5 * float(((batch.points - recon.points) ** 2).sum())
    if rtd_weight > 0:
        value, _ = _divergence_pullback(batch, latent, variant)
        loss += rtd_weight * value
    return loss


def batch_gradients(params: MlpParams, batch: PointCloud, rtd_weight: float, variant: str = "min"):
    """Manual backprop of the batch loss through decoder and encoder.

    Returns (loss, recon_loss, divergence, grads) where grads mirrors the
    params layout. The divergence subgradient enters at the latent layer and
    flows through the encoder only; a singular divergence raises through.
    """
    enc_in, latent = _run_stack(params.encoder_weights, params.encoder_biases, batch.points)
    dec_in, recon = _run_stack(params.decoder_weights, params.decoder_biases, latent)

    recon_loss = 0.5 * float(((batch.points - recon) ** 2).sum())
    divergence = 0.0
    delta_out = recon - batch.points
    dec_gw, dec_gb, delta_latent = _backward_stack(params.decoder_weights, dec_in, delta_out)
    if rtd_weight > 0:
        value, d_latent = _divergence_pullback(batch, PointCloud(latent), variant)
        divergence = value
        delta_latent = delta_latent + rtd_weight * d_latent
    enc_gw, enc_gb, _ = _backward_stack(params.encoder_weights, enc_in, delta_latent)

    loss = recon_loss + rtd_weight * divergence
    return loss, recon_loss, divergence, (enc_gw, enc_gb, dec_gw, dec_gb)


class _Sgd:
    def __init__(self, rate):
        self.rate = rate

    def step(self, arrays, grads):
        for a, g in zip(arrays, grads):
            a -= self.rate * g


class _Adam:
    def __init__(self, rate, shapes):
        self.rate = rate
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, arrays, grads):
        self.t += 1
        correct1 = 1.0 - _ADAM_BETA1 ** self.t
        correct2 = 1.0 - _ADAM_BETA2 ** self.t
        for a, g, m, v in zip(arrays, grads, self.m, self.v):
            m *= _ADAM_BETA1
            m += (1.0 - _ADAM_BETA1) * g
            v *= _ADAM_BETA2
            v += (1.0 - _ADAM_BETA2) * g * g
            a -= self.rate * (m / correct1) / (np.sqrt(v / correct2) + _ADAM_EPS)


def train(data: PointCloud, cfg: TrainConfig) -> tuple[MlpParams, list[EpochStats]]:
    """Two-phase mini-batch training over the whole cloud.

    Batches are seeded shuffles of the row order; the divergence term joins
    the loss from ``rtd_start_epoch`` on. A batch whose divergence hits a
    coincident-point singularity keeps its reconstruction step, drops the
    divergence term, and is counted in that epoch's ``skipped_batches``.
    """
    if data.n < cfg.batch_size:
        raise ValidationError(
            f"need at least batch_size={cfg.batch_size} points, got {data.n}"
        )
    rng = np.random.default_rng(cfg.seed)
    params = init_params(data.dim, cfg.hidden_dim, cfg.n_layers, cfg.latent_dim, rng)
    enc_w = [w.copy() for w in params.encoder_weights]
    enc_b = [b.copy() for b in params.encoder_biases]
    dec_w = [w.copy() for w in params.decoder_weights]
    dec_b = [b.copy() for b in params.decoder_biases]
    flat = enc_w + enc_b + dec_w + dec_b
    if cfg.optimizer == "adam":
        stepper = _Adam(cfg.learning_rate, [a.shape for a in flat])
    else:
        stepper = _Sgd(cfg.learning_rate)

    history: list[EpochStats] = []
    for epoch in range(cfg.epochs_total):
        order = rng.permutation(data.n)
        recon_sum = 0.0
        div_sum = 0.0
        div_batches = 0
        skipped = 0
        for start in range(0, data.n, cfg.batch_size):
            rows = order[start : start + cfg.batch_size]
            batch = PointCloud(data.points[rows])
            live = MlpParams(tuple(enc_w), tuple(enc_b), tuple(dec_w), tuple(dec_b))
            weight = cfg.rtd_weight if epoch >= cfg.rtd_start_epoch and len(rows) >= 2 else 0.0
            try:
                _, recon_loss, divergence, grads = batch_gradients(
                    live, batch, weight, cfg.rtd_variant
                )
                if weight > 0:
                    div_sum += divergence
                    div_batches += 1
            except SingularityError as err:
                log.warning("epoch %d: divergence skipped for one batch (%s)", epoch, err)
                skipped += 1
                _, recon_loss, divergence, grads = batch_gradients(live, batch, 0.0)
            recon_sum += recon_loss
            enc_gw, enc_gb, dec_gw, dec_gb = grads
            stepper.step(flat, enc_gw + enc_gb + dec_gw + dec_gb)
        history.append(
            EpochStats(
                epoch=epoch,
                reconstruction=recon_sum / data.n,
                divergence=div_sum / div_batches if div_batches else 0.0,
                skipped_batches=skipped,
            )
        )
    final = MlpParams(tuple(enc_w), tuple(enc_b), tuple(dec_w), tuple(dec_b))
    return final, history


CHECKPOINT_VERSION = 1


def save_checkpoint(params: MlpParams, cfg: TrainConfig, path) -> None:
    """Write params and config as one JSON document."""

    def stack(weights, biases):
        return [
            {"weight": w.tolist(), "bias": b.tolist()} for w, b in zip(weights, biases)
        ]

    doc = {
        "format_version": CHECKPOINT_VERSION,
        "activation": params.activation,
        "config": asdict(cfg),
        "encoder": stack(params.encoder_weights, params.encoder_biases),
        "decoder": stack(params.decoder_weights, params.decoder_biases),
    }
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=1, sort_keys=True)
        handle.write("\n")


def load_checkpoint(path) -> tuple[MlpParams, TrainConfig]:
    """Read a checkpoint back, validating the shape chain against its config."""
    with open(path) as handle:
        doc = json.load(handle)
    if doc.get("format_version") != CHECKPOINT_VERSION:
        raise ValidationError(f"unsupported checkpoint version {doc.get('format_version')!r}")
    cfg = TrainConfig(**doc["config"])

    def stack(side):
        ws = tuple(np.array(layer["weight"], dtype=np.float64) for layer in doc[side])
        bs = tuple(np.array(layer["bias"], dtype=np.float64) for layer in doc[side])
        return ws, bs

    enc_w, enc_b = stack("encoder")
    dec_w, dec_b = stack("decoder")
    params = MlpParams(enc_w, enc_b, dec_w, dec_b, activation=doc.get("activation", "tanh"))
    expected = [params.input_dim] + [cfg.hidden_dim] * cfg.n_layers + [cfg.latent_dim]
    got = [enc_w[0].shape[0]] + [w.shape[1] for w in enc_w]
    if got != expected:
        raise ValidationError(
            f"checkpoint widths {got} do not match its config {expected}"
        )
    return params, cfg
