"""Reference-free preference optimization over length-normalized logprobs.

The per-pair margin is

    m = (beta / |y_w|) * logprob(y_w) - (beta / |y_l|) * logprob(y_l) - gamma

and the loss is the batch mean of -log(sigmoid(m)), computed as
softplus(-m) with the usual numerically stable split so values match to
1e-12 for any margin magnitude.

A closed-form toy policy stands in for a reasoning model at desk scale: one
parameter theta per difficulty bin, continue-probability s = sigmoid(theta)
per token, so a length-L response has logprob L*log(s) + log(1-s) and the
expected length is s/(1-s) = exp(theta). Length normalization cancels the
log(s) term in the margin, which is exactly the quantity the objective acts
on; gradient descent on the toy therefore shifts each bin's expected length
the way the pair data demands, and everything is checkable against finite
differences.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .pairs import PreferencePair


@dataclass(frozen=True)
class SimPOConfig:
    """Objective and optimizer settings.

    beta scales the normalized logprob difference, gamma is the target
    margin offset. beta=0 collapses the margin to -gamma and is accepted
    for degenerate-scale diagnostics only.
    """

    beta: float = 200.0
    gamma: float = 1.0
    learning_rate: float = 0.5
    epochs: int = 1

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass(frozen=True)
class TrainPair:
    """A preference pair with fixed logprob sums, for direct loss evaluation."""

    pair: PreferencePair
    winner_logprob_sum: float
    loser_logprob_sum: float
    winner_len: int
    loser_len: int

    def __post_init__(self):
        if self.winner_len <= 0 or self.loser_len <= 0:
            raise ValueError(
                f"pair {self.pair.winner}/{self.pair.loser}: zero length; "
                "length normalization needs positive lengths"
            )
        if self.winner_logprob_sum > 0 or self.loser_logprob_sum > 0:
            raise ValueError(f"pair {self.pair.winner}/{self.pair.loser}: logprob sums must be <= 0")


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def softplus(x: float) -> float:
    """log(1 + exp(x)) without overflow for large |x|."""
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def simpo_margin(tp: TrainPair, beta: float, gamma: float) -> float:
    """Length-normalized logprob margin of one pair."""
    if tp.winner_len <= 0 or tp.loser_len <= 0:
        raise ValueError("zero length in pair")
    return (
        (beta / tp.winner_len) * tp.winner_logprob_sum
        - (beta / tp.loser_len) * tp.loser_logprob_sum
        - gamma
    )


def simpo_loss(batch: Sequence[TrainPair], cfg: SimPOConfig) -> float:
    """Mean -log(sigmoid(margin)) over the batch."""
    if not batch:
        raise ValueError("empty batch")
    total = 0.0
    for tp in batch:
        total += softplus(-simpo_margin(tp, cfg.beta, cfg.gamma))
    return total / len(batch)


@dataclass(frozen=True)
class ToyPolicy:
    """Geometric stop/continue policy with one parameter per difficulty bin.

    theta maps to the per-token continue probability s = sigmoid(theta);
    P(length = L) = s**L * (1 - s), so lengths are geometric with expected
    value s / (1 - s) = exp(theta).
    """

    theta: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for b, t in self.theta.items():
            s = sigmoid(t)
            if not 0.0 < s < 1.0:
                raise ValueError(f"bin {b}: theta {t} saturates the continue probability")

    def bins(self) -> list[int]:
        return sorted(self.theta)

    def continue_prob(self, bin: int) -> float:
        self._check_bin(bin)
        return sigmoid(self.theta[bin])

    def expected_length(self, bin: int) -> float:
        self._check_bin(bin)
        return math.exp(self.theta[bin])

    def _check_bin(self, bin: int) -> None:
        if bin not in self.theta:
            raise ValueError(f"unknown difficulty bin {bin}")


def toy_logprob(policy: ToyPolicy, bin: int, length: int) -> float:
    """log P(response of `length` tokens) under the bin's geometric policy."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    s = policy.continue_prob(bin)
    return length * math.log(s) + math.log1p(-s)


def _toy_logprob_dtheta(s: float, length: int) -> float:
    # d/dtheta [L*log(s) + log(1-s)] with s = sigmoid(theta)
    return length * (1.0 - s) - s


def _resolve_bins(
    pairs: Sequence[PreferencePair], bins: Mapping[str, int]
) -> list[tuple[PreferencePair, int]]:
    out = []
    for p in pairs:
        if p.question_id not in bins:
            raise ValueError(f"question {p.question_id} has no difficulty bin")
        if p.winner_len <= 0 or p.loser_len <= 0:
            raise ValueError(f"pair {p.winner}/{p.loser}: zero length")
        out.append((p, bins[p.question_id]))
    return out


def loss_and_grad(
    policy: ToyPolicy,
    binned_pairs: Sequence[tuple[PreferencePair, int]],
    cfg: SimPOConfig,
) -> tuple[float, dict[int, float]]:
    """Batch loss and its analytic gradient wrt each bin's theta.

    Summation runs in input order so results are bit-reproducible.
    """
    if not binned_pairs:
        raise ValueError("empty batch")
    total = 0.0
    grad = {b: 0.0 for b in policy.bins()}
    for pair, bin in binned_pairs:
        s = policy.continue_prob(bin)
        lp_w = toy_logprob(policy, bin, pair.winner_len)
        lp_l = toy_logprob(policy, bin, pair.loser_len)
        m = (cfg.beta / pair.winner_len) * lp_w - (cfg.beta / pair.loser_len) * lp_l - cfg.gamma
        total += softplus(-m)
        dm = (cfg.beta / pair.winner_len) * _toy_logprob_dtheta(s, pair.winner_len) - (
            cfg.beta / pair.loser_len
        ) * _toy_logprob_dtheta(s, pair.loser_len)
        grad[bin] += -sigmoid(-m) * dm
    n = len(binned_pairs)
    return total / n, {b: g / n for b, g in grad.items()}


@dataclass(frozen=True)
class TrainResult:
    policy: ToyPolicy
    loss_trace: list[float]


def train_toy(
    pairs: Sequence[PreferencePair],
    bins: Mapping[str, int],
    cfg: SimPOConfig,
    init_theta: Mapping[int, float] | None = None,
) -> TrainResult:
    """Full-batch gradient descent of the objective on the toy policy.

    `bins` maps question_id to difficulty bin. Starts from `init_theta`
    (zeros over the bins present in the data when omitted). The loss trace
    has one entry per epoch plus the final loss; ten consecutive epochs of
    rising loss abort with a hint to lower the learning rate.
    """
    if not pairs:
        raise ValueError("empty pairs dataset")
    binned = _resolve_bins(pairs, bins)
    if init_theta is None:
        theta = {b: 0.0 for _, b in binned}
    else:
        theta = dict(init_theta)
        for _, b in binned:
            if b not in theta:
                raise ValueError(f"init_theta is missing bin {b}")

    trace: list[float] = []
    rising = 0
    for _ in range(cfg.epochs):
        policy = ToyPolicy(theta=theta)
        loss, grad = loss_and_grad(policy, binned, cfg)
        if trace and loss > trace[-1]:
            rising += 1
            if rising >= 10:
                raise ValueError(
                    f"loss rose for {rising} consecutive epochs (now {loss:.6g}); "
                    f"try a smaller learning_rate than {cfg.learning_rate}"
                )
        else:
            rising = 0
        trace.append(loss)
        theta = {b: t - cfg.learning_rate * grad[b] for b, t in theta.items()}

    final = ToyPolicy(theta=theta)
    trace.append(loss_and_grad(final, binned, cfg)[0])
    return TrainResult(policy=final, loss_trace=trace)


def grad_check(
    policy: ToyPolicy,
    pairs: Sequence[PreferencePair],
    bins: Mapping[str, int],
    cfg: SimPOConfig,
    step: float = 1e-6,
) -> float:
    """Max relative error of the analytic gradient vs central differences.

    The relative error denominator is floored at 1e-8 so exactly-zero
    components (untouched bins, beta=0) compare as zero error.
    """
    if not pairs:
        raise ValueError("empty batch")
    binned = _resolve_bins(pairs, bins)
    _, analytic = loss_and_grad(policy, binned, cfg)
    worst = 0.0
    for b in policy.bins():
        shifted = dict(policy.theta)
        shifted[b] = policy.theta[b] + step
        up = loss_and_grad(ToyPolicy(theta=shifted), binned, cfg)[0]
        shifted[b] = policy.theta[b] - step
        down = loss_and_grad(ToyPolicy(theta=shifted), binned, cfg)[0]
        fd = (up - down) / (2.0 * step)
        err = abs(analytic[b] - fd) / max(abs(analytic[b]), abs(fd), 1e-8)
        worst = max(worst, err)
    return worst
