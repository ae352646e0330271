"""Densities, distribution functions and random variates used by the samplers.

Every sampler takes an explicit ``RngState`` so that a run is a deterministic
function of its seed. Array arguments broadcast; scalar arguments give a
scalar back.
"""
from dataclasses import dataclass, field
import math
import numpy as np
from scipy.special import ndtr
from .constants import Constants
from .errors import NumericalError, ParameterError


@dataclass(frozen=True)
class QuantileSpec:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 < p < 1.0) or not math.isfinite(p):
            raise ParameterError(f"Quantile level must lie strictly inside (0, 1), got {self.p!r}.")
        object.__setattr__(self, "p", p)

    @property
    def theta(self) -> float:
        return (1.0 - 2.0 * self.p) / (self.p * (1.0 - self.p))

    @property
    def tau(self) -> float:
        return math.sqrt(2.0 / (self.p * (1.0 - self.p)))

    @property
    def tau2(self) -> float:
        return 2.0 / (self.p * (1.0 - self.p))


@dataclass
class RngState:
    seed: int = 0
    stream: tuple = ()
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.seed = int(self.seed)
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ParameterError(f"Seed must be an unsigned 64-bit integer, got {self.seed}.")
        self.stream = tuple(int(k) for k in self.stream)
        seedSeq = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        self.generator = np.random.Generator(np.random.PCG64DXSM(seedSeq))

    def substream(self, *keys: int) -> "RngState":
        return RngState(self.seed, self.stream + tuple(keys))


def _scalarOut(value, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(np.asarray(value).reshape(-1)[0]) if np.size(value) == 1 else value
    return value


def alPdf(x, spec: QuantileSpec):
    x = np.asarray(x, dtype=float)
    p = spec.p
    exponent = np.where(x < 0, x * (1.0 - p), -x * p)
    return _scalarOut(p * (1.0 - p) * np.exp(exponent), x)


def alCdf(x, spec: QuantileSpec, scale=1.0):
    if not scale > 0:
        raise ParameterError(f"AL scale must be positive, got {scale!r}.")
    t = np.asarray(x, dtype=float) / scale
    p = spec.p
    left = p * np.exp((1.0 - p) * np.minimum(t, 0.0))
    right = 1.0 - (1.0 - p) * np.exp(-p * np.maximum(t, 0.0))
    return _scalarOut(np.where(t < 0, left, right), x)


def alIntervalProb(lo, hi, spec: QuantileSpec, scale=1.0):
    """P(lo < e <= hi) for e ~ AL(0, scale, p), evaluated without cancellation in either tail."""
    if not scale > 0:
        raise ParameterError(f"AL scale must be positive, got {scale!r}.")
    lo = np.asarray(lo, dtype=float) / scale
    hi = np.asarray(hi, dtype=float) / scale
    p = spec.p
    with np.errstate(invalid="ignore"):
        upper = (1.0 - p) * (np.exp(-p * np.maximum(lo, 0.0)) - np.exp(-p * np.maximum(hi, 0.0)))
        lower = p * (np.exp((1.0 - p) * np.minimum(hi, 0.0)) - np.exp((1.0 - p) * np.minimum(lo, 0.0)))
        middle = alCdf(hi, spec) - alCdf(lo, spec)
    prob = np.where(lo >= 0, upper, np.where(hi < 0, lower, middle))
    return _scalarOut(np.maximum(prob, 0.0), lo, hi)


def alQuantile(u, spec: QuantileSpec, scale=1.0):
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise ParameterError("AL quantile requires probabilities in (0, 1).")
    p = spec.p
    with np.errstate(divide="ignore"):
        left = scale * np.log(u / p) / (1.0 - p)
        right = -scale * np.log((1.0 - u) / (1.0 - p)) / p
    return _scalarOut(np.where(u < p, left, right), u)


def alMoments(spec: QuantileSpec):
    p = spec.p
    mean = (1.0 - 2.0 * p) / (p * (1.0 - p))
    variance = (1.0 - 2.0 * p + 2.0 * p * p) / (p * p * (1.0 - p) ** 2)
    return mean, variance


def sampleAl(spec: QuantileSpec, rng: RngState, size, method: str = "mixture"):
    """AL(0, 1, p) variates, either through the normal-exponential mixture or by inversion."""
    gen = rng.generator
    if method == "mixture":
        w = gen.exponential(1.0, size)
        u = gen.standard_normal(size)
        return spec.theta * w + spec.tau * np.sqrt(w) * u
    if method == "inverse":
        return alQuantile(gen.uniform(0.0, 1.0, size), spec)
    raise ParameterError(f"Unknown AL sampling method '{method}'.")


def sampleGigHalf(lam, eta, rng: RngState, size=None):
    """Draw from the density proportional to x^(-1/2) exp(-(lam/x + eta*x)/2).

    X is the reciprocal of an inverse-Gaussian(sqrt(eta/lam), eta) variate drawn by the
    Michael-Schucany-Haas transform, written with the smaller root in its stable form
    1/(1 + c + sqrt(c(c+2))). Below ``GIG_LAMBDA_FLOOR`` the kernel is the gamma(1/2, eta/2) limit.
    """
    lamArr = np.asarray(lam, dtype=float)
    etaArr = np.asarray(eta, dtype=float)
    if np.any(~(etaArr > 0)):
        raise ParameterError("GIG eta must be positive.")
    if np.any(~(lamArr >= 0)):
        raise ParameterError("GIG lambda must be non-negative.")

    shape = np.broadcast_shapes(lamArr.shape, etaArr.shape) if size is None else size
    lamB = np.broadcast_to(lamArr, shape)
    etaB = np.broadcast_to(etaArr, shape)
    gen = rng.generator
    out = np.empty(shape)

    small = lamB < Constants.GIG_LAMBDA_FLOOR
    if np.any(small):
        out[small] = gen.gamma(0.5, 2.0 / etaB[small])

    big = ~small
    if np.any(big):
        lamBig = lamB[big]
        etaBig = etaB[big]
        scaleX = np.sqrt(lamBig / etaBig)
        c = gen.standard_normal(lamBig.shape) ** 2 / (2.0 * np.sqrt(lamBig * etaBig))
        root = 1.0 + c + np.sqrt(c * (c + 2.0))
        keepSmallRoot = gen.uniform(0.0, 1.0, lamBig.shape) <= root / (root + 1.0)
        out[big] = np.where(keepSmallRoot, root * scaleX, scaleX / root)

    return _scalarOut(out, lam, eta) if size is None else out


def sampleGigHalfRatioOfUniforms(lam: float, eta: float, rng: RngState) -> float:
    """Slow ratio-of-uniforms GIG(1/2) sampler kept as a reference for ``sampleGigHalf``."""
    if not eta > 0 or not lam > 0:
        raise ParameterError("Ratio-of-uniforms GIG sampler needs lam > 0 and eta > 0.")
    beta = math.sqrt(lam * eta)

    def logKernel(t):
        return -0.5 * math.log(t) - 0.5 * beta * (t + 1.0 / t)

    mode = (-0.5 + math.sqrt(0.25 + beta * beta)) / beta
    vMode = (1.5 + math.sqrt(2.25 + beta * beta)) / beta
    logTop = logKernel(mode)
    vMax = vMode * math.exp(0.5 * (logKernel(vMode) - logTop))

    gen = rng.generator
    while True:
        u = gen.uniform(0.0, 1.0)
        v = gen.uniform(0.0, vMax)
        if u <= 0.0:
            continue
        t = v / u
        if t > 0 and 2.0 * math.log(u) <= logKernel(t) - logTop:
            return t * math.sqrt(lam / eta)


def _proposeStandard(a, b, gen):
    """One round of proposals for standard-normal draws restricted to (a, b].

    Lower tails use exponential rejection, intervals with little mass use a uniform
    envelope and the rest plain normal rejection. Upper tails are mirrored.
    """
    tail = Constants.TRUNCNORM_TAIL
    flip = b < -tail
    lo = np.where(flip, -b, a)
    hi = np.where(flip, -a, b)

    x = np.empty_like(lo)
    accepted = np.zeros(lo.shape, dtype=bool)

    inTail = lo > tail
    with np.errstate(invalid="ignore"):
        alpha = np.where(inTail, 0.5 * (lo + np.sqrt(lo * lo + 4.0)), 1.0)
        width = hi - lo
        narrowTail = inTail & (width < 1.0 / alpha)
        narrowCentral = ~inTail & ((ndtr(hi) - ndtr(lo)) < 0.25)
    exponential = inTail & ~narrowTail
    uniform = narrowTail | narrowCentral
    normal = ~inTail & ~narrowCentral

    if np.any(exponential):
        idx = np.nonzero(exponential)[0]
        draw = lo[idx] + gen.exponential(1.0, idx.size) / alpha[idx]
        logU = np.log(gen.uniform(0.0, 1.0, idx.size))
        x[idx] = draw
        accepted[idx] = (draw <= hi[idx]) & (logU <= -0.5 * (draw - alpha[idx]) ** 2)

    if np.any(uniform):
        idx = np.nonzero(uniform)[0]
        draw = gen.uniform(lo[idx], hi[idx])
        peak = np.clip(0.0, lo[idx], hi[idx])
        logU = np.log(gen.uniform(0.0, 1.0, idx.size))
        x[idx] = draw
        accepted[idx] = logU <= -0.5 * (draw * draw - peak * peak)

    if np.any(normal):
        idx = np.nonzero(normal)[0]
        draw = gen.standard_normal(idx.size)
        x[idx] = draw
        accepted[idx] = (draw > lo[idx]) & (draw <= hi[idx])

    return np.where(flip, -x, x), accepted


def sampleTruncnorm(lo, hi, mean, var, rng: RngState):
    """Normal(mean, var) restricted to (lo, hi]; bounds may be infinite."""
    loArr, hiArr, meanArr, varArr = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (lo, hi, mean, var)))
    if np.any(~(varArr > 0)):
        raise ParameterError("Truncated normal variance must be positive.")
    if np.any(~(loArr < hiArr)):
        raise ParameterError("Truncated normal requires lo < hi.")

    shape = loArr.shape
    loF, hiF, meanF = loArr.ravel(), hiArr.ravel(), meanArr.ravel()
    sd = np.sqrt(varArr.ravel())
    a = (loF - meanF) / sd
    b = (hiF - meanF) / sd

    gen = rng.generator
    out = np.empty_like(a)
    pending = np.arange(a.size)
    while pending.size:
        x, accepted = _proposeStandard(a[pending], b[pending], gen)
        value = meanF[pending] + sd[pending] * x
        accepted &= (value > loF[pending]) & (value <= hiF[pending])
        out[pending[accepted]] = value[accepted]
        pending = pending[~accepted]

    return _scalarOut(out.reshape(shape), lo, hi, mean, var)


def sampleTruncatedAl(lo, hi, location, spec: QuantileSpec, rng: RngState, scale=1.0):
    """location + e with e ~ AL(0, scale, p), restricted to (lo, hi], by inversion.

    Intervals lying wholly in one tail are inverted on that tail's own exponential so far-tail
    intervals keep their precision.
    """
    if not scale > 0:
        raise ParameterError(f"AL scale must be positive, got {scale!r}.")
    loArr, hiArr, locArr = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (lo, hi, location)))
    if np.any(~(loArr < hiArr)):
        raise ParameterError("Truncated AL requires lo < hi.")

    shape = loArr.shape
    loF, hiF, locF = loArr.ravel(), hiArr.ravel(), locArr.ravel()
    a = (loF - locF) / scale
    b = (hiF - locF) / scale
    p = spec.p

    gen = rng.generator
    out = np.empty_like(a)
    pending = np.arange(a.size)
    rounds = 0
    while pending.size:
        if rounds == Constants.MAX_REDRAW_ROUNDS:
            raise NumericalError("Truncated AL draws keep falling outside their intervals.",
                                 {"pending": int(pending.size)})
        rounds += 1
        ap, bp = a[pending], b[pending]
        u = gen.uniform(0.0, 1.0, pending.size)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            sLo, sHi = np.exp(-p * np.maximum(ap, 0.0)), np.exp(-p * np.maximum(bp, 0.0))
            upper = -np.log(sHi + u * (sLo - sHi)) / p
            fLo, fHi = np.exp((1.0 - p) * np.minimum(ap, 0.0)), np.exp((1.0 - p) * np.minimum(bp, 0.0))
            lower = np.log(fLo + u * (fHi - fLo)) / (1.0 - p)
            v = alCdf(ap, spec) + u * (alCdf(bp, spec) - alCdf(ap, spec))
            middle = np.where(v < p, np.log(v / p) / (1.0 - p), -np.log((1.0 - v) / (1.0 - p)) / p)
        t = np.where(ap >= 0, upper, np.where(bp < 0, lower, middle))
        value = locF[pending] + scale * t
        accepted = np.isfinite(value) & (value > loF[pending]) & (value <= hiF[pending])
        out[pending[accepted]] = value[accepted]
        pending = pending[~accepted]

    return _scalarOut(out.reshape(shape), lo, hi, location)


def sampleInvgamma(shape, rateLike, rng: RngState, size=None):
    shapeArr = np.asarray(shape, dtype=float)
    rateArr = np.asarray(rateLike, dtype=float)
    if np.any(~(shapeArr > 0)) or np.any(~(rateArr > 0)):
        raise ParameterError("Inverse-gamma shape and rate must be positive.")
    draw = 1.0 / rng.generator.gamma(shapeArr, 1.0 / rateArr, size)
    return _scalarOut(draw, shape, rateLike) if size is None else draw


def choleskyLower(cov, label: str = "covariance") -> np.ndarray:
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        sym = 0.5 * (cov + cov.T)
        raise NumericalError(
            f"Cholesky factorization failed: {label} is not positive definite.",
            {
                "matrix": label,
                "shape": list(cov.shape),
                "min_eigenvalue": float(np.min(np.linalg.eigvalsh(sym))),
                "max_asymmetry": float(np.max(np.abs(cov - cov.T))),
                "finite": bool(np.all(np.isfinite(cov))),
            },
        ) from None


def sampleMvn(mean, cov, rng: RngState) -> np.ndarray:
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    lower = choleskyLower(cov)
    if lower.shape[0] != mean.size:
        raise ParameterError("Mean and covariance dimensions differ.")
    return mean + lower @ rng.generator.standard_normal(mean.size)
