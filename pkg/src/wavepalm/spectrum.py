"""Wave spectra, spectral moments and the space-time covariance kernel.

The sea elevation is a zero-mean stationary Gaussian field W(x, t) with a
one-sided frequency spectrum S(omega) travelling in a single fixed direction
theta (unidirectional sea).  Deep-water dispersion links wavenumber and
frequency, so the covariance of W and of any mix of its x/t derivatives is a
single oscillatory integral over the spectrum.  Everything downstream (Palm
laws, geometry densities, the simulator) consumes this module through

  * :class:`MomentSet` -- the spectral moments lambda_ij,
  * :class:`CovKernel` -- R^(a,b)(xi, tau) for derivative orders a + b <= 4,
  * :func:`normalize`  -- the coordinate rescaling that makes
    lambda_00 = lambda_20 = lambda_02 = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma as _gamma_fn, gammainc

GRAVITY = 9.81

#: JSON keys that must be present in a spectrum config document.
REQUIRED_CONFIG_KEYS = ("hs", "tp", "gamma", "sigma_a", "sigma_b", "omega_c", "theta")


class SpectrumError(ValueError):
    """Invalid spectrum parameters or a degenerate / divergent moment."""


def dispersion(omega, g: float = GRAVITY):
    """Deep-water wavenumber kappa = omega**2 / g.

    Parameters
    ----------
    omega : float or array
        Angular frequency in rad/s, must be >= 0.
    g : float
        Gravitational acceleration in m/s^2.

    Returns
    -------
    float or array
        Wavenumber in rad/m.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise SpectrumError("dispersion requires omega >= 0")
    out = w * w / g
    return float(out) if np.isscalar(omega) else out


@dataclass(frozen=True)
class SpectrumConfig:
    """JONSWAP-family spectrum parameters plus direction and cutoff.

    ``omega_c`` may be ``math.inf`` for an uncut spectrum; moments that
    diverge without a cutoff then raise :class:`SpectrumError`.
    """

    hs: float
    tp: float
    gamma: float = 1.0
    sigma_a: float = 0.07
    sigma_b: float = 0.09
    omega_c: float = math.inf
    theta: float = math.pi
    g: float = GRAVITY

    def __post_init__(self):
        if not self.hs > 0.0:
            raise SpectrumError(f"hs must be > 0, got {self.hs}")
        if not self.tp > 0.0:
            raise SpectrumError(f"tp must be > 0, got {self.tp}")
        if not self.gamma >= 1.0:
            raise SpectrumError(f"gamma must be >= 1, got {self.gamma}")
        for name in ("sigma_a", "sigma_b"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise SpectrumError(f"{name} must lie in (0, 1), got {v}")
        if not self.omega_c > self.omega_p:
            raise SpectrumError(
                f"omega_c must exceed the peak frequency 2*pi/tp = {self.omega_p:.6g}"
            )
        if not 0.0 <= self.theta <= 2.0 * math.pi:
            raise SpectrumError(f"theta must lie in [0, 2*pi], got {self.theta}")
        if not self.g > 0.0:
            raise SpectrumError(f"g must be > 0, got {self.g}")

    @property
    def omega_p(self) -> float:
        """Peak angular frequency 2*pi/tp in rad/s."""
        return 2.0 * math.pi / self.tp

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumConfig":
        missing = [k for k in REQUIRED_CONFIG_KEYS if k not in data]
        if missing:
            raise SpectrumError(f"missing config field(s): {', '.join(missing)}")
        omega_c = data["omega_c"]
        if omega_c is None or (isinstance(omega_c, str) and omega_c.lower() in ("inf", "infinity")):
            omega_c = math.inf
        extra = set(data) - set(REQUIRED_CONFIG_KEYS) - {"g"}
        if extra:
            raise SpectrumError(f"unknown config field(s): {', '.join(sorted(extra))}")
        return cls(
            hs=float(data["hs"]),
            tp=float(data["tp"]),
            gamma=float(data["gamma"]),
            sigma_a=float(data["sigma_a"]),
            sigma_b=float(data["sigma_b"]),
            omega_c=float(omega_c),
            theta=float(data["theta"]),
            g=float(data.get("g", GRAVITY)),
        )

    @classmethod
    def from_file(cls, path) -> "SpectrumConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SpectrumError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise SpectrumError("config JSON must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        data = asdict(self)
        if math.isinf(data["omega_c"]):
            data["omega_c"] = None
        return data


@lru_cache(maxsize=8)
def _leggauss(order: int):
    x, w = leggauss(order)
    return x, w


def _panel_nodes(edges: np.ndarray, panels_per_seg: int, order: int):
    """Composite Gauss-Legendre nodes/weights over consecutive segments."""
    x, w = _leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        sub = np.linspace(a, b, panels_per_seg + 1)
        mid = 0.5 * (sub[1:] + sub[:-1])
        half = 0.5 * (sub[1:] - sub[:-1])
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


class JonswapSpectrum:
    """JONSWAP frequency spectrum with hard cutoff.

    Bretschneider base (5/16) hs^2 wp^4 w^-5 exp(-5/4 (wp/w)^4) times the
    peak-enhancement factor gamma**exp(-(w-wp)^2 / (2 sigma^2 wp^2)) with
    sigma = sigma_a below the peak and sigma_b above; the product is rescaled
    so that the integral over (0, inf) equals hs^2/16 (i.e. 4*sqrt(lambda_00)
    = hs before the cutoff), then truncated at omega_c without renormalizing.
    """

    def __init__(self, config: SpectrumConfig):
        self.config = config
        self.omega_c = config.omega_c
        self.theta = config.theta
        self.g = config.g
        self.omega_p = config.omega_p
        # Enhancement is numerically 1 beyond ~12 sigma_b peak widths; the
        # remaining energy is pure Bretschneider with a closed-form integral.
        self._omega_hi = self.omega_p * (1.0 + 14.0 * config.sigma_b)
        self._scale = 1.0
        target = config.hs ** 2 / 16.0
        self._scale = target / self._integral_before_cutoff()

    # -- raw shape -----------------------------------------------------
    def _log_bretschneider(self, omega: np.ndarray) -> np.ndarray:
        cfg = self.config
        wp = self.omega_p
        amp = math.log(5.0 / 16.0) + 2.0 * math.log(cfg.hs) + 4.0 * math.log(wp)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return amp - 5.0 * np.log(omega) - 1.25 * (wp / omega) ** 4

    def _unnormalized(self, omega: np.ndarray) -> np.ndarray:
        cfg = self.config
        wp = self.omega_p
        sigma = np.where(omega <= wp, cfg.sigma_a, cfg.sigma_b)
        with np.errstate(over="ignore", invalid="ignore"):
            enhance = math.log(cfg.gamma) * np.exp(-((omega - wp) ** 2) / (2.0 * (sigma * wp) ** 2))
            logs = self._log_bretschneider(omega) + enhance
            vals = np.exp(logs)
        return np.where(omega > 0.0, np.nan_to_num(vals, nan=0.0, posinf=0.0), 0.0)

    def _bretschneider_partial(self, a: float, b: float) -> float:
        """Exact integral of the Bretschneider base over [a, b]."""
        cfg = self.config
        wp = self.omega_p

        def anti(w):
            if w <= 0.0:
                return 0.0
            if math.isinf(w):
                return 1.0
            return math.exp(-1.25 * (wp / w) ** 4)

        return cfg.hs ** 2 / 16.0 * (anti(b) - anti(a))

    def _integral_before_cutoff(self) -> float:
        nodes, weights = _panel_nodes(self._segment_edges(self._omega_hi), 16, 24)
        head = float(self._unnormalized(nodes) @ weights)
        return head + self._bretschneider_partial(self._omega_hi, math.inf)

    def _segment_edges(self, top: float) -> np.ndarray:
        cfg = self.config
        wp = self.omega_p
        cuts = [0.0, wp * (1.0 - 5.0 * cfg.sigma_a), wp, wp * (1.0 + 5.0 * cfg.sigma_b), top]
        return np.unique(np.clip(cuts, 0.0, top))

    # -- public surface -------------------------------------------------
    def density(self, omega):
        """Spectral density S(omega) in m^2 s, zero above the cutoff."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        out = self._scale * self._unnormalized(w)
        out[w > self.omega_c] = 0.0
        return float(out[0]) if np.isscalar(omega) or np.ndim(omega) == 0 else out

    def kx(self, omega):
        """Directional wavenumber kappa(omega) * cos(theta) in rad/m."""
        return dispersion(omega, self.g) * math.cos(self.theta)

    def quad_nodes(self, panels_per_seg: int, order: int = 20):
        """Quadrature nodes/weights on [0, omega_c] adapted to the peak."""
        if math.isinf(self.omega_c):
            raise SpectrumError("quadrature nodes require a finite cutoff omega_c")
        edges = self._segment_edges(self.omega_c)
        return _panel_nodes(edges, panels_per_seg, order)

    def moment_tail(self, i: int, j: int, lo: float) -> float:
        """Closed-form (kappa cos theta)^i omega^j moment of [lo, inf).

        Valid where the enhancement factor is numerically 1 (lo above the
        peak region); diverges for 2 i + j >= 4.
        """
        p = 2 * i + j
        if p >= 4:
            raise SpectrumError(
                f"moment lambda_{i}{j} diverges without a finite cutoff (omega^{p - 5} tail)"
            )
        cfg = self.config
        wp = self.omega_p
        c = 1.25 * wp ** 4
        y_lo = c / lo ** 4
        a = 1.0 - p / 4.0
        lower_inc = _gamma_fn(a) * gammainc(a, y_lo)
        pref = self._scale * (5.0 / 16.0) * cfg.hs ** 2 * wp ** 4
        pref *= math.cos(self.theta) ** i / cfg.g ** i
        return pref * 0.25 * c ** ((p - 4.0) / 4.0) * lower_inc


class ScaledSpectrum:
    """Spectrum after the x/t coordinate rescaling (normalized sea).

    ``x_scale`` (1/m) and ``t_scale`` (1/s) multiply the coordinates; the
    density is re-expressed in the rescaled frequency with amplitude factor
    ``amp_scale`` so that spectral moments transform consistently.
    """

    def __init__(self, base, x_scale: float, t_scale: float, amp_scale: float):
        if x_scale <= 0.0 or t_scale <= 0.0 or amp_scale <= 0.0:
            raise SpectrumError("normalization scales must be positive")
        self.base = base
        self.x_scale = x_scale
        self.t_scale = t_scale
        self.amp_scale = amp_scale
        self.omega_c = base.omega_c / t_scale
        self.theta = base.theta
        self.omega_p = base.omega_p / t_scale
        # kappa_tilde = kappa / x_scale with omega = omega_tilde * t_scale
        # keeps the deep-water form with an effective gravity.
        self.g = base.g * x_scale / t_scale ** 2

    def density(self, omega):
        return self.amp_scale * self.base.density(np.asarray(omega, dtype=float) * self.t_scale)

    def kx(self, omega):
        return dispersion(omega, self.g) * math.cos(self.theta)

    def quad_nodes(self, panels_per_seg: int, order: int = 20):
        nodes, weights = self.base.quad_nodes(panels_per_seg, order)
        return nodes / self.t_scale, weights / self.t_scale

    def moment_tail(self, i: int, j: int, lo: float) -> float:
        raise SpectrumError("scaled spectra require a finite cutoff for moments")


def _as_spectrum(spec_or_config):
    if isinstance(spec_or_config, SpectrumConfig):
        return JonswapSpectrum(spec_or_config)
    return spec_or_config


def jonswap_density(config: SpectrumConfig, omega):
    """Evaluate the JONSWAP density for ``config`` at ``omega``."""
    return JonswapSpectrum(config).density(omega)


_MOMENT_PANELS = 24
_MOMENT_ORDER = 24


def spectral_moment(spec_or_config, i: int, j: int) -> float:
    """Spectral moment lambda_ij = integral (kappa cos theta)^i omega^j S.

    The directional integral degenerates to evaluation at the single fixed
    theta.  With an infinite cutoff only moments with 2 i + j < 4 converge;
    those are evaluated with an analytic spectral tail.
    """
    if i < 0 or j < 0:
        raise SpectrumError("moment orders must be nonnegative")
    if i + j > 4:
        raise SpectrumError("moments above total order 4 are not supported")
    spec = _as_spectrum(spec_or_config)
    if math.isinf(spec.omega_c):
        hi = spec._omega_hi
        nodes, weights = _panel_nodes(spec._segment_edges(hi), _MOMENT_PANELS, _MOMENT_ORDER)
        dens = spec.density(nodes)
        head = float((spec.kx(nodes) ** i * nodes ** j * dens) @ weights)
        return head + spec.moment_tail(i, j, hi)
    nodes, weights = spec.quad_nodes(_MOMENT_PANELS, _MOMENT_ORDER)
    dens = spec.density(nodes)
    return float((spec.kx(nodes) ** i * nodes ** j * dens) @ weights)


@dataclass(frozen=True)
class MomentSet:
    """All spectral moments lambda_ij for i + j <= 4 of one spectrum.

    ``lam[i, j]`` is NaN outside the computed triangle.
    """

    lam: np.ndarray

    def __post_init__(self):
        if not self.lam00 > 0.0:
            raise SpectrumError("degenerate spectrum: lambda_00 <= 0")
        if not self.lam20 > 0.0:
            raise SpectrumError("degenerate spectrum: lambda_20 <= 0")
        if not self.lam02 > 0.0:
            raise SpectrumError("degenerate spectrum: lambda_02 <= 0")
        cs = self.lam11 ** 2 - self.lam20 * self.lam02
        if cs > 1e-12 * self.lam20 * self.lam02:
            raise SpectrumError("moments violate the Cauchy-Schwarz inequality")

    @classmethod
    def from_spectrum(cls, spec_or_config) -> "MomentSet":
        spec = _as_spectrum(spec_or_config)
        lam = np.full((5, 5), np.nan)
        for i in range(5):
            for j in range(5 - i):
                lam[i, j] = spectral_moment(spec, i, j)
        return cls(lam=lam)

    def __call__(self, i: int, j: int) -> float:
        v = self.lam[i, j]
        if np.isnan(v):
            raise SpectrumError(f"moment lambda_{i}{j} outside the computed range")
        return float(v)

    @property
    def lam00(self) -> float:
        return float(self.lam[0, 0])

    @property
    def lam11(self) -> float:
        return float(self.lam[1, 1])

    @property
    def lam20(self) -> float:
        return float(self.lam[2, 0])

    @property
    def lam02(self) -> float:
        return float(self.lam[0, 2])

    @property
    def v_bar(self) -> float:
        """Average wave velocity -lambda_11 / lambda_20 in m/s."""
        return -self.lam11 / self.lam20

    @property
    def sigma2(self) -> float:
        """Residual velocity variance scale lambda_02 - lambda_11^2/lambda_20."""
        return self.lam02 - self.lam11 ** 2 / self.lam20


class CovKernel:
    """Covariance kernel R^(a,b)(xi, tau) of the sea surface, a + b <= 4.

    Differentiating under the integral multiplies the integrand by the
    directional wavenumber (order a) and by omega (order b) while advancing
    the cosine phase by (a+b) pi/2.  Quadrature resolution adapts to the
    phase span of the requested (xi, tau) batch.
    """

    _ORDER = 20
    _BASE_PANELS = 12

    def __init__(self, spec_or_config):
        self.spectrum = _as_spectrum(spec_or_config)
        if math.isinf(self.spectrum.omega_c):
            raise SpectrumError("the covariance kernel requires a finite cutoff omega_c")
        self._cache: dict[int, tuple] = {}

    def _nodes(self, panels: int):
        got = self._cache.get(panels)
        if got is None:
            nodes, weights = self.spectrum.quad_nodes(panels, self._ORDER)
            dens = self.spectrum.density(nodes)
            kx = self.spectrum.kx(nodes)
            got = (nodes, weights * dens, kx)
            self._cache[panels] = got
            if len(self._cache) > 6:
                self._cache.pop(next(iter(self._cache)))
        return got

    def _panels_for(self, xi: np.ndarray, tau: np.ndarray) -> int:
        wc = self.spectrum.omega_c
        kc = abs(self.spectrum.kx(wc))
        span = 0.0
        if xi.size:
            span += float(np.max(np.abs(xi))) * kc
        if tau.size:
            span += float(np.max(np.abs(tau))) * wc
        need = max(self._BASE_PANELS, int(math.ceil(span / 3.0)))
        return 1 << max(need - 1, 0).bit_length()

    def __call__(self, xi, tau=0.0, a: int = 0, b: int = 0):
        """Evaluate the (a, b) partial derivative of R at (xi, tau).

        ``xi`` and ``tau`` broadcast; returns a float for scalar inputs.
        """
        if a < 0 or b < 0 or a + b > 4:
            raise SpectrumError("kernel derivative orders must satisfy 0 <= a+b <= 4")
        xi_arr = np.asarray(xi, dtype=float)
        tau_arr = np.asarray(tau, dtype=float)
        scalar = xi_arr.ndim == 0 and tau_arr.ndim == 0
        xi_b, tau_b = np.broadcast_arrays(np.atleast_1d(xi_arr), np.atleast_1d(tau_arr))
        nodes, wdens, kx = self._nodes(self._panels_for(xi_b, tau_b))
        shape = xi_b.shape
        xi_f = xi_b.reshape(-1, 1)
        tau_f = tau_b.reshape(-1, 1)
        out = np.empty(xi_f.shape[0])
        coef = (kx ** a) * (nodes ** b) * wdens
        shift = (a + b) * 0.5 * math.pi
        # chunk the phase matrix to bound memory for big batches
        step = max(1, int(4e6 // max(nodes.size, 1)))
        for lo in range(0, xi_f.shape[0], step):
            hi = lo + step
            phase = tau_f[lo:hi] * nodes + xi_f[lo:hi] * kx + shift
            out[lo:hi] = np.cos(phase) @ coef
        out = out.reshape(shape)
        return float(out.reshape(-1)[0]) if scalar else out

    def moments(self) -> MomentSet:
        return MomentSet.from_spectrum(self.spectrum)


def covariance(spec_or_config, xi, tau, a: int = 0, b: int = 0):
    """One-shot kernel evaluation; prefer :class:`CovKernel` in loops."""
    return CovKernel(spec_or_config)(xi, tau, a, b)


@dataclass(frozen=True)
class NormalizationScales:
    """Coordinate scales that normalize lambda_00, lambda_20, lambda_02 to 1."""

    x_scale: float
    t_scale: float
    v_scale: float

    def __post_init__(self):
        if min(self.x_scale, self.t_scale, self.v_scale) <= 0.0:
            raise SpectrumError("normalization scales must be strictly positive")


def normalize(spec_or_config, v: float = 0.0, moments: MomentSet | None = None):
    """Rescale coordinates so the three leading moments become one.

    Returns ``(scaled_spectrum, scales, v_scaled)`` where x_tilde =
    x * scales.x_scale, t_tilde = t * scales.t_scale and the ship speed
    transforms as v_tilde = v * scales.v_scale.
    """
    spec = _as_spectrum(spec_or_config)
    if moments is None:
        moments = MomentSet.from_spectrum(spec)
    lam00, lam20, lam02 = moments.lam00, moments.lam20, moments.lam02
    if min(lam00, lam20, lam02) <= 0.0:
        raise SpectrumError("cannot normalize a spectrum with degenerate moments")
    scales = NormalizationScales(
        x_scale=math.sqrt(lam20 / lam00),
        t_scale=math.sqrt(lam02 / lam00),
        v_scale=math.sqrt(lam20 / lam02),
    )
    amp = scales.t_scale / lam00
    scaled = ScaledSpectrum(spec, scales.x_scale, scales.t_scale, amp)
    return scaled, scales, v * scales.v_scale
