"""Smoothed expansion fans of the third characteristic family.

Across the fan the entropy and the invariant u - 2c/(gamma-1) are constant,
so the whole state is a function of the characteristic speed w = u + c:

    c(w)     = (gamma-1)/(gamma+1) * (w - I),   I = u_+ - 2c_+/(gamma-1)
    u        = w - c
    theta    = c^2/(R*gamma)
    rho      = rho_+ * (theta/theta_+)^(1/(gamma-1))

and w itself solves the inviscid Burgers equation.  The smooth profile uses
the regularized data

    w0(x0) = w_-                               for x0 <= 0
           = w_- + delta_r * P(q+1, alpha*x0)  for x0 > 0

(P = regularized lower incomplete gamma, i.e. C_q * int_0^{alpha x} y^q e^-y)
solved along characteristics at time tau = 1 + t, so the t=0 profile is
already one time unit into the expansion and the left edge of the fan sits
at x = w_-(1+t) exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from .gas import GasParams, sound_speed
from .layer import LayerProfile

__all__ = [
    "R3Curve", "BurgersWave", "CompositeProfile",
    "r3_connect", "cq_constant", "burgers_eval",
    "rarefaction_profile", "exact_fan_profile", "rarefaction_decay_check",
    "superpose",
]

# module-level tolerance on fitted decay exponents (fraction of expected)
DECAY_FIT_TOL = 0.15


@dataclass(frozen=True)
class R3Curve:
    """Expansion locus through the far state (rho_+, u_+, theta_+)."""

    params: GasParams
    rho_plus: float
    u_plus: float
    theta_plus: float

    @property
    def c_plus(self) -> float:
        return float(sound_speed(self.params, self.theta_plus))

    @property
    def invariant(self) -> float:
        return self.u_plus - 2.0 * self.c_plus / (self.params.gamma - 1.0)

    @property
    def w_plus(self) -> float:
        return self.u_plus + self.c_plus

    def state_at_theta(self, theta: float):
        """Left state with temperature theta (< theta_plus) on the curve."""
        p = self.params
        if theta <= 0:
            raise ValueError("theta must be positive")
        if theta >= self.theta_plus:
            raise ValueError("expansion requires theta_minus < theta_plus")
        c = float(sound_speed(p, theta))
        u = self.u_plus - 2.0 / (p.gamma - 1.0) * (self.c_plus - c)
        rho = self.rho_plus * (theta / self.theta_plus) ** (1.0 / (p.gamma - 1.0))
        return rho, u, theta

    def state_from_w(self, w):
        """(rho, u, theta) as functions of the characteristic speed w."""
        p = self.params
        w = np.asarray(w, dtype=float)
        c = (p.gamma - 1.0) / (p.gamma + 1.0) * (w - self.invariant)
        theta = c * c / (p.R * p.gamma)
        rho = self.rho_plus * (theta / self.theta_plus) ** (1.0 / (p.gamma - 1.0))
        u = w - c
        if np.any(rho <= 0) or np.any(rho > self.rho_plus * (1 + 1e-12)):
            raise ValueError("state left the admissible band (0, rho_plus]")
        return rho, u, theta

    def w_of(self, u, theta):
        return np.asarray(u, float) + sound_speed(self.params, theta)


def r3_connect(params: GasParams, plus, theta_minus: float):
    """Left end state on the expansion curve through plus = (rho,u,theta)_+."""
    curve = R3Curve(params, *plus)
    return curve.state_at_theta(theta_minus)


def cq_constant(q: float) -> float:
    """Normalization with int_0^inf C_q y^q e^-y dy = 1, by adaptive
    quadrature (the closed form 1/Gamma(q+1) is kept as a test oracle)."""
    if q < 1:
        raise ValueError("smoothing exponent q must be >= 1")
    val, err = quad(lambda y: y ** q * math.exp(-y), 0.0, np.inf)
    return 1.0 / val


@dataclass(frozen=True)
class BurgersWave:
    """Characteristic speed field of the smoothed fan."""

    w_minus: float
    delta_r: float
    alpha: float = 0.1
    q: float = 1.0

    def __post_init__(self) -> None:
        if self.delta_r < 0:
            raise ValueError("delta_r must be nonnegative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.q < 1:
            raise ValueError("smoothing exponent q must be >= 1")

    @property
    def w_plus(self) -> float:
        return self.w_minus + self.delta_r

    def w0(self, x0):
        x0 = np.asarray(x0, dtype=float)
        z = self.alpha * np.maximum(x0, 0.0)
        return self.w_minus + self.delta_r * gammainc(self.q + 1.0, z)

    def w0_prime(self, x0):
        x0 = np.asarray(x0, dtype=float)
        z = self.alpha * np.maximum(x0, 0.0)
        out = self.delta_r * self.alpha * z ** self.q * np.exp(-z) / gamma_fn(self.q + 1.0)
        return np.where(x0 > 0.0, out, 0.0)

    def eval(self, x, tau):
        """w and w_x at Burgers time tau (no shock: w0 is nondecreasing).

        The characteristic foot x0 solves x0 + w0(x0)*tau = x, bracketed by
        [x - w_plus*tau, x - w_minus*tau]; bisection to width ~1e-16*span and
        two Newton polish steps leave |x0 + w0(x0)tau - x| below 1e-10.
        Points left of the fan edge x <= w_-*tau short-circuit to w_- exactly.
        """
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        w = np.full(x.shape, self.w_minus, dtype=float)
        wx = np.zeros(x.shape, dtype=float)
        act = x > self.w_minus * tau
        if np.any(act):
            xa = x[act]
            lo = xa - self.w_plus * tau
            hi = xa - self.w_minus * tau
            for _ in range(56):
                mid = 0.5 * (lo + hi)
                g = mid + self.w0(mid) * tau - xa
                neg = g < 0.0
                lo = np.where(neg, mid, lo)
                hi = np.where(neg, hi, mid)
            x0 = 0.5 * (lo + hi)
            for _ in range(2):
                g = x0 + self.w0(x0) * tau - xa
                x0 = x0 - g / (1.0 + self.w0_prime(x0) * tau)
            wp = self.w0_prime(x0)
            w[act] = self.w0(x0)
            wx[act] = wp / (1.0 + wp * tau)
        if scalar:
            return float(w[0]), float(wx[0])
        return w, wx

    def residual(self, x, tau):
        """|x0 + w0(x0)tau - x| of the recovered characteristic feet."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        w, _ = self.eval(x, tau)
        # invert w -> x0 through the data is ill-posed on the flat part;
        # recompute the foot the same way eval does and measure directly
        res = np.zeros(x.shape)
        act = x > self.w_minus * tau
        if np.any(act):
            xa = x[act]
            lo = xa - self.w_plus * tau
            hi = xa - self.w_minus * tau
            for _ in range(56):
                mid = 0.5 * (lo + hi)
                g = mid + self.w0(mid) * tau - xa
                neg = g < 0.0
                lo = np.where(neg, mid, lo)
                hi = np.where(neg, hi, mid)
            x0 = 0.5 * (lo + hi)
            for _ in range(2):
                g = x0 + self.w0(x0) * tau - xa
                x0 = x0 - g / (1.0 + self.w0_prime(x0) * tau)
            res[act] = np.abs(x0 + self.w0(x0) * tau - xa)
        return res


def burgers_eval(wave: BurgersWave, x, t):
    """Fan speed field at profile time t (Burgers time tau = 1 + t)."""
    return wave.eval(x, 1.0 + t)


def rarefaction_profile(params: GasParams, curve: R3Curve, wave: BurgersWave,
                        x, t: float):
    """(rho_bar, u_bar, theta_bar) of the smoothed fan at time t.

    Requires w_- >= 0 so the fan moves away from the boundary.
    """
    if wave.w_minus < 0:
        raise ValueError("fan edge speed w_minus must be nonnegative")
    w, _ = burgers_eval(wave, x, t)
    return curve.state_from_w(w)


def rarefaction_slope(params: GasParams, wave: BurgersWave, x, t: float):
    """u_bar_x = 2/(gamma+1) * w_x (all state slopes inherit from w)."""
    _, wx = burgers_eval(wave, x, t)
    return 2.0 / (params.gamma + 1.0) * wx


def exact_fan_profile(params: GasParams, curve: R3Curve, wave: BurgersWave,
                      x, t: float):
    """The sharp self-similar fan: w = clip(x/(1+t), w_-, w_+)."""
    x = np.asarray(x, dtype=float)
    w = np.clip(x / (1.0 + t), wave.w_minus, wave.w_plus)
    return curve.state_from_w(w)


def rarefaction_decay_check(params: GasParams, wave: BurgersWave,
                            p: float, times=None, dx: float = 0.02,
                            pad: float = 40.0) -> dict:
    """Fit the decay exponent of ||u_bar_x||_{L^p} against (1+t).

    Expected slope is -1 + 1/p (p = inf gives -1); module tolerance is
    DECAY_FIT_TOL relative.
    """
    if times is None:
        times = np.geomspace(1.0, 100.0, 24)
    times = np.asarray(times, dtype=float)
    vals = []
    for t in times:
        tau = 1.0 + t
        x = np.arange(0.0, wave.w_plus * tau + pad, dx)
        ux = rarefaction_slope(params, wave, x, t)
        if np.isinf(p):
            vals.append(np.abs(ux).max())
        else:
            vals.append(np.trapezoid(np.abs(ux) ** p, x) ** (1.0 / p))
    slope = float(np.polyfit(np.log1p(times), np.log(vals), 1)[0])
    expected = -1.0 if np.isinf(p) else -1.0 + 1.0 / p
    return {
        "p": p,
        "fitted": slope,
        "expected": expected,
        "passed": abs(slope - expected) <= DECAY_FIT_TOL * abs(expected),
        "times": times,
        "norms": np.asarray(vals),
    }


@dataclass
class CompositeProfile:
    """Layer + fan superposition sharing the intermediate (star) state:

        (rho, u, theta)^hat (x,t) = tilde(x) + bar(x,t) - star,

    with zero electromagnetic part.  Either wave part may be absent: a pure
    layer uses bar == star (= the layer's far state), a pure fan uses
    tilde == star (= the fan's left state).
    """

    params: GasParams
    star: tuple          # (rho, u, theta) shared state
    layer: LayerProfile | None = None
    curve: R3Curve | None = None
    wave: BurgersWave | None = None

    def __post_init__(self) -> None:
        if self.layer is None and self.wave is None:
            raise ValueError("composite needs at least one wave component")
        if (self.curve is None) != (self.wave is None):
            raise ValueError("fan part needs both curve and wave")

    def eval(self, x, t: float):
        x = np.asarray(x, dtype=float)
        r_s, u_s, th_s = self.star
        if self.layer is not None:
            r_t, u_t, th_t = self.layer.eval(x)
        else:
            r_t = np.full(x.shape, r_s)
            u_t = np.full(x.shape, u_s)
            th_t = np.full(x.shape, th_s)
        if self.wave is not None:
            r_b, u_b, th_b = rarefaction_profile(self.params, self.curve,
                                                 self.wave, x, t)
        else:
            r_b = np.full(x.shape, r_s)
            u_b = np.full(x.shape, u_s)
            th_b = np.full(x.shape, th_s)
        return r_t + r_b - r_s, u_t + u_b - u_s, th_t + th_b - th_s

    def eval_em(self, x, t: float):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape), np.zeros(x.shape)


def superpose(params: GasParams, layer: LayerProfile | None,
              curve: R3Curve | None, wave: BurgersWave | None,
              star) -> CompositeProfile:
    """Assemble the composite profile; star = (rho, u, theta)_*."""
    return CompositeProfile(params=params, star=tuple(map(float, star)),
                            layer=layer, curve=curve, wave=wave)
