"""Registry of named test fields with hand-written analytic jets.

Each family records what is expected of it (asymptotically constant,
umbilic free, positively curved) so scans and profiles can report
measured behaviour against the expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import ScalarField

E = math.e


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: tuple
    defaults: dict
    asymptotically_constant: bool
    umbilic_free: bool | None
    positively_curved: bool | None
    notes: str


def _zeros_like(x):
    return np.zeros_like(x)


# ---------------------------------------------------------------------------
# jets of the individual families
# ---------------------------------------------------------------------------

def _saddle_jets(x, y):
    z = _zeros_like(x)
    return (x * y, y.copy(), x.copy(), z, np.ones_like(x), z)


def _cylinder_jets(x, y):
    z = _zeros_like(x)
    return (x * x, 2.0 * x, z, np.full_like(x, 2.0), z, z)


def _paraboloid_jets(x, y):
    z = _zeros_like(x)
    return (x * x + y * y, 2.0 * x, 2.0 * y,
            np.full_like(x, 2.0), z, np.full_like(x, 2.0))


def _sphere_cap_jets(x, y):
    r2 = x * x + y * y
    w = np.sqrt(1.0 - r2)
    w3 = w * w * w
    # r2/(1+w) equals 1 - w without the cancellation near the origin
    return (r2 / (1.0 + w), x / w, y / w,
            1.0 / w + x * x / w3, x * y / w3, 1.0 / w + y * y / w3)


def _gaussian_jets(x, y):
    e = np.exp(-(x * x + y * y))
    return (e, -2.0 * x * e, -2.0 * y * e,
            (4.0 * x * x - 2.0) * e, 4.0 * x * y * e, (4.0 * y * y - 2.0) * e)


def _inverse_quadratic_jets(x, y):
    u = 1.0 / (1.0 + x * x + y * y)
    u2, u3 = u * u, u * u * u
    return (u, -2.0 * x * u2, -2.0 * y * u2,
            -2.0 * u2 + 8.0 * x * x * u3, 8.0 * x * y * u3,
            -2.0 * u2 + 8.0 * y * y * u3)


def _radial_jets_from_profile(F, F1, F2):
    """Jets of f(x, y) = F(r) from the radial profile and its derivatives.

    F1 must vanish at r = 0 for the Cartesian Hessian to stay finite there.
    """

    def jets(x, y):
        r = np.hypot(x, y)
        f = F(r)
        df = F1(r)
        ddf = F2(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            cx, cy = np.where(r > 0.0, x / np.maximum(r, 1e-300), 0.0), \
                     np.where(r > 0.0, y / np.maximum(r, 1e-300), 0.0)
            inv_r = np.where(r > 0.0, 1.0 / np.maximum(r, 1e-300), 0.0)
        f1 = df * cx
        f2 = df * cy
        # limit r -> 0 (requires F1(0) = 0): Hessian = F2(0) * identity
        f11 = np.where(r > 0.0, ddf * cx * cx + df * cy * cy * inv_r, ddf)
        f12 = np.where(r > 0.0, (ddf - df * inv_r) * cx * cy, 0.0)
        f22 = np.where(r > 0.0, ddf * cy * cy + df * cx * cx * inv_r, ddf)
        return f, f1, f2, f11, f12, f22

    return jets


def _smoothstep5(t):
    """Quintic smoothstep with vanishing first and second derivatives at 0, 1."""
    t = np.clip(t, 0.0, 1.0)
    chi = t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)
    dchi = 30.0 * t * t * (1.0 - t) ** 2
    ddchi = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    return chi, dchi, ddchi


def _loglog_profile(r):
    r = np.asarray(r, dtype=float)
    safe = np.maximum(r, E)  # the cutoff kills everything below r = e
    lg = np.log(safe)
    L = np.log(lg)
    L1 = 1.0 / (safe * lg)
    L2 = -(1.0 + lg) / (safe * lg) ** 2
    chi, dchi, ddchi = _smoothstep5(r - E)
    F = chi * L
    F1 = dchi * L + chi * L1
    F2 = ddchi * L + 2.0 * dchi * L1 + chi * L2
    low = r <= E
    return (np.where(low, 0.0, F), np.where(low, 0.0, F1), np.where(low, 0.0, F2))


def _loglog_jets(x, y):
    def F(r):
        return _loglog_profile(r)[0]

    def F1(r):
        return _loglog_profile(r)[1]

    def F2(r):
        return _loglog_profile(r)[2]

    return _radial_jets_from_profile(F, F1, F2)(x, y)


def _bates_like_jets(lam):
    def jets(x, y):
        s = x + y * y
        w = 1.0 + s * s
        phi = s / np.sqrt(w)
        dphi = w ** -1.5
        ddphi = -3.0 * s * w ** -2.5
        f = 1.0 + lam * phi
        f1 = lam * dphi
        f2 = lam * dphi * 2.0 * y
        f11 = lam * ddphi
        f12 = lam * ddphi * 2.0 * y
        f22 = lam * (ddphi * 4.0 * y * y + 2.0 * dphi)
        return f, f1, f2, f11, f12, f22

    return jets


def _ridge_jets(lam):
    def jets(x, y):
        w = np.sqrt(1.0 + x * x)
        z = _zeros_like(x)
        return (1.0 + lam * w, lam * x / w, z, lam / w ** 3, z, z)

    return jets


# 1D profiles for the separable families: value, slope, curvature
_PROFILES = {
    "sqrtlin": (lambda t: np.sqrt(1.0 + t * t) + t,
                lambda t: t / np.sqrt(1.0 + t * t) + 1.0,
                lambda t: (1.0 + t * t) ** -1.5),
    "exp": (np.exp, np.exp, np.exp),
}


def _separable_jets(lam, gname, hname):
    g, g1, g2 = _PROFILES[gname]
    h, h1, h2 = _PROFILES[hname]

    def jets(x, y):
        z = _zeros_like(x)
        return (1.0 + lam * (g(x) + h(y)), lam * g1(x), lam * h1(y),
                lam * g2(x), z, lam * h2(y))

    return jets


def _asym_bump_jets(x, y):
    e = np.exp(-(x * x + y * y))
    p = 1.0 + 0.3 * x + 0.2 * x * y
    p1 = 0.3 + 0.2 * y
    p2 = 0.2 * x
    p12 = np.full_like(x, 0.2)
    f = e * p
    f1 = e * (p1 - 2.0 * x * p)
    f2 = e * (p2 - 2.0 * y * p)
    f11 = e * (-4.0 * x * p1 + (4.0 * x * x - 2.0) * p)
    f12 = e * (p12 - 2.0 * y * p1 - 2.0 * x * p2 + 4.0 * x * y * p)
    f22 = e * (-4.0 * y * p2 + (4.0 * y * y - 2.0) * p)
    return f, f1, f2, f11, f12, f22


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _require_positive_lam(params):
    lam = float(params.get("lam", 0.1))
    if lam <= 0.0:
        raise ValueError(f"parameter lam must be positive, got {lam}")
    return lam


def _build_saddle(**params):
    return ScalarField("saddle", _saddle_jets, meta={"umbilic_free": True})


def _build_cylinder(**params):
    return ScalarField("cylinder", _cylinder_jets,
                       meta={"umbilic_free": True, "ruled_direction": (0.0, 1.0)})


def _build_paraboloid(**params):
    return ScalarField("paraboloid", _paraboloid_jets,
                       meta={"umbilic_free": False, "umbilics": ((0.0, 0.0),)})


def _build_sphere_cap(**params):
    def domain(x, y):
        return x * x + y * y < 1.0

    return ScalarField("sphere_cap", _sphere_cap_jets, domain=domain,
                       sample_box=(-0.6, 0.6),
                       meta={"totally_umbilic": True, "positively_curved": True})


def _build_gaussian_bump(**params):
    return ScalarField("gaussian_bump", _gaussian_jets, asymptotic_c=0.0,
                       meta={"grad_decay_fast": True})


def _build_inverse_quadratic(**params):
    return ScalarField("inverse_quadratic", _inverse_quadratic_jets,
                       asymptotic_c=0.0, meta={"grad_decay_fast": True})


def _build_loglog_tail(**params):
    return ScalarField("loglog_tail", _loglog_jets, sample_box=(-6.0, 6.0),
                       meta={"grad_decay_fast": True, "bounded": False,
                             "cutoff_interval": (E, E + 1.0)})


def _build_bates_like(**params):
    lam = _require_positive_lam(params)
    return ScalarField("bates_like", _bates_like_jets(lam), params={"lam": lam},
                       meta={"umbilic_free": True, "bounded": True,
                             "bounds": (1.0 - lam, 1.0 + lam),
                             "directional_limits": {0.0: 1.0 + lam, math.pi: 1.0 - lam},
                             "asymptotically_constant": False})


def _build_ridge(**params):
    lam = _require_positive_lam(params)
    return ScalarField("ridge", _ridge_jets(lam), params={"lam": lam},
                       meta={"umbilic_free": True, "singularity": "ridge"})


def _build_cone_type(**params):
    lam = _require_positive_lam(params)
    return ScalarField("cone_type", _separable_jets(lam, "sqrtlin", "sqrtlin"),
                       params={"lam": lam},
                       meta={"umbilic_free": True, "positively_curved": True,
                             "singularity": "cone"})


def _build_separable(**params):
    lam = _require_positive_lam(params)
    g = params.get("g", "exp")
    h = params.get("h", "exp")
    for prof in (g, h):
        if prof not in _PROFILES:
            raise ValueError(f"unknown profile '{prof}'; options: {sorted(_PROFILES)}")
    return ScalarField("separable", _separable_jets(lam, g, h),
                       params={"lam": lam, "g": g, "h": h},
                       meta={"umbilic_free": True, "positively_curved": True})


def _build_asym_bump(**params):
    return ScalarField("asym_bump", _asym_bump_jets, asymptotic_c=0.0,
                       meta={"grad_decay_fast": True, "synthetic": True,
                             "notes": "asymmetric decaying test field"})


_REGISTRY = {
    "saddle": (_build_saddle, FamilySpec(
        "saddle", (), {}, False, True, False, "f = x*y, negatively curved")),
    "cylinder": (_build_cylinder, FamilySpec(
        "cylinder", (), {}, False, True, False,
        "f = x^2, parabolic cylinder ruled along y")),
    "paraboloid": (_build_paraboloid, FamilySpec(
        "paraboloid", (), {}, False, False, True,
        "f = x^2 + y^2, single umbilic at the origin")),
    "sphere_cap": (_build_sphere_cap, FamilySpec(
        "sphere_cap", (), {}, False, False, True,
        "f = 1 - sqrt(1 - r^2) on r < 1, totally umbilic")),
    "gaussian_bump": (_build_gaussian_bump, FamilySpec(
        "gaussian_bump", (), {}, True, None, None, "f = exp(-r^2), c = 0")),
    "inverse_quadratic": (_build_inverse_quadratic, FamilySpec(
        "inverse_quadratic", (), {}, True, None, None, "f = 1/(1 + r^2), c = 0")),
    "loglog_tail": (_build_loglog_tail, FamilySpec(
        "loglog_tail", (), {}, False, None, None,
        "log(log r) outside a compact set, unbounded but with fast gradient decay")),
    "bates_like": (_build_bates_like, FamilySpec(
        "bates_like", ("lam",), {"lam": 0.1}, False, True, False,
        "bounded umbilic-free graph 1 + lam*(x+y^2)/sqrt(1+(x+y^2)^2)")),
    "ridge": (_build_ridge, FamilySpec(
        "ridge", ("lam",), {"lam": 0.1}, False, True, False,
        "1 + lam*sqrt(1+x^2); inversion has a ridge-type singular point")),
    "cone_type": (_build_cone_type, FamilySpec(
        "cone_type", ("lam",), {"lam": 0.1}, False, True, True,
        "1 + lam*(sqrt(1+x^2)+x+sqrt(1+y^2)+y), positively curved")),
    "separable": (_build_separable, FamilySpec(
        "separable", ("lam", "g", "h"), {"lam": 0.1, "g": "exp", "h": "exp"},
        False, True, True,
        "1 + lam*(g(x)+h(y)) with monotone convex profiles")),
    "asym_bump": (_build_asym_bump, FamilySpec(
        "asym_bump", (), {}, True, None, None,
        "synthetic asymmetric decaying field for flux decay runs")),
}


def make_field(name: str, **params) -> ScalarField:
    """Instantiate a registered family by name, e.g. make_field('ridge', lam=0.1)."""
    if name not in _REGISTRY:
        raise ValueError(f"unknown field '{name}'; known: {', '.join(sorted(_REGISTRY))}")
    builder, spec = _REGISTRY[name]
    unknown = set(params) - set(spec.params)
    if unknown:
        raise ValueError(f"field '{name}' takes parameters {spec.params}, "
                         f"got unknown {sorted(unknown)}")
    merged = dict(spec.defaults)
    merged.update(params)
    return builder(**merged)


def list_families():
    """All registered family specs, sorted by name."""
    return [spec for _, spec in (_REGISTRY[k] for k in sorted(_REGISTRY))]


def parse_field_spec(text: str) -> ScalarField:
    """Parse CLI syntax 'name' or 'name:lam=0.1,g=exp' into a field."""
    name, _, tail = text.partition(":")
    params = {}
    if tail:
        for item in tail.split(","):
            key, _, val = item.partition("=")
            if not _:
                raise ValueError(f"malformed field parameter '{item}'")
            key = key.strip()
            val = val.strip()
            if key in ("g", "h"):
                params[key] = val
            else:
                params[key] = float(val)
    return make_field(name.strip(), **params)
