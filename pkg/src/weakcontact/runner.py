"""Suite orchestration: configuration in, :class:`CheckReport` out."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import gallery
from .contact import (
    DEFAULT_TOL,
    LadderLevel,
    classify,
    construct_from_killing,
    einstein_diagnostic,
    identity_suite,
    verify_axioms,
)
from .errors import InvalidConfig
from .expr import scalar_field
from .jets import MAX_ORDER
from .manifold import Field, SamplePlan, sample_points
from .oracle import ORACLE_TOL, oracle_report
from .report import CheckReport, aggregate, skipped
from .riemann import hybrid_residual
from .soliton import Potential, SolitonParams, TwoPotentials, lemma_checks, soliton_check, theorem51_diagnostic

__all__ = ["SolitonSpec", "RunConfig", "run_suite", "SUITES", "MIN_ORDER", "load_config", "SEED_ENV"]

SUITES = (
    "axioms",
    "n_tensors",
    "contact_identities",
    "kcontact_identities",
    "einstein",
    "soliton",
    "lemmas",
    "oracle",
)
MIN_ORDER = {
    "axioms": 2,
    "n_tensors": 3,
    "contact_identities": 3,
    "kcontact_identities": 3,
    "einstein": 3,
    "soliton": 2,
    "lemmas": 3,
    "oracle": 2,
}
SEED_ENV = "WEAKCONTACT_SEED"
ORACLE_POINTS = 20
# generic smooth test potential for the lemma suite (coordinates x0, x1, x2)
TEST_POTENTIAL = "sin(x0) * cos(x1) + 0.3 * sin(x2 + 0.5 * x0) + 0.2 * x1 * x2"


@dataclass
class SolitonSpec:
    c1: float = 0.0
    c2: float = 0.0
    lam: float = 0.0
    potential: str | None = None
    potential2: str | None = None

    @property
    def params(self) -> SolitonParams:
        return SolitonParams(self.c1, self.c2, self.lam)


@dataclass
class RunConfig:
    manifold: str = "ellipsoid"
    params: dict = field(default_factory=dict)
    suites: tuple = SUITES
    sampling: SamplePlan = field(default_factory=SamplePlan)
    tolerance: float = DEFAULT_TOL
    jet_order: int = MAX_ORDER
    soliton: SolitonSpec | None = None
    output: str | None = None
    format: str = "text"

    def validate(self) -> "RunConfig":
        if not self.suites:
            raise InvalidConfig("at least one suite is required")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise InvalidConfig(f"unknown suite(s) {', '.join(bad)}; choose from {', '.join(SUITES)}")
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise InvalidConfig("tolerance must be positive")
        if self.jet_order not in (2, 3):
            raise InvalidConfig("jet_order must be 2 or 3")
        if self.format not in ("text", "json"):
            raise InvalidConfig("format must be text or json")
        return self


def resolve_suites(value) -> tuple:
    if value is None:
        return SUITES
    if isinstance(value, str):
        value = [v for v in value.split(",") if v]
    out = []
    for v in value:
        out.extend(SUITES if v == "all" else [v])
    return tuple(dict.fromkeys(out))


def load_config(data: dict) -> RunConfig:
    """Build a :class:`RunConfig` from a JSON-style mapping (field names as in RunConfig)."""
    if not isinstance(data, dict):
        raise InvalidConfig("configuration must be a JSON object")
    known = {"manifold", "params", "suites", "sampling", "tolerance", "jet_order", "soliton", "output", "format"}
    extra = set(data) - known
    if extra:
        raise InvalidConfig(f"unknown configuration key(s): {', '.join(sorted(extra))}")
    man = data.get("manifold", "ellipsoid")
    params = dict(data.get("params", {}))
    if isinstance(man, dict):
        params = {**man.get("params", {}), **params}
        man = man.get("name")
    if not isinstance(man, str):
        raise InvalidConfig("manifold must be a name")
    samp = data.get("sampling", {}) or {}
    try:
        plan = SamplePlan(**{k: samp[k] for k in ("count", "seed", "margin") if k in samp})
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"bad sampling block: {exc}") from None
    sol = data.get("soliton")
    spec = None
    if sol is not None:
        sol = dict(sol)
        if "lambda" in sol:
            sol["lam"] = sol.pop("lambda")
        try:
            spec = SolitonSpec(**sol)
        except TypeError as exc:
            raise InvalidConfig(f"bad soliton block: {exc}") from None
    return RunConfig(
        manifold=man,
        params=params,
        suites=resolve_suites(data.get("suites")),
        sampling=plan,
        tolerance=float(data.get("tolerance", DEFAULT_TOL)),
        jet_order=int(data.get("jet_order", MAX_ORDER)),
        soliton=spec,
        output=data.get("output"),
        format=data.get("format", "text"),
    ).validate()


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InvalidConfig(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# -- suites ----------------------------------------------------------------

def _n_tensor_suite(S, pts, tol) -> CheckReport:
    rep = CheckReport()
    locs = [S.local(p) for p in pts]

    def anti(arr, axes):
        return hybrid_residual(arr, -np.swapaxes(arr, *axes))

    rep.add(aggregate("n_tensors.N1_antisymmetric", "N1(X,Y) = -N1(Y,X)", [anti(ls.N_frame["N1"], (0, 1)) for ls in locs], tol))
    rep.add(aggregate("n_tensors.N2_antisymmetric", "N2(X,Y) = -N2(Y,X)", [anti(ls.N_frame["N2"], (0, 1)) for ls in locs], tol))
    rep.add(aggregate("n_tensors.N5_antisymmetric", "N5(X,Y,Z) = -N5(X,Z,Y)", [anti(ls.N_frame["N5"], (1, 2)) for ls in locs], tol))
    rep.add(aggregate("n_tensors.N2_vanishes", "N2 = 0", [hybrid_residual(ls.N_frame["N2"], 0.0) for ls in locs], tol))
    rep.add(aggregate("n_tensors.N4_vanishes", "N4 = 0", [hybrid_residual(ls.N_frame["N4"], 0.0) for ls in locs], tol))
    rep.add(aggregate("n_tensors.N3_vanishes", "N3 = 0 iff xi Killing", [hybrid_residual(ls.N_frame["N3"], 0.0) for ls in locs], tol))
    n1 = max(hybrid_residual(ls.N_frame["N1"], 0.0) for ls in locs)
    rep.meta["n_tensors"] = {"N1_max": n1, "normal": bool(n1 < tol)}
    return rep


def _soliton_data(spec: SolitonSpec, names):
    if spec.potential is None:
        return None
    f1 = scalar_field(spec.potential, names)
    if spec.potential2 is None:
        return Potential(f1)
    return TwoPotentials(f1, scalar_field(spec.potential2, names))


def _soliton_suite(S, pts, cfg: RunConfig) -> CheckReport:
    rep = CheckReport()
    tol = cfg.tolerance
    anchor = "Hess f = -c1 df (x) df + c2 Ric + lam g"
    spec = cfg.soliton
    if spec is None:
        rep.add(skipped("soliton.residual", anchor, tol, "no soliton parameters configured"))
        rep.add(skipped("theorem51.grad_f_vanishes", "f = const", tol, "no soliton parameters configured"))
        rep.add(skipped("theorem51.einstein", "Ric = (tau / (2n+1)) g when c2 != 0", tol, "no soliton parameters configured"))
        return rep
    data = _soliton_data(spec, S.chart.labels)
    if data is None:
        data = Potential(Field.constant(0.0, "scalar", "0"))
    rep.add(aggregate("soliton.residual", anchor, [soliton_check(S, data, spec.params, p) for p in pts], tol))
    if isinstance(data, Potential):
        rep.extend(theorem51_diagnostic(S, data.f, spec.params, pts, tol))
    else:
        rep.add(skipped("theorem51.grad_f_vanishes", "f = const", tol, "two-potential data"))
        rep.add(skipped("theorem51.einstein", "Ric = (tau / (2n+1)) g when c2 != 0", tol, "two-potential data"))
    return rep


def _lemma_suite(S, pts, cfg: RunConfig) -> CheckReport:
    tol = cfg.tolerance
    names = S.chart.labels
    xi_data = None
    test = Potential(scalar_field(TEST_POTENTIAL.replace("x0", names[0]).replace("x1", names[1]).replace("x2", names[2]), names))
    spec = cfg.soliton
    sol_data = _soliton_data(spec, names) if spec is not None else None
    params = spec.params if spec is not None else None
    rows = {k: [] for k in ("L51", "L51Q", "L52", "L53")}
    reasons: dict = {}

    from .soliton import VectorFieldData

    xi_data = VectorFieldData(S.xi)
    for p in pts:
        ls = S.local(p)
        for Y in ls.E:
            r_xi = lemma_checks(S, xi_data, p, Y, None, tol)["L51"]
            r_test = lemma_checks(S, test, p, Y, None, tol)
            for key, out in (("L51", r_xi), ("L51Q", r_test["L51Q"]), ("L52", r_test["L52"])):
                if out.skipped:
                    reasons[key] = out.skip_reason
                else:
                    rows[key].append(out.residual)
            if sol_data is not None:
                r = lemma_checks(S, sol_data, p, Y, params, tol)["L53"]
                if r.skipped:
                    reasons["L53"] = r.skip_reason
                else:
                    rows["L53"].append(r.residual)
    if sol_data is None:
        reasons["L53"] = "no soliton potential configured"
    anchors = {
        "L51": "(L_xi L_X g)(Y, xi) = g(X,Y) + g(nabla_xi nabla_xi X, Y) + Y g(nabla_xi X, xi), X = xi",
        "L51Q": "(L_xi L_X g)(Y, xi) = g(QX,Y) + g(nabla_xi nabla_xi X, Y) + Y g(nabla_xi X, xi)",
        "L52": "L_xi(df (x) df)(Y, xi) = Y(xi f) xi(f) + Y(f) xi(xi f)",
        "L53": "nabla_xi grad f = (lam + 2 c2 n + c2 tr Qtilde) xi - c1 xi(f) grad f",
    }
    rep = CheckReport()
    for key, vals in rows.items():
        name = f"lemmas.{key}"
        if vals and key not in reasons:
            rep.add(aggregate(name, anchors[key], vals, tol))
        else:
            rep.add(skipped(name, anchors[key], tol, reasons.get(key, "no points evaluated")))
    return rep


def run_suite(config: RunConfig) -> CheckReport:
    """Run the configured suites; raises for unknown manifolds or degenerate structures."""
    cfg = config.validate()
    t0 = time.perf_counter()
    try:
        entry = gallery.get(cfg.manifold, cfg.params)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None
    chart = entry.chart
    pts = sample_points(chart, cfg.sampling)
    S = construct_from_killing(chart, entry.xi, order=cfg.jet_order)
    tol = cfg.tolerance
    rep = CheckReport()
    for suite in cfg.suites:
        if cfg.jet_order < MIN_ORDER[suite]:
            rep.add(skipped(suite, "", tol, f"suite needs jet order {MIN_ORDER[suite]}"))
            continue
        if suite == "axioms":
            part = verify_axioms(S, pts, tol)
        elif suite == "n_tensors":
            part = _n_tensor_suite(S, pts, tol)
        elif suite == "contact_identities":
            part = identity_suite(S, pts, "ContactMetric", tol)
        elif suite == "kcontact_identities":
            part = identity_suite(S, pts, "KContact", tol)
        elif suite == "einstein":
            part = einstein_diagnostic(S, pts, tol)
        elif suite == "soliton":
            part = _soliton_suite(S, pts, cfg)
        elif suite == "lemmas":
            part = _lemma_suite(S, pts, cfg)
        else:
            part = oracle_report(chart, pts[:ORACLE_POINTS], tol=max(ORACLE_TOL, tol))
        rep.extend(part)
    cls = classify(S, pts[: min(10, len(pts))], tol)
    rep.meta.update(
        {
            "manifold": cfg.manifold,
            "params": entry.params,
            "seed": cfg.sampling.seed,
            "count": cfg.sampling.count,
            "margin": cfg.sampling.margin,
            "jet_order": cfg.jet_order,
            "tolerance": tol,
            "suites": list(cfg.suites),
            "classification": {"level": cls.level.label, "normal": cls.normal, "classical": cls.classical},
            "wall_time": round(time.perf_counter() - t0, 3),
        }
    )
    if cfg.soliton is not None:
        rep.meta["soliton"] = asdict(cfg.soliton)
    return rep
