"""Batch verification driver.

Config files are line-oriented ``key = value`` text; ``#`` starts a
comment and unknown keys are errors.  Reports are bit-exact: one

    CHECK <id> <PASS|FAIL> defect=<17 significant digits> tol=<decimal>

line per check record and a final ``SUMMARY pass=<k> fail=<m>
seed=<seed>`` line; a JSON mirror with the same fields plus the echoed
config and toolkit version is written next to the text report.  Two runs
with the same config produce byte-identical output (all randomness is
counter-based off the config seed).

Exit codes: 0 all checks pass, 1 at least one FAIL, 2 configuration or
usage error.
"""

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .charts import (
    complex_hyperbolic_chart,
    flat_chart,
    fubini_study_chart,
    polynomial_chart,
    s6_chart,
)
from .defaults import CHART_TOL, DEFAULT_REFINE_STEPS, DEFAULT_SAMPLES, STRUCTURAL_TOL
from .diffgeo import nearly_kahler_defect, nk_identities, schur_scan
from .hermitian import make_standard_point, structure_defects
from .invariants import (
    Label,
    LemmaHypothesisError,
    antiholo_range,
    classify,
    contractions,
    lemma_defect,
    prop1_report,
    reconstruct_curvature,
    symmetry_defects,
    trace_nu,
)
from .octonion import s6_curvature, s6_point
from .rng import substream
from .tensors import kahler_space_form, product_curvature, zero_tensor

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "CheckRecord",
    "Report",
    "parse_config",
    "run_scenario",
    "main",
]

MODELS = ("cn", "cpn", "cdn", "s6", "product", "custom-chart")
CHECK_ORDER = (
    "structure",
    "symmetry",
    "lemma",
    "prop1",
    "identities",
    "nk",
    "schur",
    "classify",
)
# checks that make sense per model (identities/nk/schur need a chart)
_MODEL_CHECKS = {
    "cn": set(CHECK_ORDER),
    "cpn": set(CHECK_ORDER),
    "cdn": set(CHECK_ORDER),
    "s6": set(CHECK_ORDER),
    "product": {"structure", "symmetry", "lemma", "prop1", "classify"},
    "custom-chart": {"structure", "identities"},
}
# default check sets are expected to PASS; the product model deliberately
# violates the constant-curvature identities, so those stay opt-in there
_MODEL_DEFAULT_CHECKS = dict(
    _MODEL_CHECKS, product={"structure", "symmetry", "classify"}
)

_CONFIG_FIELDS = (
    "model",
    "n",
    "c",
    "tol_structural",
    "tol_chart",
    "samples",
    "refine_steps",
    "seed",
    "checks",
    "report_path",
)


class ConfigError(ValueError):
    """Invalid configuration or usage."""


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    n: int = 3
    c: float = 4.0
    tol_structural: float = STRUCTURAL_TOL
    tol_chart: float = CHART_TOL
    samples: int = DEFAULT_SAMPLES
    refine_steps: int = DEFAULT_REFINE_STEPS
    seed: int = 0
    checks: Optional[tuple] = None  # None: every check the model supports
    report_path: Optional[str] = None

    def __post_init__(self):
        if self.checks is None and self.model in _MODEL_CHECKS:
            allowed = _MODEL_DEFAULT_CHECKS[self.model]
            checks = tuple(
                c
                for c in CHECK_ORDER
                if c in allowed and not (c == "classify" and 2 * self.n < 6)
            )
            object.__setattr__(self, "checks", checks)

    def validate(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model '{self.model}'")
        if self.n < 1:
            raise ConfigError("n must be a positive integer")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.refine_steps < 0:
            raise ConfigError("refine_steps must be >= 0")
        if self.tol_structural <= 0 or self.tol_chart <= 0:
            raise ConfigError("tolerances must be positive")
        if self.checks is None or not self.checks:
            raise ConfigError("checks must not be empty")
        for c in self.checks:
            if c not in CHECK_ORDER:
                raise ConfigError(f"unknown check '{c}'")
            if c not in _MODEL_CHECKS[self.model]:
                raise ConfigError(f"check '{c}' is not applicable to model '{self.model}'")
        if self.model == "cpn" and self.c <= 0:
            raise ConfigError("model cpn needs c > 0")
        if self.model == "cdn" and self.c >= 0:
            raise ConfigError("model cdn needs c < 0")
        if self.model == "product" and self.c <= 0:
            raise ConfigError("model product needs c > 0")
        if self.model == "s6" and self.n != 3:
            raise ConfigError("model s6 has n = 3")
        if self.model == "product" and self.n < 2:
            raise ConfigError("model product needs n >= 2 (two factors)")
        if self.model in ("cn", "cpn", "cdn") and self.n < 2:
            raise ConfigError(f"model {self.model} needs n >= 2")
        if "classify" in self.checks and 2 * self.n < 6:
            raise ConfigError("check 'classify' needs dimension 2n >= 6")
        return self

    def as_dict(self) -> dict:
        out = {}
        for f in _CONFIG_FIELDS:
            v = getattr(self, f)
            out[f] = list(v) if f == "checks" else v
        return out

    @staticmethod
    def from_dict(data: dict) -> "ScenarioConfig":
        kwargs = dict(data)
        if "checks" in kwargs:
            kwargs["checks"] = _canonical_checks(tuple(kwargs["checks"]))
        return ScenarioConfig(**kwargs).validate()


def _canonical_checks(checks) -> tuple:
    seen = set(checks)
    unknown = seen - set(CHECK_ORDER)
    if unknown:
        raise ConfigError(f"unknown check '{sorted(unknown)[0]}'")
    return tuple(c for c in CHECK_ORDER if c in seen)


_PARSERS = {
    "model": str,
    "n": int,
    "c": float,
    "tol_structural": float,
    "tol_chart": float,
    "samples": int,
    "refine_steps": int,
    "seed": int,
    "report_path": str,
}


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``key = value`` configuration text (see module docstring)."""
    data = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in data:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        data[key] = value
    if "model" not in data:
        raise ConfigError("config must set 'model'")
    kwargs = {}
    for key, value in data.items():
        if key == "checks":
            kwargs[key] = _canonical_checks(
                tuple(s.strip() for s in value.split(",") if s.strip())
            )
        else:
            try:
                kwargs[key] = _PARSERS[key](value)
            except ValueError as exc:
                raise ConfigError(f"bad value for '{key}': {value!r}") from exc
    return ScenarioConfig(**kwargs).validate()


@dataclass(frozen=True)
class CheckRecord:
    id: str
    defect: float
    tol: float

    @property
    def status(self) -> str:
        return "PASS" if self.defect <= self.tol else "FAIL"


@dataclass(frozen=True)
class Report:
    records: tuple
    config: ScenarioConfig
    version: str
    seed: int

    @property
    def n_pass(self) -> int:
        return sum(1 for r in self.records if r.status == "PASS")

    @property
    def n_fail(self) -> int:
        return len(self.records) - self.n_pass

    @property
    def all_pass(self) -> bool:
        return self.n_fail == 0

    def render_text(self) -> str:
        lines = [
            f"CHECK {r.id} {r.status} defect={r.defect:.17g} tol={r.tol:.17g}"
            for r in self.records
        ]
        lines.append(f"SUMMARY pass={self.n_pass} fail={self.n_fail} seed={self.seed}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "seed": self.seed,
            "config": self.config.as_dict(),
            "checks": [
                {"id": r.id, "status": r.status, "defect": r.defect, "tol": r.tol}
                for r in self.records
            ],
            "summary": {"pass": self.n_pass, "fail": self.n_fail},
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# model construction


@dataclass(frozen=True)
class _Model:
    point: object
    tensor: object
    chart: object
    expected_label: Optional[Label]
    expected_nu: Optional[float]


def _build_model(cfg: ScenarioConfig) -> _Model:
    n, c, seed = cfg.n, cfg.c, cfg.seed
    if cfg.model == "cn":
        P = make_standard_point(n)
        return _Model(P, zero_tensor(P), flat_chart(n), Label.CN, 0.0)
    if cfg.model == "cpn":
        P = make_standard_point(n)
        return _Model(P, kahler_space_form(P, c), fubini_study_chart(n, c),
                      Label.CPN, c / 4.0)
    if cfg.model == "cdn":
        P = make_standard_point(n)
        return _Model(P, kahler_space_form(P, c), complex_hyperbolic_chart(n, c),
                      Label.CDN, c / 4.0)
    if cfg.model == "s6":
        rng = substream(seed, "s6-base-point")
        p = rng.standard_normal(7)
        p = p / np.linalg.norm(p)
        P = s6_point(p, frame_seed=seed)
        return _Model(P, s6_curvature(P), s6_chart(p, seed=seed), Label.S6, 1.0)
    if cfg.model == "product":
        P1 = make_standard_point(1)
        Pk = make_standard_point(n - 1)
        spec = product_curvature([
            (P1, kahler_space_form(P1, c)),
            (Pk, kahler_space_form(Pk, c)),
        ])
        return _Model(spec.point, spec.tensor, None, Label.NON_CONSTANT, None)
    if cfg.model == "custom-chart":
        chart = polynomial_chart(n, seed)
        u = chart.domain.sample(substream(seed, "chart-point"), shrink=0.3)
        from .diffgeo import pointwise_data

        P, R = pointwise_data(chart, u, tol=cfg.tol_chart)
        return _Model(P, R, chart, None, None)
    raise ConfigError(f"unknown model '{cfg.model}'")


# ---------------------------------------------------------------------------
# individual checks


def _check_structure(cfg, model):
    j_sq, compat = structure_defects(model.point)
    t = cfg.tol_structural
    return [
        CheckRecord("structure.j_square", j_sq, t),
        CheckRecord("structure.compat", compat, t),
    ]


def _check_symmetry(cfg, model):
    c1, c2, c3, c4 = symmetry_defects(model.tensor, model.point)
    t = cfg.tol_structural
    return [
        CheckRecord("symmetry.antisym_12", c1, t),
        CheckRecord("symmetry.bianchi", c2, t),
        CheckRecord("symmetry.antisym_34", c3, t),
        CheckRecord("symmetry.j_invariance", c4, t),
    ]


def _check_lemma(cfg, model):
    P, R = model.point, model.tensor
    ric = contractions(R, P)
    nu = trace_nu(ric, P.n)
    residual = R - reconstruct_curvature(ric.S, nu, P)
    t = cfg.tol_structural
    try:
        c5, norm = lemma_defect(residual, P, plane_budget=cfg.samples,
                                seed=cfg.seed, hypothesis_tol=t)
    except LemmaHypothesisError:
        worst = max(symmetry_defects(residual, P))
        return [CheckRecord("lemma.hypothesis", worst, t)]
    return [
        CheckRecord("lemma.condition5", c5, t),
        CheckRecord("lemma.tensor_norm", norm, t),
    ]


def _check_prop1(cfg, model):
    rep = prop1_report(model.tensor, model.point, samples=cfg.samples,
                       refine_steps=cfg.refine_steps, seed=cfg.seed)
    t = cfg.tol_structural
    nu_consistency = max(abs(rep.nu_hat - rep.nu_min), abs(rep.nu_hat - rep.nu_max))
    return [
        CheckRecord("prop1.eq6_residual", rep.eq6_residual, t),
        CheckRecord("prop1.eq7_defect", rep.eq7_defect, t),
        CheckRecord("prop1.eq9_max_defect", rep.eq9_max_defect, t),
        CheckRecord("prop1.rk_defect", rep.rk_defect, t),
        CheckRecord("prop1.bianchi_defect", rep.bianchi_defect, t),
        CheckRecord("prop1.nu_consistency", nu_consistency, t),
    ]


def _chart_point(cfg, model):
    return model.chart.domain.sample(substream(cfg.seed, "identity-point"), shrink=0.3)


def _check_identities(cfg, model):
    u = _chart_point(cfg, model)
    rep = nk_identities(model.chart, u, tol=cfg.tol_chart)
    t = cfg.tol_chart
    records = [
        CheckRecord("identities.eq1", rep.eq1_defect, t),
        CheckRecord("identities.eq2", rep.eq2_defect, t),
    ]
    if cfg.model != "custom-chart":
        records += [
            CheckRecord("identities.eq3", rep.eq3_defect, t),
            CheckRecord("identities.eq4", rep.eq4_defect, t),
            CheckRecord("identities.eq5", rep.eq5_defect, t),
            CheckRecord("identities.eq10", rep.eq10_defect, t),
            CheckRecord("identities.eq11", rep.eq11_defect, t),
            CheckRecord("identities.eq12", rep.eq12_defect, t),
        ]
    return records


def _check_nk(cfg, model):
    u = _chart_point(cfg, model)
    nk, kahler, skew = nearly_kahler_defect(model.chart, u, tol=cfg.tol_chart)
    t = cfg.tol_chart
    records = [
        CheckRecord("nk.defect", nk, t),
        CheckRecord("nk.skew", skew, t),
    ]
    if cfg.model == "s6":
        # the round sphere is genuinely non-Kahler: |nabla J| stays >= 0.1
        records.append(CheckRecord("nk.kahler_floor", max(0.0, 0.1 - kahler), t))
    else:
        records.append(CheckRecord("nk.kahler", kahler, t))
    return records


def _check_schur(cfg, model):
    values, spread = schur_scan(model.chart, budget=10, seed=cfg.seed,
                                tol=cfg.tol_chart)
    mean_dev = abs(float(np.mean(values)) - model.expected_nu)
    return [
        CheckRecord("schur.spread", spread, 2.0 * cfg.tol_chart),
        CheckRecord("schur.mean_dev", mean_dev, cfg.tol_chart),
    ]


def _check_classify(cfg, model):
    verdict = classify(model.tensor, model.point, samples=cfg.samples,
                       refine_steps=cfg.refine_steps, seed=cfg.seed,
                       tol=cfg.tol_structural)
    records = [
        CheckRecord(
            "classify.label",
            0.0 if verdict.label == model.expected_label else 1.0,
            0.5,
        )
    ]
    if model.expected_nu is not None:
        records.append(
            CheckRecord("classify.nu_dev", abs(verdict.nu - model.expected_nu),
                        cfg.tol_structural)
        )
    return records


_CHECK_FUNCS = {
    "structure": _check_structure,
    "symmetry": _check_symmetry,
    "lemma": _check_lemma,
    "prop1": _check_prop1,
    "identities": _check_identities,
    "nk": _check_nk,
    "schur": _check_schur,
    "classify": _check_classify,
}


def run_scenario(config: ScenarioConfig) -> Report:
    """Execute the configured checks; deterministic for a fixed config."""
    config.validate()
    model = _build_model(config)
    records = []
    for check in CHECK_ORDER:
        if check in config.checks:
            records.extend(_CHECK_FUNCS[check](config, model))
    return Report(records=tuple(records), config=config,
                  version=__version__, seed=config.seed)


# ---------------------------------------------------------------------------
# command-line interface

_SCHEMA_TEXT = """\
config format (verify --config FILE):
  line-oriented 'key = value'; '#' starts a comment; unknown keys are errors.
  keys: model (cn|cpn|cdn|s6|product|custom-chart), n, c, tol_structural,
        tol_chart, samples, refine_steps, seed, checks (comma-separated
        subset of: structure symmetry lemma prop1 identities nk schur
        classify), report_path.

text report (bit-exact):
  one line per check record:
    CHECK <id> <PASS|FAIL> defect=<decimal, 17 significant digits> tol=<decimal>
  final line:
    SUMMARY pass=<k> fail=<m> seed=<seed>
  status is PASS iff defect <= tol.  Label records encode a label match
  as defect 0 (match) or 1 (mismatch) against tol 0.5.

json mirror (written next to the text report as <out>.json):
  {"version", "seed", "config", "checks": [{"id", "status", "defect",
   "tol"}...], "summary": {"pass", "fail"}} with sorted keys.

exit codes: 0 all checks pass; 1 at least one FAIL; 2 config/usage error.
"""


def _apply_overrides(cfg_kwargs: dict, args) -> dict:
    if args.model is not None:
        cfg_kwargs["model"] = args.model
    if args.n is not None:
        cfg_kwargs["n"] = args.n
    if args.c is not None:
        cfg_kwargs["c"] = args.c
    if args.seed is not None:
        cfg_kwargs["seed"] = args.seed
    if args.tol is not None:
        cfg_kwargs["tol_structural"] = args.tol
    if getattr(args, "tol_chart", None) is not None:
        cfg_kwargs["tol_chart"] = args.tol_chart
    if args.samples is not None:
        cfg_kwargs["samples"] = args.samples
    if getattr(args, "refine_steps", None) is not None:
        cfg_kwargs["refine_steps"] = args.refine_steps
    return cfg_kwargs


def _config_from_args(args) -> ScenarioConfig:
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        kwargs = {f: getattr(cfg, f) for f in _CONFIG_FIELDS}
    else:
        kwargs = {}
    kwargs = _apply_overrides(kwargs, args)
    if "model" not in kwargs:
        raise ConfigError("no model given (use --config or --model)")
    if getattr(args, "checks", None):
        kwargs["checks"] = _canonical_checks(
            tuple(s.strip() for s in args.checks.split(",") if s.strip())
        )
    return ScenarioConfig(**kwargs).validate()


def _add_common_flags(p, with_checks=False):
    p.add_argument("--config", help="scenario config file")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, help="structural tolerance")
    p.add_argument("--tol-chart", dest="tol_chart", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--refine-steps", dest="refine_steps", type=int)
    if with_checks:
        p.add_argument("--checks", help="comma-separated check subset")


def _cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    report = run_scenario(cfg)
    text = report.render_text()
    out = args.out or cfg.report_path
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
            with open(out + ".json", "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
        except OSError as exc:
            raise ConfigError(f"cannot write report: {exc}") from exc
    return 0 if report.all_pass else 1


def _cmd_classify(args) -> int:
    cfg = _config_from_args(args)
    if 2 * cfg.n < 6 or cfg.model == "custom-chart":
        if cfg.model == "custom-chart":
            raise ConfigError("classify has no expected label for custom-chart")
        raise ConfigError("classify needs dimension 2n >= 6")
    model = _build_model(cfg)
    verdict = classify(model.tensor, model.point, samples=cfg.samples,
                       refine_steps=cfg.refine_steps, seed=cfg.seed,
                       tol=cfg.tol_structural)
    print(f"label {verdict.label.value}")
    print(f"nu {verdict.nu:.17g}")
    print(f"nu_range [{verdict.nu_min:.17g}, {verdict.nu_max:.17g}]")
    print(f"tau_gap {verdict.tau_gap:.17g}")
    print(f"holomorphic_curvature {verdict.holomorphic_curvature_estimate:.17g}")
    return 0


def _cmd_range(args) -> int:
    cfg = _config_from_args(args)
    model = _build_model(cfg)
    lo, hi = antiholo_range(model.tensor, model.point, samples=cfg.samples,
                            refine_steps=cfg.refine_steps, seed=cfg.seed)
    print(f"nu_min {lo:.17g}")
    print(f"nu_max {hi:.17g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nkcurv",
        description="Curvature identity verification on almost Hermitian model geometries",
    )
    sub = parser.add_subparsers(dest="command")

    p_verify = sub.add_parser("verify", help="run a scenario config")
    _add_common_flags(p_verify, with_checks=True)
    p_verify.add_argument("--out", help="text report path (json mirror at <out>.json)")

    p_classify = sub.add_parser("classify", help="classify model curvature data")
    _add_common_flags(p_classify)

    p_range = sub.add_parser("range", help="antiholomorphic sectional extrema")
    _add_common_flags(p_range)

    sub.add_parser("report-schema", help="print config and report formats")

    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "range":
            return _cmd_range(args)
        if args.command == "report-schema":
            sys.stdout.write(_SCHEMA_TEXT)
            return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
