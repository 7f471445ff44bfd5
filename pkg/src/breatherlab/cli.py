"""Command-line front end: ``breatherlab <command> [options]``.

Commands write CSV/JSON artifacts (and SVG figures where a picture helps)
into the output directory, taken from ``--output-dir``, the
``BREATHERLAB_OUTPUT_DIR`` environment variable or ``./breatherlab-out``.
A flat ``key = value`` config file can supply any option; flags given on the
command line win. Exit status is 0 on success, 1 when a verification fails
(the JSON lists the failures) and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, acceptance, evolution, exact, io, linearized, spectral
from .acceptance import Check, below, equals
from .exact import BreatherSpec, Kind

ENV_OUTPUT_DIR = "BREATHERLAB_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "breatherlab-out"
COMMANDS = ("generate", "verify", "spectrum", "family", "evolve", "certify", "report-all")
DEFAULT_LAMBDA = {Kind.AKHMEDIEV: 0.6, Kind.KUZNETSOV_MA: 1.25}

log = logging.getLogger("breatherlab")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    kind: str = "ab"
    lambda0: Optional[float] = None
    basis: Optional[str] = None
    n: Optional[int] = None
    t: float = 0.0
    dt: Optional[float] = None
    t_end: Optional[float] = None
    wavenumber: Optional[float] = None
    amplitude: float = 1e-6
    lambda0_ab: float = acceptance.DEFAULT_LAMBDA_AB
    lambda0_kmb: float = acceptance.DEFAULT_LAMBDA_KMB
    export: bool = False
    debug: bool = False
    seed: int = 0
    output_dir: str = DEFAULT_OUTPUT_DIR

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        try:
            kind = Kind.parse(self.kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.kind = kind.value
        if self.lambda0 is None and kind in DEFAULT_LAMBDA:
            self.lambda0 = DEFAULT_LAMBDA[kind]
        try:
            self.spec()
            if self.command == "report-all":
                BreatherSpec.ab(self.lambda0_ab)
                BreatherSpec.kmb(self.lambda0_kmb)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.basis is not None and self.basis not in ("periodic", "antiperiodic", "line", "both"):
            raise ConfigError(f"unknown basis {self.basis!r}; expected periodic, antiperiodic, "
                              "line or both")
        if self.n is not None and self.n < 4:
            raise ConfigError("n must be at least 4")

    def spec(self) -> BreatherSpec:
        kind = Kind.parse(self.kind)
        lam = self.lambda0 if kind in DEFAULT_LAMBDA else None
        return BreatherSpec(kind, lam)

    @property
    def tag(self) -> str:
        if self.lambda0 is None or Kind.parse(self.kind) not in DEFAULT_LAMBDA:
            return self.kind
        return f"{self.kind}_{self.lambda0:g}"

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {_format_value(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        values = parse_config_text(text)
        values.update({k: v for k, v in overrides.items() if v is not None})
        if "command" not in values:
            raise ConfigError("no command given")
        return cls(**values)


_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _parse_value(key: str, raw: str):
    kind = _TYPES[key]
    raw = raw.strip()
    if raw.lower() == "none":
        if not kind.startswith("Optional"):
            raise ConfigError(f"{key} cannot be none")
        return None
    try:
        if "bool" in kind:
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if "float" in kind:
            return float(raw)
        if "int" in kind:
            return int(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {number}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"config line {number}: unknown key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


# ---------------------------------------------------------------------------
# shared output helpers


def _out(cfg: ExperimentConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(cfg: ExperimentConfig, name: str, payload: dict) -> Path:
    return io.write_json(_out(cfg) / name, {"config": cfg.as_dict(), **payload})


def _verdict(cfg: ExperimentConfig, name: str, checks: list[Check], extra: Optional[dict] = None) -> int:
    failures = [c.as_dict() for c in checks if not c.passed]
    payload = {"checks": [c.as_dict() for c in checks], "passed": not failures,
               "failures": failures, **(extra or {})}
    path = _emit(cfg, name, payload)
    for c in checks:
        log.info("%s %s: %s (target %s)", "ok  " if c.passed else "FAIL", c.name, c.value, c.target)
    print(f"{'PASS' if not failures else 'FAIL'}: {len(checks) - len(failures)}/{len(checks)} "
          f"checks, report in {path}")
    return 0 if not failures else 1


# ---------------------------------------------------------------------------
# commands


def cmd_generate(cfg: ExperimentConfig) -> int:
    from . import plotting

    spec = cfg.spec()
    grid = exact.default_grid(spec, cfg.n or 128)
    wave = exact.WaveField.sample(spec, grid)
    out = _out(cfg)
    csv_path, _ = io.write_wavefield(out / f"{cfg.tag}_field.csv", wave)
    res = exact.nls_residual(wave)
    _emit(cfg, f"{cfg.tag}_generate.json", {"spec": spec.as_dict(), "grid": grid.as_dict(),
                                            "field_csv": csv_path.name,
                                            "nls_residual": res.as_dict()})
    plotting.field_figure(grid.x, grid.t, wave.values, out / f"{cfg.tag}_field.svg",
                          title=f"|u|, {cfg.tag}")
    print(f"wrote {csv_path}")
    return 0


def _verify_checks(cfg: ExperimentConfig) -> list[Check]:
    spec = cfg.spec()
    wave = exact.WaveField.sample(spec, exact.default_grid(spec, cfg.n or 256))
    checks = [below(f"{spec.kind.value} nls residual", exact.nls_residual(wave).value, 1e-8)]
    if spec.kind in DEFAULT_LAMBDA:
        grid = exact.default_grid(spec, 64)
        checks.append(below("modulus identity", exact.modulus_identity_residual(spec, grid), 1e-10))
        checks += acceptance.darboux_checks(spec.kind, spec.lambda0, cfg.seed)
        checks += acceptance.chain_checks(spec.kind, spec.lambda0)
        checks += acceptance.certificate_checks(spec.kind, spec.lambda0)
    return checks


def cmd_verify(cfg: ExperimentConfig) -> int:
    return _verdict(cfg, f"{cfg.tag}_verify.json", _verify_checks(cfg))


def _spectrum_bases(cfg: ExperimentConfig) -> list[str]:
    spec = cfg.spec()
    name = cfg.basis
    if name is None:
        name = "line" if spec.kind in (Kind.KUZNETSOV_MA, Kind.PEREGRINE) else "both"
    if name == "both":
        return ["periodic", "antiperiodic"]
    return [name]


def _basis(cfg: ExperimentConfig, name: str):
    spec = cfg.spec()
    try:
        basis = spectral.default_basis(spec, name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.n is not None:
        length = basis.half_width if name == "line" else basis.period
        basis = spectral.basis_from_name(name, cfg.n, length)
    return basis


def _probe_points(spec: BreatherSpec, name: str) -> list[complex]:
    if spec.kind is Kind.AKHMEDIEV:
        return [spec.lambda0] if name == "antiperiodic" else [1.0, -1.0]
    if spec.kind is Kind.KUZNETSOV_MA and name == "line":
        return [spec.lambda0]
    return []


def cmd_spectrum(cfg: ExperimentConfig) -> int:
    from . import plotting

    spec = cfg.spec()
    out = _out(cfg)
    checks, reports = [], {}
    for name in _spectrum_bases(cfg):
        basis = _basis(cfg, name)
        try:
            rep = spectral.spectrum_for(spec, basis, cfg.t, probe=_probe_points(spec, name))
        except spectral.UnderResolvedError as exc:
            raise ConfigError(f"{exc}; try n = {exc.suggested_n}") from None
        reports[name] = rep
        tol = acceptance.LINE_MATCH if name == "line" else acceptance.FOURIER_MATCH
        if rep.matches:
            checks.append(below(f"{name} eigenvalue match", rep.max_match_distance, tol))
        for rec in rep.multiplicities:
            expected = spectral.analytic_multiplicity(spec, basis, rec.lam)
            checks.append(equals(f"{name} multiplicity at {complex(rec.lam):g}",
                                 (rec.geometric, rec.algebraic), expected))
        labels = rep.labels or [""] * rep.eigenvalues.size
        io.write_rows(out / f"{cfg.tag}_spectrum_{name}.csv", ["re", "im", "label"],
                      ((z.real, z.imag, lb) for z, lb in zip(rep.eigenvalues, labels)))
    figure = out / f"{cfg.tag}_spectrum.svg"
    if "line" in reports:
        rep = reports["line"]
        marked = [spec.lambda0, -spec.lambda0] if spec.kind is Kind.KUZNETSOV_MA else []
        plotting.line_figure(rep.eigenvalues, rep.labels, figure,
                             title=f"line spectrum, {cfg.tag}", marked=marked)
    elif len(reports) == 2:
        p, a = reports["periodic"].eigenvalues, reports["antiperiodic"].eigenvalues
        if spec.kind is Kind.AKHMEDIEV:
            plotting.ab_figure(p, a, spec.lambda0, figure)
        else:
            plotting.background_figure(p, a, figure)
    else:
        (name, rep), = reports.items()
        plotting.line_figure(rep.eigenvalues, None, figure, title=f"{name} spectrum, {cfg.tag}")
    return _verdict(cfg, f"{cfg.tag}_spectrum.json", checks,
                    {"reports": {k: r.as_dict() for k, r in reports.items()}})


def _family_grid(spec: BreatherSpec):
    from .grid import SpaceTimeGrid

    if spec.kind is Kind.AKHMEDIEV:
        s = spec.sigma0
        return SpaceTimeGrid.periodic(spec.period_x, 128, -math.pi / s, math.pi / s, 128)
    return SpaceTimeGrid(-20.0, 20.0, 512, 0.0, spec.period_t, 64)


def cmd_family(cfg: ExperimentConfig) -> int:
    spec = cfg.spec()
    try:
        cat = linearized.family(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    grid = _family_grid(spec)
    x, t = grid.mesh()
    checks = []
    for e in cat:
        # relative to the solution size: the KMB entries growing in t reach |v| ~ 500
        scale = max(1.0, float(np.max(np.abs(e.solution(x, t)))))
        res = linearized.lin_nls_residual(spec, e.solution, grid) / scale
        checks.append(below(f"{e.label} relative linearized residual", res, 1e-7))
    checks.append(acceptance.above("Gram smallest singular value", cat.gram_min_singular(), 1e-6))
    extra = {"manifest": cat.manifest(), "relations": [list(r) for r in cat.relations]}
    if cfg.export:
        folder = _out(cfg) / f"{cfg.tag}_family"
        linearized.export_catalog(cat, folder, debug=cfg.debug)
        extra["export_dir"] = folder.name
    return _verdict(cfg, f"{cfg.tag}_family.json", checks, extra)


def _tracking_config(cfg: ExperimentConfig, spec: BreatherSpec) -> evolution.EvolutionConfig:
    if spec.kind is Kind.AKHMEDIEV:
        t_end = cfg.t_end if cfg.t_end is not None else 6.0
        return evolution.EvolutionConfig(cfg.dt or 5e-4, t_end, cfg.n or 256,
                                         evolution.Boundary.periodic(spec.period_x),
                                         t_start=-t_end, monitor_every=200, store_every=400)
    if spec.kind is Kind.KUZNETSOV_MA:
        T = spec.period_t
        t_end = cfg.t_end if cfg.t_end is not None else T
        dt = cfg.dt or T / 100000
        steps = int(round(t_end / dt))
        return evolution.EvolutionConfig(dt, t_end, cfg.n or 512,
                                         evolution.Boundary.line(max(16.0, 20.0 / spec.beta0)),
                                         monitor_every=1000, store_every=max(1, steps // 100))
    if spec.kind is Kind.PEREGRINE:
        raise ConfigError("the Peregrine wave approaches the background like 1/x^2, too slowly "
                          "for a periodic box; evolve ab or kmb near lambda0 = 1 instead")
    raise ConfigError("the constant background is evolved through --wavenumber")


def _instability(cfg: ExperimentConfig, spec: BreatherSpec) -> int:
    from . import plotting

    k = cfg.wavenumber if cfg.wavenumber is not None else math.sqrt(2.0)
    if not 0.0 < k < 2.0:
        raise ConfigError(f"wavenumber must lie in (0, 2), got {k}")
    if spec.kind is Kind.CONSTANT:
        ecfg = evolution.EvolutionConfig(cfg.dt or 1e-3, cfg.t_end or 20.0, cfg.n or 64,
                                         evolution.Boundary.periodic(2.0 * math.pi / k))
    elif spec.kind is Kind.KUZNETSOV_MA:
        T = spec.period_t
        ecfg = evolution.EvolutionConfig(cfg.dt or T / 1000, cfg.t_end or 7.0 * T, cfg.n or 1024,
                                         evolution.Boundary.line(8.0 * 2.0 * math.pi / k),
                                         monitor_every=100)
    else:
        raise ConfigError("instability experiments run on the constant or kmb background")
    try:
        rep = evolution.instability_experiment(spec, k, ecfg, amplitude=cfg.amplitude,
                                               predicted=evolution.mi_rate(k))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = _out(cfg)
    io.write_rows(out / f"{cfg.tag}_growth.csv", ["t", "modal_amplitude"],
                  zip(rep.times, rep.amplitudes))
    plotting.growth_figure(rep.times, rep.amplitudes, rep.measured, rep.window,
                           out / f"{cfg.tag}_growth.svg", title=f"k = {k:.4g}, {cfg.tag}")
    tol = 0.02 if spec.kind is Kind.CONSTANT else 0.05
    checks = [acceptance.rel_within("growth rate", rep.measured, rep.predicted, tol)]
    return _verdict(cfg, f"{cfg.tag}_rate.json", checks,
                    {"rate_report": rep.as_dict(), "evolution": ecfg.as_dict()})


def cmd_evolve(cfg: ExperimentConfig) -> int:
    from . import plotting

    spec = cfg.spec()
    if spec.kind is Kind.CONSTANT or cfg.wavenumber is not None:
        return _instability(cfg, spec)
    ecfg = _tracking_config(cfg, spec)
    try:
        traj = evolution.evolve_nls(spec(ecfg.x, ecfg.t_start), ecfg)
    except evolution.BlowUpError as exc:
        _emit(cfg, f"{cfg.tag}_evolve.json", {"error": str(exc)})
        print(f"FAIL: {exc}")
        return 1
    out = _out(cfg)
    rows = traj.diagnostic_rows()
    io.write_rows(out / f"{cfg.tag}_diagnostics.csv", ["t", "mass", "energy", "max_amplitude"], rows)
    t = np.array(traj.times)
    exact_final = spec(ecfg.x, t[-1])
    io.write_rows(out / f"{cfg.tag}_final.csv", ["x", "re_u", "im_u", "re_exact", "im_exact"],
                  zip(ecfg.x, traj.final.real, traj.final.imag, exact_final.real, exact_final.imag))
    fields = np.array(traj.fields)
    plotting.field_figure(ecfg.x, t, fields, out / f"{cfg.tag}_evolution.svg",
                          title=f"split-step |u|, {cfg.tag}")
    plotting.diagnostics_figure(rows, out / f"{cfg.tag}_diagnostics.svg", title=cfg.tag)
    err = float(np.max(np.abs(traj.final - exact_final)))
    checks = [below("max |u - u_exact| at t_end", err, acceptance.TRACKING_TOL),
              below("relative mass drift", traj.mass_drift(), 1e-8)]
    return _verdict(cfg, f"{cfg.tag}_evolve.json", checks, {"evolution": ecfg.as_dict()})


def cmd_certify(cfg: ExperimentConfig) -> int:
    spec = cfg.spec()
    if spec.kind not in DEFAULT_LAMBDA:
        raise ConfigError("certificates exist for ab and kmb")
    checks = acceptance.certificate_checks(spec.kind, spec.lambda0)
    names = ["antiperiodic", "periodic"] if spec.kind is Kind.AKHMEDIEV else ["line"]
    records = []
    for name in names:
        basis = _basis(cfg, name)
        op = spectral.discretize(spectral.spec_evaluator(spec), cfg.t, basis)
        for lam in _probe_points(spec, name):
            rec = spectral.multiplicity_probe(op, lam)
            records.append({"basis": name, **rec.as_dict()})
            checks.append(equals(f"{name} multiplicity at {lam:g}", (rec.geometric, rec.algebraic),
                                 spectral.analytic_multiplicity(spec, basis, lam)))
    return _verdict(cfg, f"{cfg.tag}_certify.json", checks, {"multiplicities": records})


def cmd_report_all(cfg: ExperimentConfig) -> int:
    out = _out(cfg)
    done = []

    def write(result):
        done.append(result)
        print(result.line(), flush=True)
        _emit(cfg, "summary.json", acceptance.summary_payload(done))
        (out / "summary.md").write_text(acceptance.summary_markdown(done))

    results = acceptance.run_all(cfg.lambda0_ab, cfg.lambda0_kmb, on_result=write)
    # figures with their data next to the table
    figures = out / "figures"
    common = {"output_dir": str(figures), "seed": cfg.seed, "debug": cfg.debug}
    for sub in (ExperimentConfig("spectrum", "constant", **common),
                ExperimentConfig("spectrum", "ab", cfg.lambda0_ab, **common),
                ExperimentConfig("spectrum", "kmb", cfg.lambda0_kmb, **common),
                ExperimentConfig("evolve", "constant", **common),
                ExperimentConfig("evolve", "kmb", cfg.lambda0_kmb, wavenumber=1.6, **common),
                ExperimentConfig("evolve", "ab", cfg.lambda0_ab, **common)):
        run(sub)
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)} of {len(results)} criteria pass; "
          f"summary in {out / 'summary.md'}")
    return 0 if passed else 1


HANDLERS = {"generate": cmd_generate, "verify": cmd_verify, "spectrum": cmd_spectrum,
            "family": cmd_family, "evolve": cmd_evolve, "certify": cmd_certify,
            "report-all": cmd_report_all}


def run(cfg: ExperimentConfig) -> int:
    """Execute one configured command; returns the exit status."""
    np.random.seed(cfg.seed)
    return HANDLERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--kind", default=S, help="constant, ab, kmb or prw")
    common.add_argument("--lambda0", type=float, default=S, help="spectral parameter")
    common.add_argument("--basis", default=S, choices=["periodic", "antiperiodic", "line", "both"])
    common.add_argument("--n", type=int, default=S, help="grid points or basis size")
    common.add_argument("--t", type=float, default=S, help="snapshot time for spectra")
    common.add_argument("--dt", type=float, default=S)
    common.add_argument("--t-end", dest="t_end", type=float, default=S)
    common.add_argument("--wavenumber", type=float, default=S,
                        help="perturbation wavenumber for instability runs")
    common.add_argument("--amplitude", type=float, default=S)
    common.add_argument("--lambda0-ab", dest="lambda0_ab", type=float, default=S)
    common.add_argument("--lambda0-kmb", dest="lambda0_kmb", type=float, default=S)
    common.add_argument("--export", action="store_true", default=S,
                        help="write the solution fields as CSV")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--output-dir", dest="output_dir", default=S)
    common.add_argument("--config", default=None, help="flat key = value config file")
    common.add_argument("--debug", action="store_true", default=S,
                        help="verbose logging and intermediate exports")
    parser = argparse.ArgumentParser(prog="breatherlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            values = parse_config_text(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    values.setdefault("output_dir", os.environ.get(ENV_OUTPUT_DIR, DEFAULT_OUTPUT_DIR))
    given = {k: v for k, v in vars(args).items() if k != "config"}
    values.update(given)
    return ExperimentConfig(**values)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "debug", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
