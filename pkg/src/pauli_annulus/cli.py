"""Command-line front end: ``pauli-annulus <command> --config <path>``.

Exit codes: 0 success, 2 missing config file, 3 malformed JSON,
4 invalid configuration, 5 numerical guard failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import PrefactorLaw, alpha_k
from .errors import DomainError, NumericalGuardError, PauliAnnulusError
from .fiber_solver import FiberProblem, assemble_direct, assemble_weighted, solve_fiber
from .gauge import (gauge_data, flux_at_scale, gradient_gauge_circulation,
                    real_momentum, symmetric_gauge_circulation)
from .radial_field import AnnulusGeometry, RadialField, solve_scalar_potential
from .selftest import run_checks
from .spectrum import SpectrumRequest, ab_sweep, assemble, convergence_study

log = logging.getLogger("pauli_annulus")

FORMAT_VERSION = 1
EXIT_OK, EXIT_MISSING, EXIT_JSON, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3, 4, 5
COMMANDS = ("potential", "fiber", "asymptotics", "spectrum", "ab-sweep", "converge", "selftest")

SCHEMA = {
    "geometry": {"rho1", "rho2"},
    "field": {"kind", "value", "coeffs", "r", "B"},
    "gauge": {"circulation", "symmetric_gauge", "gradient_gauge", "p"},
    "numerics": {"n_grid", "eig_tol", "m_window", "formulation"},
    "experiment": {"h", "m", "m_tilde", "h_list", "k_max", "h_min", "h_max", "n_h",
                   "dump_matrix"},
    "output": {"directory", "formats"},
}
DEFAULTS = {
    "numerics": {"n_grid": 4096, "eig_tol": 1e-12, "m_window": 8, "formulation": "weighted"},
    "experiment": {"h": 0.1, "m": 0, "h_list": [0.2, 0.1, 0.05], "k_max": 2,
                   "dump_matrix": False},
    "output": {"directory": "out", "formats": ["csv", "json"]},
}


class ConfigError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    geom: AnnulusGeometry
    field: RadialField
    circulation: float | None
    gauge_mode: str
    p: int
    n_grid: int
    eig_tol: float
    m_window: int
    formulation: str
    experiment: dict
    out_dir: Path
    formats: list
    raw: dict = dc_field(repr=False)

    def circ_for(self, pot) -> float:
        if self.gauge_mode == "circulation":
            return self.circulation
        if self.gauge_mode == "symmetric":
            return symmetric_gauge_circulation(self.geom, self.field)
        return gradient_gauge_circulation(pot)


def _num(section: str, key: str, value, kind=float, positive=False, minimum=None):
    where = f"{section}.{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if kind is int and (not float(value).is_integer()):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    value = kind(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be > 0, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value!r}")
    return value


def _field(sec: dict) -> RadialField:
    kind = sec.get("kind")
    try:
        if kind == "constant":
            if "value" not in sec:
                raise ConfigError("field.value: required for kind 'constant'")
            value = _num("field", "value", sec["value"])
            if not value > 0:
                raise ConfigError(f"field.value: B={value!r} must be strictly positive (Assumption 1)")
            return RadialField.constant(value)
        if kind == "polynomial":
            coeffs = sec.get("coeffs")
            if not isinstance(coeffs, list) or not coeffs:
                raise ConfigError("field.coeffs: required non-empty list for kind 'polynomial'")
            return RadialField.polynomial([_num("field", f"coeffs[{i}]", c) for i, c in enumerate(coeffs)])
        if kind == "tabulated":
            r, b = sec.get("r"), sec.get("B")
            if not isinstance(r, list) or not isinstance(b, list):
                raise ConfigError("field.r / field.B: required lists for kind 'tabulated'")
            r = [_num("field", f"r[{i}]", x) for i, x in enumerate(r)]
            b = [_num("field", f"B[{i}]", x) for i, x in enumerate(b)]
            for i, x in enumerate(b):
                if not x > 0:
                    raise ConfigError(
                        f"field.B[{i}]: B={x!r} must be strictly positive (Assumption 1)")
            return RadialField.tabulated(r, b)
    except DomainError as exc:
        raise ConfigError(f"field: {exc}") from exc
    raise ConfigError(f"field.kind: expected 'constant', 'polynomial' or 'tabulated', got {kind!r}")


def validate_config(data, base_dir: Path | None = None) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    for key in data:
        if key not in SCHEMA:
            raise ConfigError(f"{key}: unknown top-level key")
    for sec, allowed in SCHEMA.items():
        if sec in data:
            if not isinstance(data[sec], dict):
                raise ConfigError(f"{sec}: must be an object")
            for key in data[sec]:
                if key not in allowed:
                    raise ConfigError(f"{sec}.{key}: unknown key")
    for required in ("geometry", "field"):
        if required not in data:
            raise ConfigError(f"{required}: required section missing")

    geo = data["geometry"]
    for key in ("rho1", "rho2"):
        if key not in geo:
            raise ConfigError(f"geometry.{key}: required")
    rho1 = _num("geometry", "rho1", geo["rho1"], positive=True)
    rho2 = _num("geometry", "rho2", geo["rho2"], positive=True)
    if not rho1 < rho2:
        raise ConfigError(f"geometry.rho2: must exceed geometry.rho1 ({rho2!r} <= {rho1!r})")
    geom = AnnulusGeometry(rho1, rho2)
    field = _field(data["field"])

    gauge = data.get("gauge", {})
    modes = [k for k in ("circulation", "symmetric_gauge", "gradient_gauge")
             if k in gauge and gauge[k] is not False]
    if len(modes) > 1:
        raise ConfigError(f"gauge: give only one of {', '.join(modes)}")
    circulation = None
    mode = "gradient"
    if modes == ["circulation"]:
        circulation = _num("gauge", "circulation", gauge["circulation"])
        mode = "circulation"
    elif modes == ["symmetric_gauge"]:
        if gauge["symmetric_gauge"] is not True:
            raise ConfigError("gauge.symmetric_gauge: expected true or false")
        if field.kind == "tabulated":
            raise ConfigError("gauge.symmetric_gauge: needs a constant or polynomial field; "
                              "give gauge.circulation instead")
        mode = "symmetric"
    p = _num("gauge", "p", gauge.get("p", 0), kind=int)

    num = {**DEFAULTS["numerics"], **data.get("numerics", {})}
    n_grid = _num("numerics", "n_grid", num["n_grid"], kind=int, minimum=128)
    eig_tol = _num("numerics", "eig_tol", num["eig_tol"], positive=True)
    m_window = _num("numerics", "m_window", num["m_window"], kind=int, minimum=1)
    if num["formulation"] not in ("weighted", "direct"):
        raise ConfigError(f"numerics.formulation: expected 'weighted' or 'direct', got {num['formulation']!r}")

    exp = {**DEFAULTS["experiment"], **data.get("experiment", {})}
    exp["h"] = _num("experiment", "h", exp["h"], positive=True)
    exp["m"] = _num("experiment", "m", exp["m"], kind=int)
    if "m_tilde" in exp:
        exp["m_tilde"] = _num("experiment", "m_tilde", exp["m_tilde"])
    exp["k_max"] = _num("experiment", "k_max", exp["k_max"], kind=int, minimum=1)
    if "h_min" in exp or "h_max" in exp or "n_h" in exp:
        try:
            h_min = _num("experiment", "h_min", exp["h_min"], positive=True)
            h_max = _num("experiment", "h_max", exp["h_max"], positive=True)
            n_h = _num("experiment", "n_h", exp["n_h"], kind=int, minimum=2)
        except KeyError as exc:
            raise ConfigError(f"experiment.{exc.args[0]}: required with h_min/h_max/n_h") from exc
        if not h_min < h_max:
            raise ConfigError("experiment.h_max: must exceed experiment.h_min")
        exp["h_list"] = [float(x) for x in np.linspace(h_max, h_min, n_h)]
    if not isinstance(exp["h_list"], list) or not exp["h_list"]:
        raise ConfigError("experiment.h_list: expected a non-empty list")
    hs = [_num("experiment", f"h_list[{i}]", h, positive=True) for i, h in enumerate(exp["h_list"])]
    if any(a <= b for a, b in zip(hs, hs[1:])):
        raise ConfigError("experiment.h_list: must be strictly decreasing")
    exp["h_list"] = hs
    if not isinstance(exp["dump_matrix"], bool):
        raise ConfigError("experiment.dump_matrix: expected true or false")

    out = {**DEFAULTS["output"], **data.get("output", {})}
    if not isinstance(out["directory"], str):
        raise ConfigError("output.directory: expected a string")
    if not isinstance(out["formats"], list) or not set(out["formats"]) <= {"csv", "json"}:
        raise ConfigError("output.formats: expected a list drawn from 'csv', 'json'")
    out_dir = Path(out["directory"])
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir

    return RunConfig(geom, field, circulation, mode, p, n_grid, eig_tol, m_window,
                     num["formulation"], exp, out_dir, list(out["formats"]), data)


def parse_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: config file not found", EXIT_MISSING)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}", EXIT_JSON) from exc
    return validate_config(data, path.parent)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_summary(cfg: RunConfig, command: str, pot, c0, extra=None) -> None:
    if "json" not in cfg.formats:
        return
    summary = {
        "format_version": FORMAT_VERSION,
        "software_version": __version__,
        "command": command,
        "features": {**pot.features(), "c0": c0} if pot is not None else {},
        "phi_min": pot.phi_min if pot is not None else None,
        "r_min": pot.r_min if pot is not None else None,
        "curvature": pot.curvature if pot is not None else None,
        "dn_inner": pot.dn_phi_inner if pot is not None else None,
        "dn_outer": pot.dn_phi_outer if pot is not None else None,
        "c0": c0,
        "config": cfg.raw,
    }
    if extra:
        summary.update(extra)
    text = json.dumps(_jsonable(summary), indent=2, sort_keys=True)
    (cfg.out_dir / "summary.json").write_text(text + "\n", encoding="utf-8")


FIBER_HEADER = ["h", "m", "m_tilde", "j", "log_scale", "mantissa", "kernel_residual",
                "upper_bound_mantissa"]


def _fiber_rows(h, m, fs):
    return [[h, m, fs.m_tilde, j, fs.log_scale, fs.mantissas[j - 1], fs.kernel_residual,
             fs.upper_bound_mantissa] for j in (1, 2)]


def _request(cfg: RunConfig, pot, threads: int, k_max=None) -> SpectrumRequest:
    return SpectrumRequest(cfg.geom, cfg.field, cfg.circ_for(pot), cfg.experiment["h_list"],
                           k_max or cfg.experiment["k_max"], cfg.p, cfg.n_grid, cfg.m_window,
                           cfg.formulation, threads, cfg.eig_tol)


def run(command: str, cfg: RunConfig, threads: int = 1) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    csv_on = "csv" in cfg.formats

    if command == "selftest":
        checks = list(run_checks(cfg.geom, cfg.field))
        if csv_on:
            write_csv(cfg.out_dir / "selftest.csv", ["check", "passed", "detail"], checks)
        failed = [c[0] for c in checks if not c[1]]
        for name, ok, detail in checks:
            log.info("%-22s %s %s", name, "PASS" if ok else "FAIL", detail)
        write_summary(cfg, command, None, None, {"failed": failed})
        return EXIT_OK if not failed else EXIT_GUARD

    pot = solve_scalar_potential(cfg.geom, cfg.field, cfg.n_grid)
    c0 = gauge_data(pot, cfg.circ_for(pot), cfg.p).c0

    if command == "potential":
        if csv_on:
            write_csv(cfg.out_dir / "phi.csv", ["r", "phi", "dphi"],
                      zip(pot.grid, pot.phi, pot.dphi))
        write_summary(cfg, command, pot, c0)
        return EXIT_OK

    if command == "fiber":
        h = cfg.experiment["h"]
        m = cfg.experiment["m"]
        mt = cfg.experiment.get("m_tilde", real_momentum(m, cfg.p, c0, h))
        prob = FiberProblem(h, mt, pot, cfg.field, cfg.n_grid, cfg.formulation,
                            eig_tol=cfg.eig_tol)
        fs = solve_fiber(prob)
        if csv_on:
            write_csv(cfg.out_dir / "fiber.csv", FIBER_HEADER, _fiber_rows(h, m, fs))
            if cfg.experiment["dump_matrix"]:
                mat = (assemble_direct(prob) if cfg.formulation == "direct"
                       else assemble_weighted(prob)[0])
                off = list(mat.offdiag) + [""]
                write_csv(cfg.out_dir / "matrix.csv", ["i", "diag", "offdiag"],
                          zip(range(mat.size), mat.diag, off))
        write_summary(cfg, command, pot, c0, {"lambda1_mantissa": fs.mantissas[0],
                                              "lambda2_mantissa": fs.mantissas[1],
                                              "log_scale": fs.log_scale})
        return EXIT_OK

    if command == "asymptotics":
        law = PrefactorLaw.from_potential(pot)
        g = gauge_data(pot, cfg.circ_for(pot), cfg.p)
        rows = []
        for h in cfg.experiment["h_list"]:
            gam = flux_at_scale(g, h).gamma_frac
            for k in range(1, cfg.experiment["k_max"] + 1):
                st = alpha_k(law, gam, k)
                rows.append([h, gam, k, st.value, 2 * pot.phi_min / h + 0.5 * math.log(h),
                             ";".join(str(m) for m in st.members)])
        if csv_on:
            write_csv(cfg.out_dir / "asymptotics.csv",
                      ["h", "gamma_frac", "k", "alpha_k", "log_scale", "realizing_set"], rows)
        write_summary(cfg, command, pot, c0)
        return EXIT_OK

    if command == "spectrum":
        spec = assemble(_request(cfg, pot, threads), pot)
        rows, fib = [], []
        for s in spec.scales:
            for k, e in enumerate(s.lowest(cfg.experiment["k_max"]), start=1):
                rows.append([s.h, k, e.m, e.j, e.value.log_scale, e.value.mantissa,
                             s.predicted[k - 1], s.ratios[k - 1]])
            for m, fs in s.fibers.items():
                fib.extend(_fiber_rows(s.h, m, fs))
        if csv_on:
            write_csv(cfg.out_dir / "spectrum.csv",
                      ["h", "k", "m", "j", "log_scale", "mantissa", "predicted_mantissa", "ratio"],
                      rows)
            write_csv(cfg.out_dir / "fibers.csv", FIBER_HEADER, fib)
        write_summary(cfg, command, pot, c0)
        return EXIT_OK

    if command == "ab-sweep":
        rows = ab_sweep(_request(cfg, pot, threads, k_max=1), pot)
        if csv_on:
            write_csv(cfg.out_dir / "ab_sweep.csv",
                      ["h", "gamma_frac", "m", "numeric_prefactor", "predicted_prefactor"],
                      [[r.h, r.gamma_frac, r.m, r.numeric_prefactor, r.predicted_prefactor]
                       for r in rows])
        write_summary(cfg, command, pot, c0)
        return EXIT_OK

    if command == "converge":
        rows = convergence_study(_request(cfg, pot, threads), pot)
        k_max = cfg.experiment["k_max"]
        header = (["h"] + [f"ratio_{k}" for k in range(1, k_max + 1)]
                  + [f"delta_{k}" for k in range(1, k_max + 1)]
                  + [f"monotone_{k}" for k in range(1, k_max + 1)])
        if csv_on:
            write_csv(cfg.out_dir / "converge.csv", header,
                      [[r.h, *r.ratios, *r.deltas, *r.monotone] for r in rows])
        flagged = [r.h for r in rows if not all(r.monotone)]
        write_summary(cfg, command, pot, c0, {"non_monotone_h": flagged})
        return EXIT_OK

    raise ConfigError(f"unknown command {command!r}")


def _threads(arg) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("PAULI_ANNULUS_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pauli-annulus", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output directory (overrides output.directory)")
    ap.add_argument("--threads", type=int, help="worker threads for fibre solves")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(args.config)
        if args.out:
            cfg.out_dir = Path(args.out)
        return run(args.command, cfg, _threads(args.threads))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NumericalGuardError as exc:
        print(f"numerical guard failed: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PauliAnnulusError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
