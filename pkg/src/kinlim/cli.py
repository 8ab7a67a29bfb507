"""Command-line harness: config parsing, experiment orchestration, and
result persistence (CSV, SVG line plots, binary snapshots, manifest).

Config files are sectioned key=value text; unknown sections or keys are
errors (reported with line numbers) so that typos cannot silently change an
experiment.  Every emitted CSV row carries the sha256 hash of the config
text, and outputs contain no timestamps, so identical configs reproduce
bitwise-identical tables.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import struct
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .equilibria import equilibrium
from .linear_response import extract_rate, make_problem, volterra_solve
from .penrose import PenroseSymbol, dispersion_roots, stability_margin
from .solvers import (RunConfig, field_l2_difference, full_snapshots,
                      rescale_spacetime, rescale_velocity, run, system_residual,
                      vd_run, vm_run, vp_run, well_prepared_init)

KINDS = ("penrose_scan", "landau", "two_stream_timing", "weibel",
         "conv_vm_vp", "conv_vm_vd", "hierarchy_check", "scaling_check")

# section -> key -> parser
def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s):
    return [int(x) for x in s.split(",") if x.strip()]


def _modes(s):
    """'1:0.5,2:0.1' -> {1: 0.5, 2: 0.1}"""
    out = {}
    for part in s.split(","):
        part = part.strip()
        if not part:
            continue
        m, a = part.split(":")
        out[int(m)] = float(a)
    return out


_SCHEMA = {
    "experiment": {"kind": str, "out": str, "threads": int},
    "equilibrium": {"kind": str, "sigma": float, "u": float, "nb": float,
                    "sigma_c": float, "sigma_b": float, "sigmas": _floats,
                    "dim_v": int, "n_v": int, "v_max": float},
    "grid": {"n_x": int, "length": float, "n_v": int, "v_max": float},
    "run": {"model": str, "eps": float, "delta": float, "dt": float,
            "t_final": float, "prepared_order": int, "vd_order": int,
            "record_every": int, "seed": int},
    "perturbation": {"density_modes": _modes, "current_modes": _modes,
                     "shear_modes": _modes, "seed_A_modes": _modes,
                     "seed_dtA_modes": _modes, "E0_longitudinal_modes": _modes},
    "sweep": {"eps_values": _floats, "dt_values": _floats,
              "resolutions": _ints, "lambda_values": _floats},
    "penrose": {"eps": float, "k_max": int, "gamma_max": float,
                "tau_max": float, "n_gamma": int, "n_tau": int,
                "length": float},
    "timing": {"threshold": float},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    kind: str
    out_dir: str
    sections: dict
    config_text: str
    config_hash: str
    threads: int = 1

    @property
    def sweep_eps(self):
        return self.sections.get("sweep", {}).get("eps_values", [])


def parse_config(path):
    """Strict sectioned key=value parse; unknown keys/sections are errors
    naming the offending line."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown section [{name}]")
            current = name
            sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigError(f"{path}:{lineno}: key outside of any section")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _SCHEMA[current]:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} in [{current}]")
        if val == "":
            continue
        try:
            sections[current][key] = _SCHEMA[current][key](val)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    exp = sections.get("experiment", {})
    kind = exp.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"{path}: [experiment] kind must be one of {KINDS}, got {kind!r}")
    spec = ExperimentSpec(kind=kind, out_dir=exp.get("out", "out"),
                          sections=sections, config_text=text,
                          config_hash=hashlib.sha256(text.encode()).hexdigest(),
                          threads=exp.get("threads", 1))
    _validate_compatibility(spec)
    return spec


def _validate_compatibility(spec):
    """Explicitly specified E0 must satisfy Gauss' law against f0."""
    pert = spec.sections.get("perturbation", {})
    e0 = pert.get("E0_longitudinal_modes")
    if not e0:
        return
    dens = pert.get("density_modes", {})
    length = spec.sections.get("grid", {}).get("length", 2.0 * np.pi)
    for m, amp in e0.items():
        kap = 2.0 * np.pi * m / length
        want = dens.get(m, 0.0) / kap
        if abs(amp - want) > 1e-8 * max(1.0, abs(want)):
            raise ConfigError(
                "compatibility violated: div E0 != rho(f0) on mode "
                f"{m} (E0 amplitude {amp}, Gauss requires {want})")


def build_run_config(spec, **overrides):
    s = spec.sections
    eqs = dict(s.get("equilibrium", {}))
    kind = eqs.pop("kind", "maxwellian")
    dim_v = eqs.pop("dim_v", 1)
    n_v_eq = eqs.pop("n_v", 128)
    v_max_eq = eqs.pop("v_max", None)
    eq = equilibrium(kind, dim_v=dim_v, n_v=n_v_eq, v_max=v_max_eq, **eqs)
    grid = s.get("grid", {})
    runsec = dict(s.get("run", {}))
    runsec.update(overrides)
    pert = {k: v for k, v in s.get("perturbation", {}).items()
            if k != "E0_longitudinal_modes"}
    cfg = RunConfig(model=runsec.get("model", "VP"),
                    eps=runsec.get("eps", 0.0),
                    delta=runsec.get("delta", 1e-3),
                    t_final=runsec.get("t_final", 1.0),
                    dt=runsec.get("dt", 0.05),
                    n_x=grid.get("n_x", 32),
                    length=grid.get("length", 2.0 * np.pi),
                    n_v=grid.get("n_v", eq.n_v),
                    v_max=grid.get("v_max", eq.v_max),
                    dim_v=dim_v, eq=eq, perturbation=pert,
                    vd_order=runsec.get("vd_order", 1),
                    prepared_order=runsec.get("prepared_order", 0),
                    record_every=runsec.get("record_every", 1),
                    seed=runsec.get("seed", 0))
    return cfg


# ---------------------------------------------------------------------------
# persistence


def write_csv(path, header, rows, config_hash=""):
    """RFC-4180-style CSV with a config-hash column on every row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(list(header) + ["config_hash"])
        for row in rows:
            w.writerow([_fmt(v) for v in row] + [config_hash])


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return v


_SNAP_MAGIC = b"KLSNAP01"


def write_snapshot(path, values, meta):
    """Binary snapshot: magic, length-prefixed JSON header, raw float64."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    header = dict(meta)
    header["shape"] = list(arr.shape)
    header["dtype"] = "float64"
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_SNAP_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(arr.tobytes(order="C"))


def read_snapshot(path):
    with open(path, "rb") as fh:
        magic = fh.read(len(_SNAP_MAGIC))
        if magic != _SNAP_MAGIC:
            raise ValueError(f"{path}: not a snapshot file")
        (n,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(n).decode())
        data = np.frombuffer(fh.read(), dtype=np.float64)
    return data.reshape(header["shape"]), header


def write_manifest(out_dir, spec, extra=None):
    man = {"kind": spec.kind, "config_hash": spec.config_hash,
           "config_text": spec.config_text,
           "versions": {"kinlim": __version__, "numpy": np.__version__,
                        "python": sys.version.split()[0]},
           "seed": spec.sections.get("run", {}).get("seed", 0)}
    if extra:
        man.update(extra)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(man, fh, indent=2, sort_keys=True)


def write_svg_lineplot(path, series, title="", logy=False, width=640, height=420):
    """Minimal self-contained SVG line plot.

    series: list of (label, x array, y array).  No plotting dependency.
    """
    pad = 50
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    if logy:
        ys = np.log10(np.maximum(np.abs(ys), 1e-300))
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width/2}" y="20" text-anchor="middle" '
             f'font-family="sans-serif" font-size="14">{title}</text>',
             f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" y2="{height-pad}" '
             'stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" stroke="black"/>']
    for i, (label, x, y) in enumerate(series):
        y = np.asarray(y, dtype=float)
        if logy:
            y = np.log10(np.maximum(np.abs(y), 1e-300))
        pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}"
                       for a, b in zip(np.asarray(x, dtype=float), y))
        c = colors[i % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" '
                     f'points="{pts}"/>')
        parts.append(f'<text x="{width-pad+4}" y="{pad+14*i+10}" fill="{c}" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    for val, lab in ((x0, _tick(x0)), (x1, _tick(x1))):
        parts.append(f'<text x="{sx(val):.1f}" y="{height-pad+16}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="10">{lab}</text>')
    for val in (y0, y1):
        parts.append(f'<text x="{pad-6}" y="{sy(val):.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="10">{_tick(val)}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))


def _tick(v):
    return f"{v:.3g}"


def fit_loglog_slope(eps_values, errors):
    """Least-squares slope of log(err) vs log(eps) with a 95% half-width."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    coef, cov = np.polyfit(x, y, 1, cov=True)
    half = 1.96 * float(np.sqrt(cov[0, 0])) if np.all(np.isfinite(cov)) else float("nan")
    return float(coef[0]), half


def fit_damped_mode(series, times, window=None):
    """Rate a + i b of a real oscillating signal ~ e^{at} cos(bt + c), from a
    log-linear fit of the local maxima of |series| and their spacing."""
    t = np.asarray(times, dtype=float)
    y = np.abs(np.asarray(series, dtype=float))
    if window is not None:
        m = (t >= window[0]) & (t <= window[1])
        t, y = t[m], y[m]
    pk = [i for i in range(1, len(y) - 1) if y[i] >= y[i - 1] and y[i] >= y[i + 1]
          and y[i] > 0]
    if len(pk) < 3:
        raise ValueError("too few envelope peaks for a rate fit")
    tp = t[pk]
    yp = y[pk]
    a = np.polyfit(tp, np.log(yp), 1)[0]
    b = np.pi / float(np.mean(np.diff(tp)))
    return complex(a, b)


# ---------------------------------------------------------------------------
# experiments


def _out_dir(spec):
    d = os.path.join(spec.out_dir, f"{spec.kind}-{spec.config_hash[:8]}")
    os.makedirs(d, exist_ok=True)
    return d


def _exp_penrose(spec, out):
    p = spec.sections.get("penrose", {})
    cfg = build_run_config(spec)
    ps = PenroseSymbol(eq=cfg.eq, eps=p.get("eps", 0.0),
                       length=p.get("length", cfg.length))
    k_set = [(m,) for m in range(1, p.get("k_max", 8) + 1)]
    gamma = np.linspace(1e-3, p.get("gamma_max", 2.0), p.get("n_gamma", 30))
    tau = np.linspace(-p.get("tau_max", 10.0), p.get("tau_max", 10.0),
                      p.get("n_tau", 121))
    rep = stability_margin(ps, k_set, gamma, tau)
    write_csv(os.path.join(out, "symbol_samples.csv"),
              ["k", "gamma", "tau", "abs_symbol"],
              [(str(k), g, t, v) for (k, g, t, v) in rep.samples],
              spec.config_hash)
    lines = [f"classification: {rep.classification}",
             f"margin: {rep.margin:.6g}",
             f"k_worst: {rep.k_worst}"]
    for r in rep.roots:
        lines.append(f"root k={r.k} omega={r.omega:.6g} residual={r.residual:.2e}")
    with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return {"classification": rep.classification, "margin": rep.margin}


def _exp_landau(spec, out):
    cfg = build_run_config(spec, model="VP")
    traj = vp_run(cfg)
    mode = 1
    Ehat = np.fft.fft(traj.E[:, :, 0], axis=1)[:, mode] / cfg.n_x
    window = (1.0, 0.8 * cfg.t_final)
    # for real standing-wave data Ehat = rhohat/(i kappa) is purely imaginary
    rate = fit_damped_mode(Ehat.imag, traj.times, window)
    ps = PenroseSymbol(eq=cfg.eq, eps=0.0, length=cfg.length)
    roots = dispersion_roots(ps, (mode,))
    oracle = roots[0].omega if roots else complex("nan")
    h = cfg.eq.values if cfg.dim_v == 1 else None
    prob = make_problem(cfg.eq, 0.0, (mode,), h, cfg.dt, cfg.t_final, length=cfg.length)
    rho_lin = volterra_solve(prob)
    t_lin = cfg.dt * np.arange(len(rho_lin))
    rate_lin = fit_damped_mode(np.real(rho_lin), t_lin, window)
    write_csv(os.path.join(out, "mode_history.csv"),
              ["t", "re_Ehat", "im_Ehat"],
              list(zip(traj.times, Ehat.real, Ehat.imag)), spec.config_hash)
    write_svg_lineplot(os.path.join(out, "damping.svg"),
                       [("|Ehat_1|", traj.times, np.abs(Ehat))],
                       title="field mode amplitude", logy=True)
    summary = {"rate_sim": [rate.real, rate.imag],
               "rate_volterra": [rate_lin.real, rate_lin.imag],
               "oracle_omega": [oracle.real, oracle.imag]}
    write_csv(os.path.join(out, "rates.csv"),
              ["source", "damping", "frequency"],
              [("vp_run", rate.real, rate.imag),
               ("volterra", rate_lin.real, rate_lin.imag),
               ("dispersion_root", oracle.imag, abs(oracle.real))],
              spec.config_hash)
    return summary


def _run_sweep(spec, runner, eps_values):
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            return list(pool.map(runner, eps_values))
    return [runner(e) for e in eps_values]


def _exp_conv(spec, out, target):
    eps_values = spec.sweep_eps or [0.2, 0.1, 0.05, 0.025]
    p = 4 if target == "VP" else 6
    ref_traj = {}

    def one(eps):
        cfg_vm = build_run_config(spec, model="VM", eps=eps, prepared_order=p)
        tvm = vm_run(cfg_vm)
        if target == "VP":
            if "VP" not in ref_traj:        # eps-independent reference
                cfg_vp = build_run_config(spec, model="VP", eps=0.0, prepared_order=0)
                ref_traj["VP"] = vp_run(cfg_vp)
            tref = ref_traj["VP"]
        else:
            cfg_vd = build_run_config(spec, model="VD", eps=eps, prepared_order=p)
            tref = vd_run(cfg_vd)
        return field_l2_difference(tvm, tref)

    errs = [one(e) for e in eps_values]
    slope, half = fit_loglog_slope(eps_values, errs)
    write_csv(os.path.join(out, "errors.csv"), ["eps", "error_L2tL2x"],
              list(zip(eps_values, errs)), spec.config_hash)
    write_svg_lineplot(os.path.join(out, "convergence.svg"),
                       [("error", np.log10(eps_values), np.log10(errs))],
                       title=f"VM vs {target}: slope {slope:.3f} +/- {half:.3f}")
    return {"eps": eps_values, "errors": errs, "slope": slope, "ci": half}


def _exp_timing(spec, out):
    eps_values = spec.sweep_eps or [0.1, 0.05, 0.025, 0.0125]
    thr = spec.sections.get("timing", {}).get("threshold", 0.02)

    def one(eps):
        cfg = build_run_config(spec, model="VM", eps=eps)
        cfg.delta = eps * eps
        traj = vm_run(cfg)
        return traj.field_threshold_time(thr)

    tstars = _run_sweep(spec, one, eps_values)
    ok = [(e, t) for e, t in zip(eps_values, tstars) if t is not None]
    xs = np.log(1.0 / np.array([e for e, _ in ok]))
    ys = np.array([t for _, t in ok])
    coef = np.polyfit(xs, ys, 1)
    resid = ys - np.polyval(coef, xs)
    r2 = 1.0 - float(np.sum(resid**2)) / float(np.sum((ys - ys.mean()) ** 2))
    write_csv(os.path.join(out, "timing.csv"), ["eps", "t_star", "log_inv_eps"],
              [(e, t, float(np.log(1.0 / e))) for e, t in ok], spec.config_hash)
    write_svg_lineplot(os.path.join(out, "timing.svg"),
                       [("t*", xs, ys)], title=f"t* vs log(1/eps), R2={r2:.4f}")
    return {"eps": eps_values, "t_star": tstars, "slope": float(coef[0]), "r2": r2}


def _exp_weibel(spec, out):
    cfg = build_run_config(spec, model="VM")
    traj = vm_run(cfg)
    b_energy = 0.5 * cfg.delta * np.sum(traj.B**2, axis=1) * traj.grid.dx
    write_csv(os.path.join(out, "b_energy.csv"), ["t", "magnetic_energy"],
              list(zip(traj.times, b_energy)), spec.config_hash)
    write_svg_lineplot(os.path.join(out, "b_energy.svg"),
                       [("B energy", traj.times, b_energy)],
                       title="transverse magnetic energy", logy=True)
    return {"final_b_energy": float(b_energy[-1])}


def _exp_hierarchy(spec, out):
    from .phase_space import deposit_moments
    from .spectral_fields import build_hierarchy, darwin_potentials
    eps_values = spec.sweep_eps or [0.2, 0.1, 0.05]
    cfg = build_run_config(spec, model="VM", eps=eps_values[0])
    grid = cfg.grid()
    f = _frozen_g(cfg)
    rows = []
    norms = {}
    for eps in eps_values:
        h = build_hierarchy(cfg.eq, eps, 3, grid)
        g = f.copy()
        g.values *= eps * eps          # transverse moments of size eps^2
        mom = deposit_moments(g, eps, max_ell=7)
        for j, A in enumerate(darwin_potentials(h, mom), start=1):
            nrm = float(np.sqrt(np.sum(A**2) * grid.dx))
            norms.setdefault(j, []).append(nrm)
            rows.append((eps, j, nrm))
    write_csv(os.path.join(out, "hierarchy_norms.csv"), ["eps", "j", "norm_Aj"],
              rows, spec.config_hash)
    slopes = {j: fit_loglog_slope(eps_values, v)[0] for j, v in norms.items()}
    return {"slopes": slopes}


def _frozen_g(cfg):
    """Smooth frozen distribution with transverse odd structure (nonzero
    current and twisted moments)."""
    from .phase_space import DistField, PERTURBATION
    grid = cfg.grid()
    x = grid.x
    V = grid.v_nodes()
    prof = np.cos(2.0 * np.pi * x / grid.length)
    vals = (prof[:, None, None]
            * (V[..., 1] + 0.3 * V[..., 0] ** 2 * V[..., 1])[None, ...]
            * np.exp(-np.sum(V * V, axis=-1) / 2.0)[None, ...])
    return DistField(grid, vals, PERTURBATION)


def _exp_scaling(spec, out):
    lam_values = spec.sections.get("sweep", {}).get("lambda_values", [0.5, 2.0])
    cfg = build_run_config(spec, model="VM")
    cfg.store_last3 = True
    traj = vm_run(cfg)
    snaps = full_snapshots(traj, cfg)
    native = system_residual(snaps)
    rows = [("native", 1.0, native["total"])]
    results = {"native": native["total"]}
    for lam in lam_values:
        for name, f in (("velocity", rescale_velocity), ("spacetime", rescale_spacetime)):
            res = system_residual([f(s, lam) for s in snaps])
            rows.append((name, lam, res["total"]))
            results[f"{name}_{lam}"] = res["total"]
    write_csv(os.path.join(out, "scaling_residuals.csv"),
              ["transform", "lambda", "relative_residual"], rows, spec.config_hash)
    return results


_EXPERIMENTS = {
    "penrose_scan": _exp_penrose,
    "landau": _exp_landau,
    "two_stream_timing": _exp_timing,
    "weibel": _exp_weibel,
    "conv_vm_vp": lambda s, o: _exp_conv(s, o, "VP"),
    "conv_vm_vd": lambda s, o: _exp_conv(s, o, "VD"),
    "hierarchy_check": _exp_hierarchy,
    "scaling_check": _exp_scaling,
}


def run_experiment(spec):
    """Execute one experiment; returns the summary dict and writes CSV/SVG/
    manifest files under the per-run output directory."""
    out = _out_dir(spec)
    summary = _EXPERIMENTS[spec.kind](spec, out)
    write_manifest(out, spec, extra={"summary": _jsonable(summary)})
    return summary


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# entry point


def main(argv=None):
    ap = argparse.ArgumentParser(prog="kinlim",
                                 description="kinetic plasma experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("penrose", "run", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=1)
    pr = sub.add_parser("report")
    pr.add_argument("dir")
    args = ap.parse_args(argv)

    if args.command == "report":
        man_path = os.path.join(args.dir, "manifest.json")
        with open(man_path, "r", encoding="utf-8") as fh:
            man = json.load(fh)
        print(f"kind: {man['kind']}")
        print(f"config_hash: {man['config_hash']}")
        for key, val in sorted(man.get("summary", {}).items()):
            print(f"{key}: {val}")
        return 0

    spec = parse_config(args.config)
    if args.out:
        spec.out_dir = args.out
    spec.threads = args.threads
    if args.command == "penrose" and spec.kind != "penrose_scan":
        raise SystemExit("penrose subcommand needs a penrose_scan config")
    summary = run_experiment(spec)
    for key, val in sorted(_jsonable(summary).items()):
        print(f"{key}: {val}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
