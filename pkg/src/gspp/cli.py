"""Batch front end: one subcommand per study, CSV emission, config files,
deterministic seeds and run manifests.

Output CSVs carry a comment header (lines starting with '#') echoing every
physical parameter, followed by an RFC-4180-style table ('.' decimal,
scientific notation, UTF-8).  A plain-text manifest is written next to
each output.  Exit codes: 0 success, 2 validation error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .channel import AMPLITUDE_MATCHED, INITIAL, fidelity_vs_distance
from .dispersion import (
    TE,
    TM,
    UnsupportedModeError,
    effective_wavelength,
    propagation_length,
    solve_mode,
    supported_polarization,
    te_wavenumber,
    tm_wavenumber,
    transverse_q0,
)
from .material import (
    CONSTANTS,
    GrapheneParams,
    LogSingularityError,
    QuadratureError,
    conductivity,
    sigma_min,
)
from .prism import (
    NotResonant,
    PrismGeometry,
    beta_sweep,
    beta_sweep_matched,
    coupling_from_beta,
    reflectance_map,
)
from .qec import QecRunConfig, average_fidelity, orthogonality_monitor

WORKERS_ENV = "GSPP_WORKERS"


# ---------------------------------------------------------------------------
# config files: flat "key = value" lines, '#' comments; CLI flags override

def load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill argparse defaults from the config file; explicit flags win."""
    if not getattr(args, "config", None):
        return
    values = load_config(args.config)
    for key, raw in values.items():
        if key in ("config", "command"):
            continue
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        if key in args._explicit:  # noqa: SLF001 - set below in main()
            continue
        action = next((a for a in parser._actions if a.dest == key), None)
        if action is not None and action.type is not None:
            setattr(args, key, action.type(raw))
        elif isinstance(getattr(args, key), bool) or (action is not None
                                                      and action.const is not None):
            setattr(args, key, raw.strip().lower() in ("1", "true", "yes", "on"))
        else:
            setattr(args, key, raw)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, params: dict, columns: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# gspp {__version__}\n")
        for key in sorted(params):
            fh.write(f"# {key}: {_fmt(params[key])}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(path: str, command: str, params: dict) -> None:
    with open(path + ".manifest", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"tool: gspp {__version__}\n")
        fh.write(f"command: {command}\n")
        for key in sorted(params):
            fh.write(f"{key}: {_fmt(params[key])}\n")


# ---------------------------------------------------------------------------
# shared option groups

def add_material_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mu-c-ev", type=float, default=0.5,
                     help="chemical potential (eV)")
    sub.add_argument("--temperature-k", type=float, default=300.0)
    sub.add_argument("--tau-intra-ps", type=float, default=None,
                     help="intraband scattering time (ps); default 0.35 at"
                          " room temperature, 5 below 150 K")
    sub.add_argument("--tau-inter-ps", type=float, default=0.0658)
    sub.add_argument("--eps-r", type=float, default=1.0)
    sub.add_argument("--n-layers", type=int, default=1)
    sub.add_argument("--sigma-model", choices=("auto", "full", "low"), default="auto")


def material_from_args(args) -> GrapheneParams:
    if args.tau_intra_ps is None:
        tau_intra = 0.35e-12 if args.temperature_k >= 150.0 else 5.0e-12
    else:
        tau_intra = args.tau_intra_ps * 1e-12
    return GrapheneParams(
        mu_c=args.mu_c_ev,
        temperature=args.temperature_k,
        gamma_intra=1.0 / tau_intra,
        gamma_inter=1.0 / (args.tau_inter_ps * 1e-12),
        eps_r=args.eps_r,
        n_layers=args.n_layers,
        conductivity_model=args.sigma_model,
    )


def material_echo(params: GrapheneParams) -> dict:
    return {
        "mu_c_ev": params.mu_c,
        "temperature_k": params.temperature,
        "gamma_intra_rad_s": params.gamma_intra,
        "gamma_inter_rad_s": params.gamma_inter,
        "eps_r": params.eps_r,
        "n_layers": params.n_layers,
        "sigma_model": params.conductivity_model,
    }


def frequency_grid(fmin_thz: float, fmax_thz: float, points: int,
                   log_spacing: bool) -> np.ndarray:
    if points < 1:
        raise ValueError("need at least one frequency point")
    if fmin_thz <= 0.0 or fmax_thz < fmin_thz:
        raise ValueError("need 0 < fmin <= fmax")
    if points == 1:
        return np.array([fmin_thz * 1e12])
    if log_spacing:
        return np.logspace(math.log10(fmin_thz), math.log10(fmax_thz), points) * 1e12
    return np.linspace(fmin_thz, fmax_thz, points) * 1e12


# ---------------------------------------------------------------------------
# subcommands

def cmd_sigma(args) -> int:
    params = material_from_args(args)
    freqs = frequency_grid(args.fmin_thz, args.fmax_thz, args.points, args.log_spacing)
    smin = sigma_min()
    rows = []
    for f in freqs:
        sig = conductivity(params, 2.0 * math.pi * f).value
        rows.append((f, sig.real, sig.imag, sig.real / smin, sig.imag / smin))
    echo = material_echo(params) | {"fmin_thz": args.fmin_thz, "fmax_thz": args.fmax_thz,
                                    "points": args.points, "log_spacing": args.log_spacing}
    write_csv(args.out, echo,
              ["freq_hz", "sigma_re_S", "sigma_im_S", "sigma_re_over_min",
               "sigma_im_over_min"], rows)
    write_manifest(args.out, "sigma", echo)
    return 0


def cmd_dispersion(args) -> int:
    params = material_from_args(args)
    freqs = frequency_grid(args.fmin_thz, args.fmax_thz, args.points, args.log_spacing)
    rows = []
    for f in freqs:
        omega = 2.0 * math.pi * f
        sig = conductivity(params, omega)
        selected = supported_polarization(sig)
        k0 = omega / CONSTANTS.c0
        for pol in (TM, TE):
            k = (tm_wavenumber if pol == TM else te_wavenumber)(params, omega, sigma=sig)
            kappa = k / k0
            q0 = transverse_q0(pol, sig, params.eps_r)
            supported = pol == selected
            if supported:
                mode = solve_mode(params, omega, pol)
                vg = mode.v_g
                lam_eff = effective_wavelength(mode)
                l_prop = propagation_length(mode)
            else:
                vg = lam_eff = l_prop = math.nan
            rows.append((f, pol, int(supported), kappa.real, kappa.imag,
                         q0.real, vg, lam_eff, l_prop))
    echo = material_echo(params) | {"fmin_thz": args.fmin_thz, "fmax_thz": args.fmax_thz,
                                    "points": args.points, "log_spacing": args.log_spacing}
    write_csv(args.out, echo,
              ["freq_hz", "pol", "supported", "kappa_re", "kappa_im", "q0_re_per_m",
               "vg_m_s", "lambda_eff_m", "L_prop_m"], rows)
    write_manifest(args.out, "dispersion", echo)
    return 0


def cmd_prism(args) -> int:
    params = material_from_args(args)
    if args.mode == "reflectance-map":
        thetas = np.radians(np.linspace(args.theta_min_deg, args.theta_max_deg,
                                        args.theta_points))
        omegas = 2.0 * math.pi * frequency_grid(args.fmin_thz, args.fmax_thz,
                                                args.freq_points, False)
        grid = reflectance_map(thetas, omegas, eps1=args.eps1, d=args.d_um * 1e-6,
                               polarization=args.pol, params=params)
        rows = []
        for i, w in enumerate(omegas):
            for j, th in enumerate(thetas):
                rows.append((w / (2.0 * math.pi), math.degrees(th), grid[i, j]))
        echo = material_echo(params) | {
            "eps1": args.eps1, "d_um": args.d_um, "pol": args.pol,
            "theta_min_deg": args.theta_min_deg, "theta_max_deg": args.theta_max_deg,
            "theta_points": args.theta_points, "fmin_thz": args.fmin_thz,
            "fmax_thz": args.fmax_thz, "freq_points": args.freq_points}
        write_csv(args.out, echo, ["freq_hz", "theta_deg", "R"], rows)
        write_manifest(args.out, "prism reflectance-map", echo)
        return 0

    # beta-sweep
    geom = PrismGeometry(eps1=args.eps1, d=1e-9, theta_i=math.radians(args.theta_deg),
                         polarization=args.pol)
    d_values = np.linspace(args.d_min_um, args.d_max_um, args.d_points) * 1e-6
    if args.match_fmin_thz is not None and args.match_fmax_thz is not None:
        betas, dips = beta_sweep_matched(
            geom, params, 2.0 * math.pi * args.match_fmin_thz * 1e12,
            2.0 * math.pi * args.match_fmax_thz * 1e12, d_values,
            n_scan=args.match_scan_points)
    else:
        betas = beta_sweep(geom, params, 2.0 * math.pi * args.f_thz * 1e12, d_values)
        dips = None
    rows = []
    for i, d in enumerate(d_values):
        b = betas[i]
        g = coupling_from_beta(b)
        rows.append((d, abs(b), math.atan2(b.imag, b.real), abs(g)))
    echo = material_echo(params) | {
        "eps1": args.eps1, "theta_deg": args.theta_deg, "pol": args.pol,
        "f_thz": args.f_thz, "d_min_um": args.d_min_um, "d_max_um": args.d_max_um,
        "d_points": args.d_points,
        "dip_refined": dips is not None,
        "max_beta_abs": float(np.abs(betas).max()) if len(rows) else 0.0}
    write_csv(args.out, echo, ["d_m", "beta_abs", "beta_arg", "g_abs"], rows)
    write_manifest(args.out, "prism beta-sweep", echo)
    return 0


def cmd_propagate(args) -> int:
    betas = [float(b) for b in args.beta_list.split(",")]
    x = np.linspace(0.0, args.xi_max, args.points)
    rows = []
    for beta in betas:
        if not 0.0 < beta <= 1.0:
            raise ValueError("beta values must lie in (0, 1]")
        g = math.asin(beta)
        f_init = fidelity_vs_distance(args.alpha, g, x, 1.0, reference=INITIAL)
        f_match = fidelity_vs_distance(args.alpha, g, x, 1.0, reference=AMPLITUDE_MATCHED)
        for xi, fi, fm in zip(x, f_init, f_match):
            rows.append((beta, xi, fi, fm))
    echo = {"alpha": args.alpha, "beta_list": args.beta_list,
            "xi_max": args.xi_max, "points": args.points}
    write_csv(args.out, echo, ["beta", "k0kappa2_x", "F_initial", "F_matched"], rows)
    write_manifest(args.out, "propagate", echo)
    return 0


def cmd_qec(args) -> int:
    params = material_from_args(args)
    omega = 2.0 * math.pi * CONSTANTS.c0 / (args.lambda0_nm * 1e-9)
    mode = solve_mode(params, omega, args.pol)
    if not mode.supported:
        raise UnsupportedModeError(f"{args.pol} not supported at this frequency")
    k0_kappa2 = mode.k.imag
    lam_eff = effective_wavelength(mode)
    x_total = args.k0kappa2x_max / k0_kappa2

    if args.beta is not None:
        g = math.asin(args.beta)
    else:
        g = args.g
    workers = args.workers or int(os.environ.get(WORKERS_ENV, "0")) or (os.cpu_count() or 1)

    p_values = [float(p) for p in args.p_list.split(",")]
    rows = []
    f0 = None
    for p in p_values:
        cfg = QecRunConfig(alpha=args.alpha, g=g, k0_kappa2=k0_kappa2,
                           x_total=x_total, parity_p=p,
                           n_trajectories=args.trajectories, seed=args.seed,
                           input_set=args.input_set,
                           n_checkpoints=args.checkpoints)
        curve = average_fidelity(cfg, workers=workers)
        f0 = curve.f0
        for xi, fb, se in zip(curve.x, curve.f_bar, curve.std_err):
            rows.append((xi / lam_eff, p, fb, se, curve.f0))
    echo = material_echo(params) | {
        "alpha": args.alpha, "g": g, "lambda0_nm": args.lambda0_nm, "pol": args.pol,
        "k0_kappa2_per_m": k0_kappa2, "lambda_eff_m": lam_eff,
        "k0kappa2x_max": args.k0kappa2x_max, "p_list": args.p_list,
        "trajectories": args.trajectories, "seed": args.seed,
        "input_set": args.input_set, "checkpoints": args.checkpoints,
        "f0": f0, "workers": workers}
    write_csv(args.out, echo, ["x_over_leff", "p", "F_bar", "std_err", "F0"], rows)
    write_manifest(args.out, "qec", echo)

    if args.ortho_out:
        cfg = QecRunConfig(alpha=args.alpha, g=g, k0_kappa2=k0_kappa2,
                           x_total=x_total, parity_p=1.0,
                           n_trajectories=1, seed=args.seed)
        report = orthogonality_monitor(cfg)
        ortho_rows = [(xi / lam_eff, ov) for xi, ov in zip(report.x, report.overlap)]
        write_csv(args.ortho_out, echo | {"max_overlap": report.max_overlap,
                                          "violated": report.violated},
                  ["x_over_leff", "overlap_abs"], ortho_rows)
        write_manifest(args.ortho_out, "qec orthogonality", echo)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gspp",
        description="Graphene surface-plasmon quantum transfer simulator")
    parser.add_argument("--version", action="version", version=f"gspp {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--config", type=str, default=None,
                         help="key = value config file; flags override")
        sub.add_argument("--out", type=str, required=False, default=None)
        sub.add_argument("--workers", type=int, default=None,
                         help=f"parallel workers (or ${WORKERS_ENV})")

    sigma = subs.add_parser("sigma", help="sheet conductivity sweep")
    common(sigma)
    add_material_options(sigma)
    sigma.add_argument("--fmin-thz", type=float, default=0.1)
    sigma.add_argument("--fmax-thz", type=float, default=1000.0)
    sigma.add_argument("--points", type=int, default=400)
    sigma.add_argument("--log-spacing", action="store_true", default=True)
    sigma.add_argument("--linear-spacing", dest="log_spacing", action="store_false")
    sigma.set_defaults(func=cmd_sigma)

    disp = subs.add_parser("dispersion", help="surface-wave dispersion sweep")
    common(disp)
    add_material_options(disp)
    disp.add_argument("--fmin-thz", type=float, default=0.1)
    disp.add_argument("--fmax-thz", type=float, default=1000.0)
    disp.add_argument("--points", type=int, default=400)
    disp.add_argument("--log-spacing", action="store_true", default=True)
    disp.add_argument("--linear-spacing", dest="log_spacing", action="store_false")
    disp.set_defaults(func=cmd_dispersion)

    prism = subs.add_parser("prism", help="prism-coupling studies")
    common(prism)
    add_material_options(prism)
    prism.add_argument("mode", choices=("reflectance-map", "beta-sweep"))
    prism.add_argument("--eps1", type=float, default=1.5)
    prism.add_argument("--pol", choices=(TM, TE), default=TM)
    prism.add_argument("--d-um", type=float, default=0.62,
                       help="spacing for the reflectance map (um)")
    prism.add_argument("--theta-min-deg", type=float, default=50.0)
    prism.add_argument("--theta-max-deg", type=float, default=80.0)
    prism.add_argument("--theta-points", type=int, default=60)
    prism.add_argument("--fmin-thz", type=float, default=500.0)
    prism.add_argument("--fmax-thz", type=float, default=700.0)
    prism.add_argument("--freq-points", type=int, default=60)
    prism.add_argument("--theta-deg", type=float, default=64.0,
                       help="incidence angle for the beta sweep")
    prism.add_argument("--f-thz", type=float, default=0.81)
    prism.add_argument("--d-min-um", type=float, default=5.0)
    prism.add_argument("--d-max-um", type=float, default=200.0)
    prism.add_argument("--d-points", type=int, default=40)
    prism.add_argument("--match-fmin-thz", type=float, default=None,
                       help="refine the evaluation frequency to the "
                            "reflectance dip inside this window")
    prism.add_argument("--match-fmax-thz", type=float, default=None)
    prism.add_argument("--match-scan-points", type=int, default=900)
    prism.set_defaults(func=cmd_prism)

    prop = subs.add_parser("propagate", help="lossy-propagation fidelity curves")
    common(prop)
    prop.add_argument("--alpha", type=float, default=3.0)
    prop.add_argument("--beta-list", type=str, default="1,0.98,0.95,0.9,0.8")
    prop.add_argument("--xi-max", type=float, default=3.0,
                      help="maximum k0*kappa''*x")
    prop.add_argument("--points", type=int, default=200)
    prop.set_defaults(func=cmd_propagate)

    qec = subs.add_parser("qec", help="error-corrected propagation ensembles")
    common(qec)
    add_material_options(qec)
    qec.add_argument("--alpha", type=float, default=3.0)
    qec.add_argument("--g", type=float, default=math.pi / 2)
    qec.add_argument("--beta", type=float, default=None,
                     help="transmission amplitude; overrides --g")
    qec.add_argument("--lambda0-nm", type=float, default=1550.0)
    qec.add_argument("--pol", choices=(TM, TE), default=TM)
    qec.add_argument("--k0kappa2x-max", type=float, default=0.18)
    qec.add_argument("--p-list", type=str, default="0,0.2,0.4,0.6,0.8,1")
    qec.add_argument("--trajectories", type=int, default=10_000)
    qec.add_argument("--checkpoints", type=int, default=7)
    qec.add_argument("--input-set", choices=("six", "haar"), default="six")
    qec.add_argument("--seed", type=int, required=True)
    qec.add_argument("--ortho-out", type=str, default=None)
    qec.set_defaults(func=cmd_qec)

    return parser


def _subparser_for(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    # remember which destinations were given explicitly so config values
    # do not override them
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    args._explicit = explicit
    try:
        apply_config(args, _subparser_for(parser, args.command))
        if args.out is None:
            raise ValueError("--out is required")
        return args.func(args)
    except (ValueError, UnsupportedModeError, LogSingularityError) as exc:
        print(f"gspp: invalid input: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, NotResonant, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"gspp: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
