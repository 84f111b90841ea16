"""Command-line front end: single rate points, parameter sweeps, Monte Carlo
validation, resource counts, and the repeaterless bound.

Exit codes: 0 success, 1 domain error (e.g. a margin at or past sqrt(pi)/2,
or a failed validation run), 2 malformed flags or config.

All output is deterministic for fixed flags and seeds: floats are printed
with 17 significant digits (which round-trip exactly through float parsing)
and no timestamps or environment details are emitted. The environment
variable GKP_REPEATER_OUTDIR, when set, provides the directory for relative
--output paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from . import hrm as hrm_mod
from . import mc_oracle, protocols, tree_code
from .noise_core import (
    DEFAULT_ATTENUATION_KM,
    AmplifierMode,
    SqueezingSpec,
    amplifier_added_variance,
)

SWEEP_COLUMNS = [
    "protocol",
    "n_qr",
    "l0_km",
    "L_AB_km",
    "delta",
    "squeezing_db",
    "eta",
    "E_segment",
    "E_AB",
    "P_suc",
    "R",
    "PLOB",
]

AMP_VARIANCE_COLUMNS = ["eta", "post_variance", "pre_variance", "cc_pair_variance"]

TREE_PROTOCOLS = ("tree-hrm", "tree-path-selection")

PROTOCOL_CHOICES = tuple(v.value for v in protocols.Variant) + TREE_PROTOCOLS

#: Published photonic-qubit baseline costs used for comparison in the
#: resource report: average total qubits at 1000 km and 5000 km.
PHOTONIC_BASELINE_QUBITS = {1000.0: 4.1e6, 5000.0: 4.0e7}

_DELTA_PATTERN = re.compile(
    r"^\s*(?:(\d+(?:\.\d+)?)\s*\*\s*)?sqrt_pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$"
)


def parse_delta(text: str) -> float:
    """Parse a margin given as a float or a fraction of sqrt(pi).

    Accepted symbolic forms: ``sqrt_pi``, ``sqrt_pi/6``, ``3*sqrt_pi/14``.
    Symbolic input avoids recipe files baking in rounded decimals.
    """
    match = _DELTA_PATTERN.match(text)
    if match:
        numerator = float(match.group(1)) if match.group(1) else 1.0
        denominator = float(match.group(2)) if match.group(2) else 1.0
        return numerator * math.sqrt(math.pi) / denominator
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid delta {text!r}: expected a number or e.g. 'sqrt_pi/10'"
        ) from None


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _resolve_output(path: str | None) -> str | None:
    if path is None:
        return None
    outdir = os.environ.get("GKP_REPEATER_OUTDIR")
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)


def _rows_to_csv(columns: list[str], rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buffer.getvalue()


def _rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2) + "\n"


def _split_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


# ---------------------------------------------------------------------------
# rate


def _resolve_geometry(args) -> float:
    """Return l0 from --l0/--distance, enforcing consistency when both given."""
    if not math.isfinite(args.squeezing_db):
        raise argparse.ArgumentTypeError(
            f"--squeezing-db must be finite, got {args.squeezing_db}"
        )
    if args.l0 is None and args.distance is None:
        raise argparse.ArgumentTypeError("one of --l0 or --distance is required")
    for name, value in (("--l0", args.l0), ("--distance", args.distance)):
        if value is not None and value <= 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {value}")
    if args.l0 is not None and args.distance is not None:
        implied = (args.nqr + 1) * args.l0
        if abs(implied - args.distance) > 1e-9 * max(1.0, abs(args.distance)):
            raise argparse.ArgumentTypeError(
                f"--l0 {args.l0} with --nqr {args.nqr} implies distance {implied}, "
                f"inconsistent with --distance {args.distance}"
            )
        return args.l0
    if args.l0 is not None:
        return args.l0
    return args.distance / (args.nqr + 1)


def _bare_rate_record(variant, nqr, l0, squeezing_db, delta, latt) -> dict:
    spec = protocols.ProtocolSpec(
        variant=variant,
        n_qr=nqr,
        l0_km=l0,
        squeezing=SqueezingSpec.from_db(squeezing_db),
        hrm=hrm_mod.HrmPolicy(delta),
        latt_km=latt,
    )
    errs = protocols.segment_errors(spec)
    point = protocols.secure_key_rate(spec)
    return {
        "protocol": variant.value,
        "L_AB": point.distance_km,
        "eta_segment": spec.eta,
        "E_segment": errs.ex,
        "E_AB": point.ex_ab,
        "P_suc": point.p_suc,
        "R": point.rate,
        "PLOB": point.plob,
    }


def cmd_rate(args) -> int:
    l0 = _resolve_geometry(args)
    record = _bare_rate_record(
        protocols.Variant.from_label(args.protocol),
        args.nqr,
        l0,
        args.squeezing_db,
        args.delta,
        args.latt,
    )
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    elif args.format == "csv":
        text = _rows_to_csv(list(record), [record])
    else:
        text = "".join(f"{key} = {_fmt(value)}\n" for key, value in record.items())
    _emit(text, _resolve_output(args.output))
    return 0


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class SweepRequest:
    """Validated parameter grids of one key-rate sweep.

    Exactly one of l0_km / distance_km supplies the geometry grid; the other
    coordinate is derived per station count. The Monte Carlo knobs apply only
    to tree path-selection rows.
    """

    protocols: list[str]
    n_qr: list[int]
    deltas: list[float]
    l0_km: list[float] | None
    distance_km: list[float] | None
    squeezing_db: float = 15.0
    latt_km: float = DEFAULT_ATTENUATION_KM
    prep_delta: float = tree_code.DEFAULT_PREP_DELTA
    trials: int = 1_000_000
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.protocols:
            raise ValueError("protocol list must be non-empty")
        for protocol in self.protocols:
            if protocol not in PROTOCOL_CHOICES:
                raise ValueError(
                    f"unknown protocol {protocol!r}; choose from "
                    + ", ".join(PROTOCOL_CHOICES)
                )
        if not self.n_qr:
            raise ValueError("n_qr list must be non-empty")
        if any(n < 0 for n in self.n_qr):
            raise ValueError("station counts must be nonnegative")
        if not self.deltas:
            raise ValueError("delta list must be non-empty")
        if (self.l0_km is None) == (self.distance_km is None):
            raise ValueError("exactly one of l0_km or distance_km is required")
        grid = self.l0_km if self.l0_km is not None else self.distance_km
        if not grid:
            raise ValueError("distance grid must be non-empty")
        if any(value <= 0 for value in grid):
            raise ValueError("distances must be positive")
        if not math.isfinite(self.squeezing_db):
            raise ValueError(f"squeezing_db must be finite, got {self.squeezing_db}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def geometry(self, n_qr: int) -> list[tuple[float, float]]:
        """(l0, total distance) pairs for one station count."""
        if self.l0_km is not None:
            return [(l0, (n_qr + 1) * l0) for l0 in self.l0_km]
        return [(d / (n_qr + 1), d) for d in self.distance_km]


def _tree_sweep_row(protocol, nqr, l0, squeezing_db, delta, latt, prep_delta, trials, seed) -> dict:
    spec = protocols.ProtocolSpec(
        variant=protocols.Variant.TWO_WAY_CC,
        n_qr=nqr,
        l0_km=l0,
        squeezing=SqueezingSpec.from_db(squeezing_db),
        hrm=hrm_mod.HrmPolicy(delta),
        latt_km=latt,
    )
    mode = (
        tree_code.DecodingMode.HRM_POSTSELECTED
        if protocol == "tree-hrm"
        else tree_code.DecodingMode.PATH_SELECTION
    )
    mc = mc_oracle.TrialConfig(n_trials=trials, seed=seed)
    comps = tree_code.component_errors(spec, mode=mode, prep_delta=prep_delta, mc=mc)
    point = tree_code.tree_key_rate(spec, mode=mode, components=comps)
    return {
        "e_segment": tree_code.repeater_error(comps),
        "eta": spec.eta,
        "point": point,
    }


def _sweep_rows(request: SweepRequest) -> list[dict]:
    rows = []
    for protocol in request.protocols:
        for nqr in request.n_qr:
            for delta in request.deltas:
                for l0, distance in request.geometry(nqr):
                    row = {
                        "protocol": protocol,
                        "n_qr": nqr,
                        "l0_km": l0,
                        "L_AB_km": distance,
                        "delta": delta,
                        "squeezing_db": request.squeezing_db,
                    }
                    try:
                        if protocol in TREE_PROTOCOLS:
                            result = _tree_sweep_row(
                                protocol,
                                nqr,
                                l0,
                                request.squeezing_db,
                                delta,
                                request.latt_km,
                                request.prep_delta,
                                request.trials,
                                request.seed,
                            )
                            point = result["point"]
                            row.update(
                                eta=result["eta"],
                                E_segment=result["e_segment"],
                                E_AB=point.ex_ab,
                                P_suc=point.p_suc,
                                R=point.rate,
                                PLOB=point.plob,
                                error="",
                            )
                        else:
                            record = _bare_rate_record(
                                protocols.Variant.from_label(protocol),
                                nqr,
                                l0,
                                request.squeezing_db,
                                delta,
                                request.latt_km,
                            )
                            row.update(
                                eta=record["eta_segment"],
                                E_segment=record["E_segment"],
                                E_AB=record["E_AB"],
                                P_suc=record["P_suc"],
                                R=record["R"],
                                PLOB=record["PLOB"],
                                error="",
                            )
                    except ValueError as exc:
                        row.update(
                            eta="",
                            E_segment="",
                            E_AB="",
                            P_suc="",
                            R="",
                            PLOB="",
                            error=str(exc),
                        )
                    rows.append(row)
    rows.sort(key=lambda r: (r["protocol"], r["n_qr"], r["delta"], r["L_AB_km"]))
    return rows


def _amp_variance_rows(n_points: int) -> list[dict]:
    etas = np.linspace(1e-3, 1.0, n_points)
    rows = []
    for eta in etas:
        eta = float(eta)
        rows.append(
            {
                "eta": eta,
                "post_variance": amplifier_added_variance(eta, AmplifierMode.POST),
                "pre_variance": amplifier_added_variance(eta, AmplifierMode.PRE),
                "cc_pair_variance": amplifier_added_variance(eta, AmplifierMode.CC_PAIR),
            }
        )
    return rows


def _load_config(path: str) -> dict:
    """Parse a key = value sweep config (comma-separated lists, # comments)."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise argparse.ArgumentTypeError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                )
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _apply_config(args, config: dict) -> None:
    scalar = {
        "squeezing_db": ("squeezing_db", float),
        "latt_km": ("latt", float),
        "quantity": ("quantity", str),
        "format": ("format", str),
        "output": ("output", str),
        "eta_points": ("eta_points", int),
        "delta_prep": ("delta_prep", parse_delta),
        "trials": ("trials", int),
        "seed": ("seed", int),
    }
    lists = {
        "protocols": ("protocols", str),
        "nqr": ("nqr_list", int),
        "delta": ("delta_list", parse_delta),
        "l0_km": ("l0_list", float),
        "distance_km": ("distance_list", float),
    }
    for key, value in config.items():
        if key in scalar:
            dest, cast = scalar[key]
            setattr(args, dest, cast(value))
        elif key in lists:
            dest, cast = lists[key]
            setattr(args, dest, [cast(item) for item in _split_list(value)])
        else:
            raise argparse.ArgumentTypeError(f"unknown config key {key!r}")


def cmd_sweep(args, parser: argparse.ArgumentParser) -> int:
    if args.config:
        try:
            _apply_config(args, _load_config(args.config))
        except (OSError, ValueError) as exc:
            parser.error(f"bad --config {args.config}: {exc}")
    output = _resolve_output(args.output)

    if args.quantity == "amp-variance":
        if args.eta_points < 2:
            parser.error("--eta-points must be >= 2")
        rows = _amp_variance_rows(args.eta_points)
        text = (
            _rows_to_json(rows)
            if args.format == "json"
            else _rows_to_csv(AMP_VARIANCE_COLUMNS, rows)
        )
        _emit(text, output)
        return 0

    try:
        request = SweepRequest(
            protocols=args.protocols,
            n_qr=args.nqr_list,
            deltas=args.delta_list,
            l0_km=args.l0_list or None,
            distance_km=args.distance_list or None,
            squeezing_db=args.squeezing_db,
            latt_km=args.latt,
            prep_delta=args.delta_prep,
            trials=args.trials,
            seed=args.seed,
        )
    except ValueError as exc:
        parser.error(str(exc))

    rows = _sweep_rows(request)
    text = (
        _rows_to_json(rows)
        if args.format == "json"
        else _rows_to_csv(SWEEP_COLUMNS + ["error"], rows)
    )
    _emit(text, output)
    return 0 if any(not row["error"] for row in rows) else 1


# ---------------------------------------------------------------------------
# mc-validate


def _binomial_z(successes: int, n: int, p: float) -> float:
    """Z-score of an observed count against the analytic success probability."""
    if n == 0:
        return math.inf
    if p <= 0.0 or p >= 1.0:
        return 0.0 if successes == round(n * p) else math.inf
    return (successes - n * p) / math.sqrt(n * p * (1.0 - p))


def _validation_rows(scope: str, trials: int, seed: int) -> list[dict]:
    rows = []
    squeezing15 = SqueezingSpec.from_db(15.0)

    def add(name: str, analytic: float, estimate: mc_oracle.McEstimate):
        successes = round(estimate.mean * estimate.n_effective)
        z = _binomial_z(successes, estimate.n_effective, analytic)
        rows.append(
            {
                "quantity": name,
                "analytic": analytic,
                "mc_mean": estimate.mean,
                "std_err": estimate.std_err,
                "z": z,
            }
        )

    def add_exact(name: str, analytic: float, value: float, tol: float = 1e-12):
        z = 0.0 if abs(analytic - value) <= tol else math.inf
        rows.append(
            {
                "quantity": name,
                "analytic": analytic,
                "mc_mean": value,
                "std_err": 0.0,
                "z": z,
            }
        )

    stream = 0

    def config() -> mc_oracle.TrialConfig:
        nonlocal stream
        stream += 1
        return mc_oracle.TrialConfig(n_trials=trials, seed=seed + stream)

    if scope in ("hrm", "all"):
        for sigma2 in (0.05, 0.125, 0.25):
            for delta in (0.0, math.sqrt(math.pi) / 10, math.sqrt(math.pi) / 6):
                err, suc = mc_oracle.estimate_hrm(sigma2, delta, config())
                tag = f"[s2={sigma2:g},delta={delta:.6f}]"
                add(f"hrm.e_hrm{tag}", hrm_mod.e_hrm(sigma2, delta), err)
                add(f"hrm.p_suc{tag}", hrm_mod.p_suc(sigma2, delta), suc)

    if scope in ("segments", "all"):
        for variant in protocols.Variant:
            spec = protocols.ProtocolSpec(
                variant=variant,
                n_qr=1,
                l0_km=50.0,
                squeezing=squeezing15,
            )
            flips = mc_oracle.simulate_segment(spec, config())
            add(
                f"segment.flip[{variant.value},l0=50,delta=0]",
                protocols.segment_errors(spec).ex,
                flips,
            )
        postselected = protocols.ProtocolSpec(
            variant=protocols.Variant.TWO_WAY_CC,
            n_qr=1,
            l0_km=50.0,
            squeezing=squeezing15,
            hrm=hrm_mod.HrmPolicy(math.sqrt(math.pi) / 6),
        )
        add(
            "segment.flip[two-way-cc,l0=50,delta=sqrt_pi/6]",
            protocols.segment_errors(postselected).ex,
            mc_oracle.simulate_segment(postselected, config()),
        )

    if scope in ("tree", "all"):
        for e in (0.1, 0.3):
            add(
                f"tree.majority3[e={e:g}]",
                tree_code.majority3(e),
                mc_oracle.simulate_majority_vote(e, config()),
            )
        for e in (0.01, 0.1):
            add_exact(
                f"tree.encoded_x[e={e:g}]",
                tree_code.encoded_x_error(e),
                mc_oracle.enumerate_encoded_x_error(e),
            )
        single_err = hrm_mod.e_hrm(0.25, 0.0)
        pair_analytic = 1.0 - (1.0 - single_err) ** 2
        pair_mc, _ = mc_oracle.simulate_path_selection(0.25, 1, config())
        add("tree.bell_pair_error[s2=0.25]", pair_analytic, pair_mc)
        spec = protocols.ProtocolSpec(
            variant=protocols.Variant.TWO_WAY_CC,
            n_qr=1,
            l0_km=3.0,
            squeezing=squeezing15,
        )
        comps = tree_code.component_errors(
            spec, mode=tree_code.DecodingMode.HRM_POSTSELECTED, prep_delta=0.0
        )
        station = mc_oracle.simulate_tree_repeater(
            tree_code.leaf_variance(spec),
            tree_code.single_qubit_variance(spec),
            comps.e_prep,
            config(),
        )
        add("tree.station_error[l0=3,delta=0]", tree_code.repeater_error(comps), station)

    return rows


def cmd_mc_validate(args, parser: argparse.ArgumentParser) -> int:
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    rows = _validation_rows(args.scope, args.trials, args.seed)
    lines = [
        f"mc-validate scope={args.scope} trials={args.trials} seed={args.seed}",
        f"{'quantity':<48} {'analytic':>13} {'mc_mean':>13} {'std_err':>12} {'z':>9} verdict",
    ]
    failures = []
    for row in rows:
        ok = abs(row["z"]) <= 4.0
        if not ok:
            failures.append(row["quantity"])
        lines.append(
            f"{row['quantity']:<48} {row['analytic']:>13.6e} {row['mc_mean']:>13.6e} "
            f"{row['std_err']:>12.3e} {row['z']:>9.3f} {'PASS' if ok else 'FAIL'}"
        )
    verdict = "PASS" if not failures else "FAIL: " + ", ".join(failures)
    lines.append(f"RESULT: {verdict} ({len(rows)} quantities, gate |z| <= 4)")
    _emit("\n".join(lines) + "\n", _resolve_output(args.output))
    return 0 if not failures else 1


# ---------------------------------------------------------------------------
# resources


def cmd_resources(args, parser: argparse.ArgumentParser) -> int:
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    l0 = _resolve_geometry(args)
    spec = protocols.ProtocolSpec(
        variant=protocols.Variant.TWO_WAY_CC,
        n_qr=args.nqr,
        l0_km=l0,
        squeezing=SqueezingSpec.from_db(args.squeezing_db),
        hrm=hrm_mod.HrmPolicy(args.delta),
        latt_km=args.latt,
    )
    mode = tree_code.DecodingMode(args.mode)
    mc = mc_oracle.TrialConfig(n_trials=args.trials, seed=args.seed)
    count = tree_code.resource_count(spec, mode=mode)
    point = tree_code.tree_key_rate(spec, mode=mode, prep_delta=args.delta_prep, mc=mc)
    record = {
        "mode": mode.value,
        "L_AB_km": spec.l_ab_km,
        "n_stations": count.n_clusters,
        "qubits_per_cluster": count.qubits_per_cluster,
        "acceptance_probability": count.acceptance,
        "total_qubits": count.total_qubits,
        "construction_overhead_multiplier": count.construction_overhead_multiplier,
        "E_AB": point.ex_ab,
        "R": point.rate,
    }
    for distance, baseline in sorted(PHOTONIC_BASELINE_QUBITS.items()):
        record[f"photonic_baseline_qubits_{int(distance)}km"] = baseline
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        text = "".join(f"{key} = {_fmt(value)}\n" for key, value in record.items())
    _emit(text, _resolve_output(args.output))
    return 0


# ---------------------------------------------------------------------------
# plob


def cmd_plob(args, parser: argparse.ArgumentParser) -> int:
    if not args.distance_list:
        parser.error("--distance-list must be non-empty")
    if any(d <= 0 for d in args.distance_list):
        parser.error("distances must be positive")
    rows = [
        {"L_AB_km": d, "PLOB": protocols.plob_bound(d, args.latt)}
        for d in args.distance_list
    ]
    text = (
        _rows_to_json(rows)
        if args.format == "json"
        else _rows_to_csv(["L_AB_km", "PLOB"], rows)
    )
    _emit(text, _resolve_output(args.output))
    return 0


# ---------------------------------------------------------------------------
# parser


def _float_list(text: str) -> list[float]:
    return [float(item) for item in _split_list(text)]


def _int_list(text: str) -> list[int]:
    return [int(item) for item in _split_list(text)]


def _delta_list(text: str) -> list[float]:
    return [parse_delta(item) for item in _split_list(text)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkp-repeater",
        description="Key rates and resource counts for GKP repeater chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_protocol=True):
        if with_protocol:
            p.add_argument(
                "--protocol",
                required=True,
                choices=[v.value for v in protocols.Variant],
                help="protocol variant",
            )
        p.add_argument("--nqr", type=int, default=0, help="repeater stations between the end points")
        p.add_argument("--l0", type=float, default=None, help="segment length in km")
        p.add_argument("--distance", type=float, default=None, help="end-to-end distance in km")
        p.add_argument("--squeezing-db", type=float, default=15.0, help="initial squeezing in dB")
        p.add_argument(
            "--delta",
            type=parse_delta,
            default=0.0,
            help="postselection margin (number or fraction like sqrt_pi/10)",
        )
        p.add_argument("--latt", type=float, default=DEFAULT_ATTENUATION_KM, help="attenuation length in km")
        p.add_argument("--output", default=None, help="write to file instead of stdout")

    rate = sub.add_parser("rate", help="one rate point for one configuration")
    add_common(rate)
    rate.add_argument("--format", choices=["text", "json", "csv"], default="text")

    sweep = sub.add_parser("sweep", help="tabulate rate points over parameter grids")
    sweep.add_argument("--config", default=None, help="key = value config file")
    sweep.add_argument("--quantity", choices=["key-rate", "amp-variance"], default="key-rate")
    sweep.add_argument("--protocols", type=_split_list, default=[], help="comma-separated protocol list")
    sweep.add_argument("--nqr-list", type=_int_list, default=[], help="comma-separated station counts")
    sweep.add_argument("--delta-list", type=_delta_list, default=[], help="comma-separated margins")
    sweep.add_argument("--l0-list", type=_float_list, default=[], help="comma-separated segment lengths (km)")
    sweep.add_argument("--distance-list", type=_float_list, default=[], help="comma-separated distances (km)")
    sweep.add_argument("--squeezing-db", type=float, default=15.0)
    sweep.add_argument("--latt", type=float, default=DEFAULT_ATTENUATION_KM)
    sweep.add_argument("--eta-points", type=int, default=1000, help="grid size for --quantity amp-variance")
    sweep.add_argument("--delta-prep", type=parse_delta, default=tree_code.DEFAULT_PREP_DELTA,
                       help="construction-fusion margin for tree protocols")
    sweep.add_argument("--trials", type=int, default=1_000_000, help="MC trials for tree path selection")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.add_argument("--output", default=None)

    validate = sub.add_parser("mc-validate", help="Monte Carlo vs analytic cross checks")
    validate.add_argument("--trials", type=int, required=True)
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--scope", choices=["hrm", "segments", "tree", "all"], default="all")
    validate.add_argument("--output", default=None)

    resources = sub.add_parser("resources", help="expected GKP-qubit cost of the tree protocol")
    add_common(resources, with_protocol=False)
    resources.add_argument("--mode", choices=[m.value for m in tree_code.DecodingMode], required=True)
    resources.add_argument("--delta-prep", type=parse_delta, default=tree_code.DEFAULT_PREP_DELTA)
    resources.add_argument("--trials", type=int, default=1_000_000)
    resources.add_argument("--seed", type=int, default=0)
    resources.add_argument("--format", choices=["text", "json"], default="text")

    plob = sub.add_parser("plob", help="repeaterless secret-key bound")
    plob.add_argument("--distance-list", type=_float_list, required=True)
    plob.add_argument("--latt", type=float, default=DEFAULT_ATTENUATION_KM)
    plob.add_argument("--format", choices=["csv", "json"], default="csv")
    plob.add_argument("--output", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rate":
            return cmd_rate(args)
        if args.command == "sweep":
            return cmd_sweep(args, parser)
        if args.command == "mc-validate":
            return cmd_mc_validate(args, parser)
        if args.command == "resources":
            return cmd_resources(args, parser)
        return cmd_plob(args, parser)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
