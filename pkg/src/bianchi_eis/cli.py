"""Command-line front end: every computation with machine-readable output.

Reports are JSON objects {inputs, value(s), method, error_estimate?,
cross_check?, warnings} with exact rationals rendered as "p/q" strings and
complex numbers as {"re": ..., "im": ...}.  Exit codes: 0 success, 2 input
validation, 3 tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import pickle
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BianchiError, QuadratureNotConverged, ToleranceNotMet
from .fields import OElt, make_field
from .hyperbolic import Point3
from .lattices import Precision, lattice_of_field

CACHE_MAGIC = b"BEIS1"
CACHE_VERSION = 2


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _cplx(z: complex, eps: float | None = None) -> dict:
    out = {"re": float(z.real), "im": float(z.imag)}
    if eps is not None:
        out["eps"] = eps
    return out


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
        return
    # CSV: flattened deterministic key/value rows
    def flatten(prefix, obj, rows):
        if isinstance(obj, dict):
            for k in sorted(obj):
                flatten(f"{prefix}{k}." if prefix else f"{k}.", obj[k], rows) if isinstance(
                    obj[k], (dict, list)
                ) else rows.append((f"{prefix}{k}", obj[k]))
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                if isinstance(v, (dict, list)):
                    flatten(f"{prefix}{i}.", v, rows)
                else:
                    rows.append((f"{prefix}{i}", v))

    rows: list = []
    flatten("", report, rows)
    print("key,value")
    for k, v in rows:
        print(f"{k},{v}")


# -- cache -----------------------------------------------------------------------


def _cache_path(cache_dir: str, kind: str, d: int, N: int) -> Path:
    return Path(cache_dir) / f"{kind}-d{d}-N{N}-v{CACHE_VERSION}.blob"


def _cache_load(cache_dir: str | None, kind: str, d: int, N: int):
    if not cache_dir:
        return None
    path = _cache_path(cache_dir, kind, d, N)
    if not path.exists():
        return None
    raw = path.read_bytes()
    if not raw.startswith(CACHE_MAGIC):
        return None
    try:
        payload = pickle.loads(raw[len(CACHE_MAGIC):])
    except Exception:
        return None
    if payload.get("version") != CACHE_VERSION or payload.get("key") != (d, N, kind):
        return None
    return payload["data"]


def _cache_store(cache_dir: str | None, kind: str, d: int, N: int, data) -> None:
    if not cache_dir:
        return
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    payload = {"version": CACHE_VERSION, "key": (d, N, kind), "data": data}
    _cache_path(cache_dir, kind, d, N).write_bytes(CACHE_MAGIC + pickle.dumps(payload))


def _cusp_data_cached(fld, N: int, cache_dir: str | None):
    from . import cusps as cusps_mod

    key = (fld.d, N)
    if key in cusps_mod._CACHE:
        return cusps_mod._CACHE[key]
    blob = _cache_load(cache_dir, "cusps", fld.d, N)
    if blob is not None:
        from .residues import OrbitTable, residue_ring

        ring = residue_ring(fld, N)
        ring._sl2_rows = [tuple(r) for r in blob["rows"]]
        table = OrbitTable(
            orbit_of=np.array(blob["orbit_of"]),
            n_orbits=int(blob["n_orbits"]),
            representatives=np.array(blob["reps"]),
        )
        from .cusps import CuspClass, CuspData
        from .residues import mat_from_row

        sigma_perm = np.array(blob["sigma_perm"])
        tau_perm = np.array(blob["tau_perm"])
        classes = []
        rows = ring.sl2_array()
        for oid, rep in enumerate(table.representatives):
            classes.append(
                CuspClass(
                    orbit_id=oid,
                    representative=mat_from_row(tuple(int(v) for v in rows[rep])),
                    sigma_fixed=bool(table.orbit_of[sigma_perm[rep]] == table.orbit_of[rep]),
                    tau_fixed=bool(table.orbit_of[tau_perm[rep]] == table.orbit_of[rep]),
                )
            )
        data = CuspData(fld, N, ring, table, classes, sigma_perm, tau_perm)
        cusps_mod._CACHE[key] = data
        return data
    data = cusps_mod.cusp_data(fld, N)
    _cache_store(
        cache_dir,
        "cusps",
        fld.d,
        N,
        {
            "rows": data.ring.sl2_rows(),
            "orbit_of": data.table.orbit_of.tolist(),
            "n_orbits": data.table.n_orbits,
            "reps": data.table.representatives.tolist(),
            "sigma_perm": data.sigma_perm.tolist(),
            "tau_perm": data.tau_perm.tolist(),
        },
    )
    return data


# -- subcommands -----------------------------------------------------------------


def _cmd_cusps(args) -> dict:
    fld = make_field(args.d)
    data = _cusp_data_cached(fld, args.N, args.cache_dir)
    from .cusps import fixed_cusps

    return {
        "inputs": {"d": args.d, "N": args.N},
        "method": "enumeration",
        "count": data.count,
        "sigma_fixed": fixed_cusps(data.classes, "sigma"),
        "tau_fixed": fixed_cusps(data.classes, "tau"),
        "warnings": _level_warnings(args.N),
    }


def _level_warnings(N: int) -> list[str]:
    out = []
    if N <= 3:
        out.append("torsion caveat: results at N <= 3 are orbifold values")
    return out


def _cmd_dims(args) -> dict:
    fld = make_field(args.d)
    from .cusps import eis_dims

    dims = eis_dims(fld, args.N, args.k)
    warnings = _level_warnings(args.N)
    if args.k == 0:
        warnings.append("weight 0: degree-2 dimension drops by the one-dimensional cokernel")
    return {
        "inputs": {"d": args.d, "N": args.N, "k": args.k},
        "method": "enumeration",
        "dims": list(dims),
        "warnings": warnings,
    }


def _cmd_trace_h1(args) -> dict:
    fld = make_field(args.d)
    from .cocycles import trace_sigma_h1

    rep = trace_sigma_h1(fld, args.N)
    return {
        "inputs": {"d": args.d, "N": args.N},
        "method": "exact-cyclotomic",
        "value": _frac(rep.value),
        "cross_check": {"formula_value": _frac(rep.closed_form), "agrees": rep.agrees},
        "dim": rep.dim,
        "cusp_count": rep.cusp_count,
        "warnings": _level_warnings(args.N),
    }


def _cmd_trace_h2(args) -> dict:
    fld = make_field(args.d)
    from .traces import trace_sigma_h2

    rep = trace_sigma_h2(fld, args.N, args.k, args.rho)
    return {
        "inputs": {"d": args.d, "N": args.N, "k": args.k, "rho": args.rho},
        "method": "enumeration",
        "value": rep.value,
        "fixed_cusps": rep.fixed_cusps,
        "delta": rep.delta,
        "cross_check": {
            "formula_value": _frac(rep.formula_value),
            "agrees": rep.agrees,
            "alpha_rho": rep.alpha_rho,
            "power_factor": _frac(rep.power_factor),
            "product_factor": rep.product_factor,
        },
        "warnings": _level_warnings(args.N),
    }


def _cmd_lefschetz(args) -> dict:
    fld = make_field(args.d)
    from .traces import is_torsion_caveat, lefschetz_gamma1, lefschetz_pn, _factorize

    value = lefschetz_gamma1(fld, args.N, args.k)
    report = {
        "inputs": {"d": args.d, "N": args.N, "k": args.k},
        "method": "closed-form",
        "value": _frac(value),
        "warnings": [],
    }
    if is_torsion_caveat(args.N):
        report["warnings"].append("orbifold: Gamma1(N) has torsion for N <= 3")
    fac = _factorize(args.N)
    if len(fac) == 1 and fac[0][0] % 2 == 1 and fld.disc % fac[0][0] != 0:
        p, n = fac[0]
        other = lefschetz_pn(fld, p, n, args.k)
        report["cross_check"] = {"formula_value": _frac(other), "agrees": other == value}
    return report


def _cmd_index_oracle(args) -> dict:
    from .traces import fixed_group_index_oracle, index_gamma_prime, index_gamma_prime_oracle

    closed = index_gamma_prime(args.N)
    beven = index_gamma_prime_oracle(args.N)
    report = {
        "inputs": {"N": args.N},
        "method": "enumeration",
        "closed_form": _frac(closed),
        "beven_oracle": _frac(beven),
        "cross_check": {"agrees": beven == closed},
        "warnings": [],
    }
    if args.d is not None:
        honest = fixed_group_index_oracle(args.N, args.d)
        report["fixed_group_oracle"] = _frac(honest)
    if beven != closed:
        report["warnings"].append(
            "printed closed form counts even residues mod 2N up to sign, "
            "not the enumerated subgroup index"
        )
    return report


def _parse_oelt(s: str) -> OElt:
    a, b = (int(x) for x in s.split(","))
    return OElt(a, b)


def _cmd_cocycle_eval(args) -> dict:
    fld = make_field(args.d)
    prec = Precision(eps=args.eps)
    if args.kind == "psi":
        from .cocycles import psi_parabolic

        A = tuple(_parse_oelt(x) for x in (args.ma, args.mb, args.mc, args.md))
        val = psi_parabolic(
            _parse_oelt(args.u), _parse_oelt(args.v), A, fld, args.N, prec,
            first_coeff=args.first_coeff,
        )
        return {
            "inputs": {
                "d": args.d, "N": args.N, "u": args.u, "v": args.v,
                "matrix": [args.ma, args.mb, args.mc, args.md],
                "first_coeff": args.first_coeff,
            },
            "method": "numeric",
            "value": _cplx(val, eps=args.eps),
            "warnings": [],
        }
    from .cocycles import phi

    A = tuple(_parse_oelt(x) for x in (args.ma, args.mb, args.mc, args.md))
    val = phi(A, fld, prec)
    return {
        "inputs": {"d": args.d, "matrix": [args.ma, args.mb, args.mc, args.md]},
        "method": "numeric",
        "value": _cplx(val, eps=args.eps),
        "warnings": [],
    }


def _coboundary_samples(fld):
    O = OElt
    mats = [
        (O(1, 0), O(1, 0), O(0, 0), O(1, 0)),
        (O(1, 0), O(0, 1), O(0, 0), O(1, 0)),
        (O(0, 0), O(-1, 0), O(1, 0), O(0, 0)),
        (O(1, 0), O(0, 0), O(2, 1), O(1, 0)),
        (O(2, 1), O(1, 0), O(1, 1), O(1, 0)),
        (O(1, 0), O(0, 0), O(1, 1), O(1, 0)),
        (O(2, 0), O(1, 0), O(1, 0), O(1, 0)),
        (O(1, 1), O(1, 0), O(1, 0), O(1, -1)),
        (O(3, 0), O(2, 0), O(1, 0), O(1, 0)),
        (O(1, 0), O(0, 0), O(0, 3), O(1, 0)),
    ]
    pts = [
        Point3(0.20 + 0.10j, 1.30),
        Point3(-0.35 + 0.22j, 0.80),
        Point3(0.05 - 0.40j, 1.05),
        Point3(0.31 + 0.27j, 0.95),
        Point3(-0.12 - 0.08j, 1.60),
        Point3(0.44 - 0.21j, 1.10),
        Point3(0.02 + 0.33j, 0.70),
        Point3(-0.27 + 0.05j, 1.25),
        Point3(0.18 - 0.29j, 0.90),
        Point3(0.37 + 0.41j, 1.45),
    ]
    return list(zip(mats, pts))


def _cmd_coboundary_check(args) -> dict:
    fld = make_field(args.d)
    from .cocycles import coboundary_residual

    prec = Precision(eps=args.eps)
    residuals = []
    for A, u in _coboundary_samples(fld)[: args.samples]:
        residuals.append(coboundary_residual(A, u, fld, prec))
    worst = max(residuals)
    return {
        "inputs": {"d": args.d, "samples": args.samples, "eps": args.eps},
        "method": "numeric",
        "value": worst,
        "error_estimate": args.eps,
        "residuals": residuals,
        "warnings": [],
    }


def _cmd_sigma_matrix(args) -> dict:
    fld = make_field(args.d)
    from .cocycles import sigma_matrix

    mat = sigma_matrix(fld, args.N)
    report = {
        "inputs": {"d": args.d, "N": args.N},
        "method": "exact-cyclotomic",
        "dim": mat.dim,
        "denominator": mat.den,
        "involution": mat.squares_to_identity(),
        "trace": _frac(mat.trace()),
        "warnings": _level_warnings(args.N),
    }
    if args.dump_entries:
        report["entries"] = [
            [[int(c) for c in mat.num[i, j]] for j in range(mat.dim)]
            for i in range(mat.dim)
        ]
    return report


def _cmd_cycle(args) -> dict:
    fld = make_field(args.d)
    from .geometry import eisenstein_cycle

    prec = Precision(eps=args.eps)
    floors = (args.t_floor, args.t_floor / 2, args.t_floor / 4)
    cyc = eisenstein_cycle(
        fld, args.N, cusp_index=args.cusp, prec=prec, tol=args.tol,
        t_floors=floors, threads=args.threads,
    )
    entries = [
        {
            "coset": e.coset_index,
            "eta": list(e.eta),
            "value": _cplx(e.value),
            "error_estimate": e.spread,
        }
        for e in cyc.entries
    ]
    return {
        "inputs": {
            "d": args.d, "N": args.N, "cusp": args.cusp,
            "t_floor": args.t_floor, "tol": args.tol,
        },
        "method": "numeric",
        "count": len(entries),
        "entries": entries,
        "warnings": _level_warnings(args.N),
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bianchi-eis",
        description="Eisenstein invariants of Bianchi congruence subgroups",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_level=True):
        p.add_argument("--d", type=int, default=1, help="field parameter (Q(sqrt(-d)))")
        if with_level:
            p.add_argument("--N", type=int, required=True, help="level")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--cache-dir", default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--eps", type=float, default=1e-10)

    p = sub.add_parser("cusps", help="cusp double cosets of Gamma1(N)")
    common(p)
    p.set_defaults(fn=_cmd_cusps)

    p = sub.add_parser("dims", help="Eisenstein cohomology dimensions")
    common(p)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(fn=_cmd_dims)

    p = sub.add_parser("trace-h1", help="trace of conjugation on degree-1 Eisenstein part")
    common(p)
    p.set_defaults(fn=_cmd_trace_h1)

    p = sub.add_parser("trace-h2", help="degree-2 trace by fixed-cusp enumeration")
    common(p)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--rho", choices=("sigma", "tau"), default="sigma")
    p.set_defaults(fn=_cmd_trace_h2)

    p = sub.add_parser("lefschetz", help="Lefschetz number of conjugation")
    common(p)
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(fn=_cmd_lefschetz)

    p = sub.add_parser("index-oracle", help="index closed form vs finite-quotient oracles")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(fn=_cmd_index_oracle)

    p = sub.add_parser("cocycle-eval", help="evaluate Psi(u,v) or Phi on a matrix")
    common(p)
    p.add_argument("--kind", choices=("psi", "phi"), default="psi")
    p.add_argument("--u", default="0,0", help="numerator pair a,b for u = (a+b*omega)/N")
    p.add_argument("--v", default="0,0")
    p.add_argument("--ma", default="1,0")
    p.add_argument("--mb", default="0,0")
    p.add_argument("--mc", default="0,0")
    p.add_argument("--md", default="1,0")
    p.add_argument("--first-coeff", choices=("legendre", "quotient"), default="legendre")
    p.set_defaults(fn=_cmd_cocycle_eval)

    p = sub.add_parser("coboundary-check", help="residuals of H(Au) = H(u) + Phi(A)")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(fn=_cmd_coboundary_check)

    p = sub.add_parser("sigma-matrix", help="exact conjugation matrix on the cocycle basis")
    common(p)
    p.add_argument("--dump-entries", action="store_true")
    p.set_defaults(fn=_cmd_sigma_matrix)

    p = sub.add_parser("cycle", help="cycle coefficients over coset representatives")
    common(p)
    p.add_argument("--cusp", type=int, default=0)
    p.add_argument("--t-floor", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=_cmd_cycle)

    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        report = args.fn(args)
    except (ToleranceNotMet, QuadratureNotConverged) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}, sort_keys=True))
        return 3
    except (BianchiError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}, sort_keys=True))
        return 2
    _emit(report, args.format)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
