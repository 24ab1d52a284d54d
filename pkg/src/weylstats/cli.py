"""Command-line front end.

Subcommands: ``sample`` (elements plus statistics), ``moments`` (closed
forms), ``enumerate`` (oracle pmf / exact moments / generating polynomial),
``clt``, ``evlt``, ``hajek`` (projection quality), and product variants
``product-sample`` / ``product-moments`` / ``product-clt`` / ``product-evlt``.

Outputs are UTF-8 JSON (CSV for pmf tables), written to --out or stdout.
Rational values are serialized exactly as "numerator/denominator" strings,
never as floats.  Identical argv and seed produce byte-identical output
except for the elapsed_ms field.

Exit codes: 0 success, 2 configuration error, 3 enumeration budget exceeded,
4 output I/O failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import _kernels, moments, oracle
from .asymptotics import (
    CltConfig,
    DEFAULT_CLT_GRID,
    DEFAULT_EVLT_GRID,
    EvltConfig,
    hajek_quality,
    run_clt,
    run_evlt,
)
from .core import GroupFamily, GroupSpec, ProductGroupSpec
from .sampler import RngStream, sample_group_element, sample_product_element
from .stats import element_statistics, product_statistics

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _parse_bias(text, exact_required: bool, warnings: list[str]) -> Fraction:
    """Rational-string bias parser; floats only on Monte Carlo paths."""
    if isinstance(text, float):
        if exact_required:
            raise ValueError(
                "bias must be a rational string (e.g. \"1/4\") on exact paths"
            )
        warnings.append("bias-coerced-from-float")
        return Fraction(text)
    return Fraction(str(text))


def _parse_grid(text: str) -> tuple[float, ...]:
    values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    if not values:
        raise ValueError("grid must contain at least one point")
    return values


def _group_spec(args, exact_required: bool, warnings: list[str]) -> GroupSpec:
    family = GroupFamily(args.family)
    bias = _parse_bias(args.p, exact_required, warnings) if args.p is not None else Fraction(0)
    return GroupSpec(family, args.n, bias)


def _component_spec(text, exact_required: bool, warnings: list[str]) -> GroupSpec:
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"component must look like FAMILY:RANK[:BIAS], got {text!r}")
    family = GroupFamily(parts[0])
    rank = int(parts[1])
    bias = _parse_bias(parts[2], exact_required, warnings) if len(parts) == 3 else Fraction(0)
    return GroupSpec(family, rank, bias)


def _product_spec(args, exact_required: bool, warnings: list[str]) -> ProductGroupSpec:
    if not args.component:
        raise ValueError("at least one --component is required")
    comps = tuple(_component_spec(c, exact_required, warnings) for c in args.component)
    return ProductGroupSpec(comps)


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _emit_json(payload: dict, path) -> None:
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", path)


def _element_payload(pi, family) -> dict:
    st = element_statistics(pi, family)
    return {
        "entries": list(pi.entries),
        "inv": st.inv,
        "des": st.des,
        "inv_plus": st.inv_plus,
        "inv_minus": st.inv_minus,
        "inv_circ": st.inv_circ,
    }


def _cmd_sample(args, warnings: list[str]) -> None:
    spec = _group_spec(args, exact_required=False, warnings=warnings)
    elements = []
    for j in range(args.count):
        pi = sample_group_element(spec, RngStream(args.seed, j))
        elements.append(_element_payload(pi, spec.family))
    _emit_json(
        {
            "config": {"command": "sample", "family": spec.family.value,
                       "n": spec.rank, "p": str(spec.bias), "count": args.count},
            "seed": args.seed,
            "elements": elements,
            "warnings": warnings,
        },
        args.out,
    )


def _cmd_product_sample(args, warnings: list[str]) -> None:
    spec = _product_spec(args, exact_required=False, warnings=warnings)
    draws = []
    for j in range(args.count):
        pis = sample_product_element(spec, RngStream(args.seed, j))
        total = product_statistics(pis, spec)
        draws.append(
            {
                "components": [list(pi.entries) for pi in pis],
                "inv": total.inv,
                "des": total.des,
            }
        )
    _emit_json(
        {
            "config": {"command": "product-sample",
                       "components": [c.label() for c in spec.components],
                       "count": args.count},
            "seed": args.seed,
            "draws": draws,
            "warnings": warnings,
        },
        args.out,
    )


def _cmd_moments(args, warnings: list[str]) -> None:
    spec = _group_spec(args, exact_required=True, warnings=warnings)
    payload = {
        "config": {"command": "moments", "family": spec.family.value,
                   "n": spec.rank, "p": str(spec.bias)},
        "moments": moments.moment_set(spec).to_dict(),
        "warnings": warnings,
    }
    if args.oracle:
        payload["oracle"] = oracle.exact_moments(spec).to_dict()
    _emit_json(payload, args.out)


def _cmd_product_moments(args, warnings: list[str]) -> None:
    spec = _product_spec(args, exact_required=True, warnings=warnings)
    _emit_json(
        {
            "config": {"command": "product-moments",
                       "components": [c.label() for c in spec.components]},
            "moments": moments.product_moments(spec).to_dict(),
            "warnings": warnings,
        },
        args.out,
    )


def _cmd_enumerate(args, warnings: list[str]) -> None:
    spec = _group_spec(args, exact_required=True, warnings=warnings)
    fmt = args.format or ("csv" if args.what in ("pmf", "elements") else "json")
    if args.what == "elements":
        if fmt != "csv":
            raise ValueError("the element table is only emitted as csv")
        _emit(oracle.elements_to_csv(spec), args.out)
        return
    if args.what == "pmf":
        pmf = oracle.exact_joint_pmf(spec)
        if fmt == "csv":
            _emit(oracle.pmf_to_csv(pmf), args.out)
        else:
            _emit_json(
                {
                    "config": {"command": "enumerate", "what": "pmf",
                               "family": spec.family.value, "n": spec.rank,
                               "p": str(spec.bias)},
                    "rows": [
                        {"inv": v, "des": d, "mass": f"{num}/{den}"}
                        for v, d, num, den in pmf.csv_rows()
                    ],
                    "warnings": warnings,
                },
                args.out,
            )
        return
    if fmt == "csv":
        raise ValueError("csv output is only available for the pmf table")
    if args.what == "moments":
        _emit_json(
            {
                "config": {"command": "enumerate", "what": "moments",
                           "family": spec.family.value, "n": spec.rank,
                           "p": str(spec.bias)},
                "moments": oracle.exact_moments(spec).to_dict(),
                "warnings": warnings,
            },
            args.out,
        )
        return
    gen = oracle.generating_polynomial(spec)
    _emit_json(
        {
            "config": {"command": "enumerate", "what": "genpoly",
                       "family": spec.family.value, "n": spec.rank,
                       "p": str(spec.bias)},
            "genpoly": gen.to_json_dict(),
            "factors_as_product": oracle.factors_as_product(gen),
            "warnings": warnings,
        },
        args.out,
    )


def _merge_warnings(report_dict: dict, warnings: list[str]) -> dict:
    report_dict["warnings"] = sorted(set(report_dict.get("warnings", [])) | set(warnings))
    return report_dict


def _cmd_clt(args, warnings: list[str], spec=None) -> None:
    if spec is None:
        spec = _group_spec(args, exact_required=False, warnings=warnings)
    grid = _parse_grid(args.grid) if args.grid else DEFAULT_CLT_GRID
    report = run_clt(CltConfig(spec=spec, replications=args.R, seed=args.seed, grid=grid))
    _emit_json(_merge_warnings(report.to_dict(), warnings), args.out)


def _cmd_evlt(args, warnings: list[str], spec=None) -> None:
    if spec is None:
        spec = _group_spec(args, exact_required=False, warnings=warnings)
    grid = _parse_grid(args.grid) if args.grid else DEFAULT_EVLT_GRID
    report = run_evlt(
        EvltConfig(spec=spec, block_size=args.k, replications=args.R,
                   seed=args.seed, grid=grid, self_test=args.self_test)
    )
    _emit_json(_merge_warnings(report.to_dict(), warnings), args.out)


def _cmd_hajek(args, warnings: list[str]) -> None:
    spec = _group_spec(args, exact_required=False, warnings=warnings)
    report = hajek_quality(spec, args.R, args.seed)
    payload = report.to_dict()
    payload["warnings"] = warnings
    _emit_json(payload, args.out)


def _add_group_args(parser, need_p=True):
    parser.add_argument("--family", required=True, choices=[f.value for f in GroupFamily])
    parser.add_argument("--n", required=True, type=int)
    if need_p:
        parser.add_argument("--p", default=None, help="sign bias as a rational string, e.g. 1/4")


def _add_common_output(parser):
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", default="json", choices=["json", "csv"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for the batched kernels "
                             "(default: WEYLSTATS_THREADS or all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylstats",
        description="Inversion/descent statistics of random classical Weyl group elements",
    )
    parser.add_argument("--config", default=None,
                        help="JSON file of defaults mirroring the flag names")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw elements and their statistics")
    _add_group_args(p)
    p.add_argument("--count", type=int, default=10)
    _add_common_output(p)

    p = sub.add_parser("moments", help="closed-form moments")
    _add_group_args(p)
    p.add_argument("--oracle", action="store_true",
                   help="also compute the enumeration oracle values")
    _add_common_output(p)

    p = sub.add_parser("enumerate", help="exact enumeration oracle outputs")
    _add_group_args(p)
    p.add_argument("--what", default="pmf",
                   choices=["pmf", "elements", "moments", "genpoly"])
    _add_common_output(p)
    p.set_defaults(format=None)

    p = sub.add_parser("clt", help="bivariate CLT experiment")
    _add_group_args(p)
    p.add_argument("--R", type=int, required=True, help="replications")
    p.add_argument("--grid", default=None, help="comma-separated corner points")
    _add_common_output(p)

    p = sub.add_parser("evlt", help="bivariate extreme value experiment")
    _add_group_args(p)
    p.add_argument("--R", type=int, required=True, help="replications")
    p.add_argument("--k", type=int, required=True, help="copies per maximum")
    p.add_argument("--grid", default=None)
    p.add_argument("--self-test", dest="self_test", action="store_true",
                   help="replace the maxima by exact Gumbel draws (sanity path)")
    _add_common_output(p)

    p = sub.add_parser("hajek", help="Hajek projection quality report")
    _add_group_args(p)
    p.add_argument("--R", type=int, required=True)
    _add_common_output(p)

    for name in ("product-sample", "product-moments", "product-clt", "product-evlt"):
        p = sub.add_parser(name, help=f"{name.split('-', 1)[1]} on a direct product")
        p.add_argument("--component", action="append", default=[],
                       help="FAMILY:RANK[:BIAS], repeatable")
        if name == "product-sample":
            p.add_argument("--count", type=int, default=10)
        if name in ("product-clt", "product-evlt"):
            p.add_argument("--R", type=int, required=True)
            p.add_argument("--grid", default=None)
        if name == "product-evlt":
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--self-test", dest="self_test", action="store_true")
        _add_common_output(p)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Fold --config file values in as defaults (explicit flags win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = argv[idx + 1]
    with open(path, encoding="utf-8") as handle:
        values = json.load(handle)
    if not isinstance(values, dict):
        raise ValueError("config file must hold a JSON object")
    extra: list[str] = []
    for key, value in values.items():
        flag = f"--{key}"
        if flag in argv:
            continue
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        elif isinstance(value, list):
            for item in value:
                extra.extend([flag, str(item)])
        else:
            extra.extend([flag, str(value)])
    return argv + extra


def _configure_threads(args) -> None:
    threads = getattr(args, "threads", None)
    if threads is None:
        env = os.environ.get("WEYLSTATS_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    _kernels.set_num_threads(threads)


_DISPATCH = {
    "sample": _cmd_sample,
    "moments": _cmd_moments,
    "enumerate": _cmd_enumerate,
    "clt": _cmd_clt,
    "evlt": _cmd_evlt,
    "hajek": _cmd_hajek,
    "product-sample": _cmd_product_sample,
    "product-moments": _cmd_product_moments,
}


def run_cli(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            argv = _apply_config_file(parser, argv)
        except OSError as exc:
            raise ValueError(f"cannot read config file: {exc}") from exc
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        _configure_threads(args)
        warnings: list[str] = []
        if args.command == "product-clt":
            spec = _product_spec(args, exact_required=False, warnings=warnings)
            _cmd_clt(args, warnings, spec=spec)
        elif args.command == "product-evlt":
            spec = _product_spec(args, exact_required=False, warnings=warnings)
            _cmd_evlt(args, warnings, spec=spec)
        else:
            _DISPATCH[args.command](args, warnings)
        return EXIT_OK
    except oracle.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
