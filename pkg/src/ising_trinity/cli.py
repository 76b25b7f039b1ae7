"""Command-line interface: pmf, verify, sample, fit, export-graph.

Exit codes: 0 on success, 1 when verification finds disagreement, 2 on
invalid input (bad files, bad parameters, runtime aborts), 3 when a size or
rank limit is exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .collider import conditioned_pmf, spectral_to_collider
from .core import ModelSpec, Pmf, ising_pmf
from .equivalence import BranchFault, verify_representations
from .errors import (
    EnumerationLimitError,
    IsingTrinityError,
    RankLimitError,
)
from .estimation import fit_pseudo_likelihood
from .graphs import VIEWS, graph_dot
from .latent import LatentForm, QuadratureRule, mirt_marginal_pmf
from .sampling import (
    sample_collider_rejection,
    sample_exact,
    sample_gibbs,
    sample_latent_first,
    save_sample_set,
)
from .specfile import load_model_spec
from .spectral import spectral_pmf, to_spectral

REPRESENTATIONS = ("conventional", "spectral", "collider", "latent")
METHODS = ("exact", "gibbs", "collider-rejection", "latent-first")


def _write_out(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _pmf_rows(pmf: Pmf):
    n = pmf.n
    for k in range(1 << n):
        yield [1 if (k >> i) & 1 else -1 for i in range(n)], pmf.probs[k]


def _representation_pmf(spec: ModelSpec, representation: str, extra_shift: float) -> Pmf:
    if representation == "conventional":
        return ising_pmf(spec)
    form = to_spectral(spec, extra_shift)
    if representation == "spectral":
        return spectral_pmf(form, spec.delta)
    if representation == "collider":
        return conditioned_pmf(spectral_to_collider(form, spec.delta))
    return mirt_marginal_pmf(LatentForm.from_spectral(form, spec.delta))


def _cmd_pmf(args: argparse.Namespace) -> int:
    spec, extra_shift = load_model_spec(args.spec)
    pmf = _representation_pmf(spec, args.representation, extra_shift)
    header = [f"x_{i + 1}" for i in range(pmf.n)] + ["probability"]
    if args.format == "csv":
        lines = [",".join(header)]
        for config, p in _pmf_rows(pmf):
            lines.append(",".join(str(v) for v in config) + f",{p:.17g}")
        _write_out("\n".join(lines) + "\n", args.output)
    else:
        doc = {
            "n": pmf.n,
            "representation": args.representation,
            "log_z": pmf.log_z,
            "columns": header,
            "rows": [config + [float(p)] for config, p in _pmf_rows(pmf)],
        }
        _write_out(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    spec, _ = load_model_spec(args.spec)
    fault = None
    if args.inject_fault is not None:
        fault = BranchFault(branch=args.inject_fault, eps=args.fault_eps)
    rule = QuadratureRule.gauss_hermite(args.quad_nodes)
    report = verify_representations(spec, rule, fault=fault)
    print(report.to_text())
    if args.json_report is not None:
        Path(args.json_report).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0 if report.all_pass else 1


def _cmd_sample(args: argparse.Namespace) -> int:
    spec, extra_shift = load_model_spec(args.spec)
    if args.method == "exact":
        sample = sample_exact(ising_pmf(spec), args.m, args.seed)
    elif args.method == "gibbs":
        sample = sample_gibbs(
            spec, args.m, args.seed, burn_in=args.burn_in, thin=args.thin
        )
    elif args.method == "collider-rejection":
        form = to_spectral(spec, extra_shift)
        sample = sample_collider_rejection(
            spectral_to_collider(form, spec.delta), args.m, args.seed
        )
    else:
        form = to_spectral(spec, extra_shift)
        lf = LatentForm.from_spectral(form, spec.delta)
        sample = sample_latent_first(
            lf, None, args.m, args.seed, grid_points=args.grid_points
        )
    save_sample_set(sample, args.out)
    note = ""
    if "acceptance_rate" in sample.meta:
        note = f" (acceptance rate {sample.meta['acceptance_rate']:.4f})"
    print(f"wrote {sample.m} draws via {sample.method} to {args.out}{note}")
    return 0


def _read_config_table(path: str) -> tuple[np.ndarray, np.ndarray | None]:
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        raise ValueError(f"data file {path} is empty")
    lines = text.split("\n")
    header = [h.strip() for h in lines[0].split(",")]
    has_weight = bool(header) and header[-1].lower() == "weight"
    if len(lines) < 2:
        raise ValueError(f"data file {path} contains no rows")
    try:
        table = np.array(
            [[float(v) for v in line.split(",")] for line in lines[1:]]
        )
    except ValueError as exc:
        raise ValueError(f"data file {path} has a malformed row: {exc}") from exc
    if table.ndim != 2 or table.shape[1] != len(header):
        raise ValueError(
            f"data file {path} rows do not match its header of {len(header)} columns"
        )
    if has_weight:
        return table[:, :-1], table[:, -1]
    return table, None


def _cmd_fit(args: argparse.Namespace) -> int:
    configs, weights = _read_config_table(args.data)
    init = None
    if args.init is not None:
        init, _ = load_model_spec(args.init)
    data = (configs, weights) if weights is not None else configs
    result = fit_pseudo_likelihood(
        data, init, grad_tol=args.grad_tol, max_iter=args.max_iter
    )
    _write_out(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    if args.out != "-":
        print(
            f"fit {'converged' if result.converged else 'did not converge'} after "
            f"{result.iterations} iterations "
            f"(final gradient norm {result.grad_norm_final:.3e})"
        )
    return 0


def _cmd_export_graph(args: argparse.Namespace) -> int:
    spec, extra_shift = load_model_spec(args.spec)
    _write_out(graph_dot(spec, args.view, extra_shift), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ising-trinity",
        description=(
            "Binary +/-1 pairwise models through their network, latent-variable, "
            "and collider representations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_pmf = sub.add_parser("pmf", help="write the exact probability table")
    p_pmf.add_argument("spec", help="model-spec JSON file")
    p_pmf.add_argument(
        "--representation",
        "-r",
        choices=REPRESENTATIONS,
        default="conventional",
        help="code path used to compute the table",
    )
    p_pmf.add_argument("--format", choices=("csv", "json"), default="csv")
    p_pmf.add_argument("--output", "-o", default="-", help="output path or - for stdout")
    p_pmf.set_defaults(handler=_cmd_pmf)

    p_verify = sub.add_parser(
        "verify", help="compare the PMF across all applicable representations"
    )
    p_verify.add_argument("spec", help="model-spec JSON file")
    p_verify.add_argument("--quad-nodes", type=int, default=64)
    p_verify.add_argument("--json-report", help="also write the report as JSON")
    p_verify.add_argument(
        "--inject-fault",
        choices=("conventional", "spectral", "collider", "latent"),
        help="perturb one branch to demonstrate the verifier notices",
    )
    p_verify.add_argument("--fault-eps", type=float, default=1e-6)
    p_verify.set_defaults(handler=_cmd_verify)

    p_sample = sub.add_parser("sample", help="draw configurations from the model")
    p_sample.add_argument("spec", help="model-spec JSON file")
    p_sample.add_argument("--method", choices=METHODS, required=True)
    p_sample.add_argument("--m", type=int, required=True, help="number of draws")
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True, help="output CSV path")
    p_sample.add_argument("--burn-in", type=int, default=1000)
    p_sample.add_argument("--thin", type=int, default=1)
    p_sample.add_argument("--grid-points", type=int, default=4097)
    p_sample.set_defaults(handler=_cmd_sample)

    p_fit = sub.add_parser(
        "fit", help="fit the network form to data by pseudo-likelihood"
    )
    p_fit.add_argument("data", help="CSV of +/-1 draws (optional final weight column)")
    p_fit.add_argument("--init", help="model-spec JSON file to start from")
    p_fit.add_argument("--out", default="-", help="output JSON path or - for stdout")
    p_fit.add_argument("--grad-tol", type=float, default=1e-6)
    p_fit.add_argument("--max-iter", type=int, default=5000)
    p_fit.set_defaults(handler=_cmd_fit)

    p_graph = sub.add_parser("export-graph", help="write a DOT view of the model")
    p_graph.add_argument("spec", help="model-spec JSON file")
    p_graph.add_argument("--view", choices=VIEWS, required=True)
    p_graph.add_argument("--out", default="-", help="output path or - for stdout")
    p_graph.set_defaults(handler=_cmd_export_graph)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (EnumerationLimitError, RankLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (IsingTrinityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
