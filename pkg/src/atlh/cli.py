"""Command-line front end: check formulas, translate, generate models, run
the bundled experiments.

Exit codes: 0 for a true verdict (or plain success), 1 for a false verdict
(or a harness that found mismatches), 2 for any usage, parse, validation or
cap error. Output is deterministic for a fixed command line and seed, except
for wallclock columns.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cegm import ModelError, load_model, save_model
from .formula import (
    CoalFG,
    CoalG,
    CoalU,
    CoalX,
    FormulaError,
    formula_length,
    parse_formula,
    pretty_print,
    subformulas_by_length,
)
from .mcheck import CheckError, CheckOptions, check, find_witness, label
from .scenarios import (
    ScenarioError,
    gen_referendum_double,
    gen_referendum_single,
    gen_threeballot,
    infoset_table_csv,
    render_infoset_table,
    threeballot_infosets,
)
from .succinct import SuccinctError, gen_Mn, gen_Nnj, succinctness_rows
from .translate import (
    TranslateError,
    check_translation_equivalence,
    h_to_k,
    k_to_h,
)

_ERRORS = (
    FormulaError,
    ModelError,
    CheckError,
    TranslateError,
    SuccinctError,
    ScenarioError,
    OSError,
)


def _fail(message: str) -> int:
    prefix = "error:"
    if os.environ.get("ATLH_MC_COLOR") == "1":
        prefix = "\x1b[31merror:\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)
    return 2


def _options(args) -> CheckOptions:
    return CheckOptions(
        strategy_mode=args.strategy_mode,
        success_scope=args.scope,
        threads=args.threads,
    )


def _formula_text(args) -> str:
    if args.formula is not None and args.formula_file is not None:
        raise FormulaError("both --formula and --formula-file given; pick one")
    if args.formula is not None:
        return args.formula
    if args.formula_file is not None:
        with open(args.formula_file, encoding="utf-8") as handle:
            return handle.read()
    raise FormulaError("no formula given; use --formula or --formula-file")


def _csv_quote(cell: str) -> str:
    if any(ch in cell for ch in ",\"\n"):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def cmd_check(args) -> int:
    model = load_model(_read(args.model))
    f = parse_formula(_formula_text(args))
    state = args.state if args.state is not None else model.initial
    opts = _options(args)
    verdict = check(model, state, f, opts)
    text = pretty_print(f)

    witness = None
    if verdict and isinstance(f, (CoalX, CoalG, CoalU, CoalFG)):
        witness = find_witness(model, state, f, opts)

    if args.output == "json-lines":
        out = [
            json.dumps(
                {"event": "verdict", "state": state, "formula": text, "result": verdict},
                sort_keys=True,
            )
        ]
        if witness is not None:
            out.append(
                json.dumps(
                    {
                        "event": "witness",
                        "coalition": list(witness.coalition),
                        "actions": {
                            a: dict(sorted(witness.actions[a].items()))
                            for a in witness.coalition
                        },
                    },
                    sort_keys=True,
                )
            )
        if args.dump_labels:
            labels = label(model, f, opts)
            for sub in subformulas_by_length(f):
                states = [q for q in model.states if q in labels[sub]]
                out.append(
                    json.dumps(
                        {"event": "label", "formula": pretty_print(sub), "states": states},
                        sort_keys=True,
                    )
                )
    elif args.output == "csv":
        out = ["state,formula,result", f"{state},{_csv_quote(text)},{str(verdict).lower()}"]
    else:
        out = [f"formula: {text}", f"state: {state}", f"result: {str(verdict).lower()}"]
        if witness is not None:
            out.append(f"witness: {witness}")
        if args.dump_labels:
            labels = label(model, f, opts)
            for sub in subformulas_by_length(f):
                states = " ".join(q for q in model.states if q in labels[sub])
                out.append(f"label {pretty_print(sub)}: {states}")
    print("\n".join(out))
    return 0 if verdict else 1


def cmd_translate(args) -> int:
    f = parse_formula(_formula_text(args))
    if args.dir == "h2k":
        result = h_to_k(f, node_cap=args.cap_nodes)
    else:
        result = k_to_h(f)
    text = pretty_print(result)
    sizes = (formula_length(f), formula_length(result))
    if args.output == "json-lines":
        print(
            json.dumps(
                {
                    "event": "translation",
                    "direction": args.dir,
                    "output": text,
                    "input_length": sizes[0],
                    "output_length": sizes[1],
                },
                sort_keys=True,
            )
        )
    elif args.output == "csv":
        print("direction,output,input_length,output_length")
        print(f"{args.dir},{_csv_quote(text)},{sizes[0]},{sizes[1]}")
    else:
        print(text)
        print(f"input length: {sizes[0]}")
        print(f"output length: {sizes[1]}")
    return 0


def cmd_gen(args) -> int:
    if args.target == "fig1":
        model = gen_referendum_single()
    elif args.target in ("m1", "m2"):
        model = gen_referendum_double(args.target.upper())
    elif args.target == "threeballot":
        model = gen_threeballot()
    elif args.target == "Mn":
        if args.n is None:
            raise SuccinctError("gen Mn needs --n")
        model = gen_Mn(args.n)
    else:
        if args.n is None or args.j is None:
            raise SuccinctError("gen Nnj needs --n and --j")
        model = gen_Nnj(args.n, args.j)
    text = save_model(model)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return 0


def cmd_experiment(args) -> int:
    if args.name == "succinctness":
        rows = succinctness_rows(args.nmax, node_cap=args.cap_nodes)
        out = ["n,len_phi_n,len_translated,fsg_min,mel_min,wallclock_ms"]
        for row in rows:
            cells = [
                row["n"],
                row["len_phi_n"],
                row["len_translated"],
                row["fsg_min"],
                row["mel_min"],
                row["wallclock_ms"],
            ]
            out.append(",".join("" if c is None else str(c) for c in cells))
        print("\n".join(out))
        return 0
    if args.name == "translation-equivalence":
        report = check_translation_equivalence(samples=args.samples, seed=args.seed)
        print(report)
        print(f"mismatches: {report.mismatches}")
        return 0 if report.mismatches == 0 else 1
    rows = threeballot_infosets()
    if args.csv or args.output == "csv":
        print(infoset_table_csv(rows))
    else:
        print(render_infoset_table(rows))
    return 0


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--strategy-mode", choices=("ir", "Ir"), default="ir")
    common.add_argument("--scope", choices=("objective", "subjective"), default="objective")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap-nodes", type=int, default=10**6)
    common.add_argument(
        "--output", choices=("text", "csv", "json-lines"), default="text"
    )

    parser = argparse.ArgumentParser(
        prog="atlh",
        description="Model checking for strategic logics with knowledge and uncertainty.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", parents=[common], help="evaluate a formula on a model")
    p_check.add_argument("--model", required=True, help="model file path")
    p_check.add_argument("--formula", help="formula text")
    p_check.add_argument("--formula-file", help="file containing the formula")
    p_check.add_argument("--state", help="state to check (default: initial state)")
    p_check.add_argument(
        "--dump-labels", action="store_true", help="print every subformula's states"
    )
    p_check.set_defaults(run=cmd_check)

    p_tr = sub.add_parser("translate", parents=[common], help="rewrite between the two logics")
    p_tr.add_argument("--dir", choices=("h2k", "k2h"), required=True)
    p_tr.add_argument("--formula", help="formula text")
    p_tr.add_argument("--formula-file", help="file containing the formula")
    p_tr.set_defaults(run=cmd_translate)

    p_gen = sub.add_parser("gen", parents=[common], help="generate a bundled model")
    p_gen.add_argument(
        "target", choices=("fig1", "m1", "m2", "threeballot", "Mn", "Nnj")
    )
    p_gen.add_argument("--n", type=int)
    p_gen.add_argument("--j", type=int)
    p_gen.add_argument("--out", help="write the model here instead of stdout")
    p_gen.set_defaults(run=cmd_gen)

    p_exp = sub.add_parser("experiment", parents=[common], help="run a bundled experiment")
    p_exp.add_argument(
        "name", choices=("succinctness", "translation-equivalence", "threeballot-table")
    )
    p_exp.add_argument("--nmax", type=int, default=4)
    p_exp.add_argument("--samples", type=int, default=100)
    p_exp.add_argument("--csv", action="store_true", help="CSV table output")
    p_exp.set_defaults(run=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        return _fail("--threads must be positive")
    if args.cap_nodes < 1:
        return _fail("--cap-nodes must be positive")
    try:
        return args.run(args)
    except _ERRORS as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
