"""Command-line pipeline for the cohomology verification suite.

Each subcommand runs one verification stage and writes a JSON report (to
stdout, and to a file when an output directory is given).  Reports are
deterministic: keys are sorted, no timestamps, and every report carries the
content hashes of the data files the computation consumed, so two runs on
the same tree are byte-identical.

Exit codes: 0 when the stage verifies, 1 when a verification check fails,
2 on configuration or data errors (bad flags, missing files, checksum
mismatches).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import datafiles
from .datafiles import DataIntegrityError
from .groups import build_sylow_hs, census_report
from .series import (
    e2_mismatch_report,
    expected_expansion,
    generator_bound_report,
    module_series,
    p_series,
)

EXPECTED_BETTI = [1, 3, 7, 14, 23, 34, 48, 65, 84, 105, 131]


class StageFailure(Exception):
    """A stage ran to completion but its verification checks failed."""


def _data_hashes() -> dict:
    return dict(sorted(datafiles.pinned_hashes().items()))


def _emit(report: dict, name: str, out) -> None:
    report = dict(report)
    report["data_hashes"] = _data_hashes()
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    click.echo(text)
    if out is not None:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{name}.json").write_text(text + "\n")


def _finish(ok: bool, report: dict, name: str, out) -> None:
    report = dict(report)
    report["stage"] = name
    report["passed"] = bool(ok)
    _emit(report, name, out)
    if not ok:
        raise StageFailure(name)


@click.group()
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for JSON reports and persisted state.")
@click.pass_context
def main(ctx, out):
    """Exact verification pipeline for the order-512 cohomology ring."""
    ctx.ensure_object(dict)
    ctx.obj["out"] = out


def _out(ctx, local=None):
    return local if local is not None else ctx.obj.get("out")


def _run(stage):
    """Translate stage outcomes into exit codes."""
    try:
        stage()
    except StageFailure:
        sys.exit(1)
    except (DataIntegrityError, FileNotFoundError, KeyError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)
    sys.exit(0)


# -- stage implementations ---------------------------------------------------

def _stage_groups(out) -> None:
    report = census_report(build_sylow_hs())
    checks = {
        "rank4_count": report["rank4_count"] == 8,
        "rank5_absent": report["rank5_count"] == 0,
        "named_rank4_found": report["rank4_named_all_found"],
        "rank4_class_sizes": report["rank4_class_sizes"] == [2, 2, 4],
        "maximal_rank3": report["maximal_rank3_class_count"] == 6,
        "wreath_quotient": report["wreath_quotient_ok"],
        "outer_swap": report["alpha_swaps_A_and_C"],
        "centralizer_words": all(report["rank3_centralizer_words_match"].values()),
    }
    report["checks"] = checks
    _finish(all(checks.values()), report, "groups", out)


def _stage_mod(out) -> None:
    from . import modrep

    tensor = modrep.verify_tensor_table()
    sequences = modrep.verify_exact_sequences()
    factorization = modrep.verify_symmetric_factorization(8)
    socles = modrep.socle_and_permutation_report()
    ok = (tensor["all_certified"] and sequences["all_found"]
          and factorization["multiplication_isomorphism"]
          and factorization["decomposition_dims_match"]
          and socles["all_identified"])
    report = {
        "tensor_table": tensor,
        "exact_sequences": sequences,
        "symmetric_factorization": factorization,
        "socle_identifications": socles,
    }
    _finish(ok, report, "mod", out)


def _state_dir(out) -> Path:
    base = Path(out) if out is not None else Path("coho-state")
    return base / "resolution-S"


def _stage_resolve(out, max_degree, budget_mb, stretch, resume_only=False) -> None:
    from .resolution import BudgetExceededError, minimal_resolution

    if max_degree is None:
        max_degree = 10 if stretch else 6
    group = build_sylow_hs()
    state = _state_dir(out)
    if resume_only and not state.exists():
        state_parent = state.parent
        raise FileNotFoundError(
            f"nothing to resume under {state_parent} (run resolve first)")
    try:
        res = minimal_resolution(group, max_degree, out=state,
                                 budget_mb=budget_mb)
    except BudgetExceededError as err:
        _finish(False, {"error": str(err), "budget_mb": budget_mb},
                "resolve", out)
        return
    betti = list(res.betti[:res.top_degree + 1])
    expected = EXPECTED_BETTI[:len(betti)]
    report = {
        "group": "S",
        "max_degree": res.top_degree,
        "betti": betti,
        "expected_betti": expected,
        "state_dir": str(state),
    }
    _finish(betti == expected, report, "resolve", out)


def _stage_betti(out, max_degree) -> None:
    from .resolution import minimal_resolution

    if max_degree is None:
        max_degree = 6
    group = build_sylow_hs()
    state = _state_dir(out)
    res = minimal_resolution(group, max_degree, out=state)
    betti = list(res.betti[:max_degree + 1])
    series = p_series().expand(max_degree)
    report = {
        "betti": betti,
        "series_coefficients": series,
        "matches_series": betti == series,
    }
    _finish(betti == series, report, "betti", out)


def _stage_cohdim(out, module_name, max_degree) -> None:
    from .modrep import named_module, u3_group
    from .resolution import cohomology_dims

    if max_degree is None:
        max_degree = 8
    group = u3_group()
    module = named_module(module_name)
    dims = cohomology_dims(group, module, max_degree)
    expected = module_series(module_name).expand(max_degree)
    report = {
        "module": module_name,
        "max_degree": max_degree,
        "cohomology_dims": dims,
        "expected_series": expected,
        "matches_series": dims == expected,
    }
    _finish(dims == expected, report, "cohdim", out)


def _stage_e2(out, expand) -> None:
    report = e2_mismatch_report(expand)
    report["generator_bound"] = generator_bound_report()
    printed = expected_expansion()
    degree = min(expand, len(printed) - 1)
    report["expansion"] = p_series().expand(degree)
    report["printed_expansion"] = printed[:degree + 1]
    ok = report["equal"] and report["expansion"] == report["printed_expansion"]
    _finish(ok, report, "e2", out)


def _stage_ring(out, action, max_degree, budget_mb) -> None:
    from .ringcalc import ring_report

    if max_degree is None:
        max_degree = 14
    report = ring_report(max_degree, budget_mb)
    if action == "hilbert":
        ok = report["hilbert_match"]
    else:
        ok = report["nakayama_matches_file"]
    report["action"] = action
    _finish(ok, report, "ring", out)


def _stage_detect(out, action, max_degree) -> None:
    from .detection import DictionaryUnsolvedError, solve_generator_dictionary

    if max_degree is None:
        max_degree = 14
    try:
        solved = solve_generator_dictionary()
    except DictionaryUnsolvedError as err:
        report = dict(err.report)
        report["solved"] = False
        _finish(False, report, "detect", out)
        return
    if action == "solve-dictionary":
        report = {k: v for k, v in solved.items() if k != "tables"}
        report["solved"] = True
        _finish(True, report, "detect", out)
        return
    table = solved["tables"][0]
    relations = table.verify_relations()
    ranks = table.image_hilbert(max_degree)
    expected = p_series().expand(max_degree)
    report = {
        "solved": True,
        "relations": relations,
        "image_hilbert": ranks,
        "expected_hilbert": expected,
    }
    ok = relations.get("all_vanish", False) and ranks == expected
    _finish(ok, report, "detect", out)


def _stage_sw(out) -> None:
    from .swclasses import verify_sw_tables

    report = verify_sw_tables()
    _finish(report["all_match"], report, "sw", out)


def _stage_steenrod(out) -> None:
    from .steenrod import verification_report

    report = verification_report()
    ok = (report["dictionary_resolved"] and not report.get("failed")
          and not report.get("blocked"))
    _finish(ok, report, "steenrod", out)


# -- subcommands -------------------------------------------------------------

@main.command()
@click.argument("action", default="verify",
                type=click.Choice(["verify"]))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def groups(ctx, action, out):
    """Subgroup census of the order-512 group."""
    _run(lambda: _stage_groups(_out(ctx, out)))


@main.command()
@click.argument("action", default="verify-table",
                type=click.Choice(["verify-table"]))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def mod(ctx, action, out):
    """Named-module identities over the order-8 flag group."""
    _run(lambda: _stage_mod(_out(ctx, out)))


@main.command()
@click.option("--group", "group_name", default="S",
              type=click.Choice(["S"]), help="Group to resolve.")
@click.option("--max-degree", type=int, default=None)
@click.option("--budget-mb", type=float, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--stretch", is_flag=True,
              help="Extend to degree 10 instead of 6.")
@click.pass_context
def resolve(ctx, group_name, max_degree, budget_mb, out, stretch):
    """Build (or extend) the minimal free resolution, persisting each degree."""
    _run(lambda: _stage_resolve(_out(ctx, out), max_degree, budget_mb, stretch))


@main.command()
@click.option("--max-degree", type=int, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def betti(ctx, max_degree, out):
    """Betti numbers of the minimal resolution against the Poincare series."""
    _run(lambda: _stage_betti(_out(ctx, out), max_degree))


@main.command()
@click.option("--module", "module_name", default="W",
              help="Named module (k, M, Mstar, N, K, W, Wstar, F, T, Y9, X10).")
@click.option("--max-degree", type=int, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def cohdim(ctx, module_name, max_degree, out):
    """Cohomology dimensions of a named module against its closed-form series."""
    _run(lambda: _stage_cohdim(_out(ctx, out), module_name, max_degree))


@main.command()
@click.option("--expand", type=int, default=18,
              help="Expansion degree for the series comparison.")
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def e2(ctx, expand, out):
    """Assembled spectral-sequence series against the closed form."""
    _run(lambda: _stage_e2(_out(ctx, out), expand))


@main.command()
@click.argument("action", default="hilbert",
                type=click.Choice(["hilbert", "nakayama"]))
@click.option("--max-degree", type=int, default=None)
@click.option("--budget-mb", type=float, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def ring(ctx, action, max_degree, budget_mb, out):
    """Presentation audit: Hilbert function or minimal generator counts."""
    _run(lambda: _stage_ring(_out(ctx, out), action, max_degree, budget_mb))


@main.command()
@click.argument("action", default="solve-dictionary",
                type=click.Choice(["solve-dictionary", "verify"]))
@click.option("--max-degree", type=int, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def detect(ctx, action, max_degree, out):
    """Generator dictionary over the nine detecting subgroup rings."""
    _run(lambda: _stage_detect(_out(ctx, out), action, max_degree))


@main.command()
@click.argument("action", default="verify", type=click.Choice(["verify"]))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def sw(ctx, action, out):
    """Stiefel-Whitney restriction tables, cell by cell."""
    _run(lambda: _stage_sw(_out(ctx, out)))


@main.command()
@click.argument("action", default="verify", type=click.Choice(["verify"]))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def steenrod(ctx, action, out):
    """Steenrod operation identities after restriction."""
    _run(lambda: _stage_steenrod(_out(ctx, out)))


_STAGES = ("groups", "mod", "resolve", "betti", "cohdim", "e2", "ring",
           "detect", "sw", "steenrod")

# A stage only runs when everything it builds on has passed; unrelated
# failures leave it scheduled.
_DEPENDS = {
    "betti": ("resolve",),
    "cohdim": ("mod",),
    "detect": ("ring",),
    "steenrod": ("detect",),
}


@main.command(name="all")
@click.option("--max-degree", type=int, default=None,
              help="Resolution degree (default 6; stretch default 10).")
@click.option("--budget-mb", type=float, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--stretch", is_flag=True)
@click.pass_context
def run_all(ctx, max_degree, budget_mb, out, stretch):
    """Run every stage in dependency order and summarize."""
    out = _out(ctx, out)
    runners = {
        "groups": lambda: _stage_groups(out),
        "mod": lambda: _stage_mod(out),
        "resolve": lambda: _stage_resolve(out, max_degree, budget_mb, stretch),
        "betti": lambda: _stage_betti(out, max_degree),
        "cohdim": lambda: _stage_cohdim(out, "W", None),
        "e2": lambda: _stage_e2(out, 18),
        "ring": lambda: _stage_ring(out, "hilbert", None, budget_mb),
        "detect": lambda: _stage_detect(out, "verify", None),
        "sw": lambda: _stage_sw(out),
        "steenrod": lambda: _stage_steenrod(out),
    }
    status = {}
    for name in _STAGES:
        blocked_by = [d for d in _DEPENDS.get(name, ())
                      if status.get(d) != "passed"]
        if blocked_by:
            status[name] = f"skipped (needs {', '.join(blocked_by)})"
            continue
        try:
            runners[name]()
            status[name] = "passed"
        except StageFailure:
            status[name] = "failed"
        except (DataIntegrityError, FileNotFoundError, KeyError, ValueError) as err:
            click.echo(f"error in {name}: {err}", err=True)
            status[name] = "error"
    summary = {"stages": status,
               "all_passed": all(v == "passed" for v in status.values())}
    _emit(summary, "summary", out)
    if any(v == "error" for v in status.values()):
        sys.exit(2)
    sys.exit(0 if summary["all_passed"] else 1)


@main.command()
@click.option("--max-degree", type=int, default=None)
@click.option("--budget-mb", type=float, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def resume(ctx, max_degree, budget_mb, out):
    """Continue a persisted resolution from its last completed degree."""
    out = _out(ctx, out)
    _run(lambda: _stage_resolve(out, max_degree, budget_mb, False,
                                resume_only=True))


if __name__ == "__main__":
    main()
